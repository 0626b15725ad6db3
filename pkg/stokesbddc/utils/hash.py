"""Hash utilities for stokesbddc."""

from __future__ import annotations

from typing import Union

import numpy as np
import xxhash


def compute_xxh3(data: Union[bytes, bytearray, memoryview]) -> int:
    """Compute the 64-bit XXH3 hash of a byte buffer."""
    return xxhash.xxh3_64(data).intdigest()


def array_digest(values: np.ndarray) -> str:
    """Hex XXH3 digest of an array's float64 contents.

    Two runs produce the same digest only if their solutions are bit-identical,
    which is how sweep determinism is checked.
    """
    buffer = np.ascontiguousarray(values, dtype=np.float64)
    return f"{compute_xxh3(buffer.tobytes()):016x}"
