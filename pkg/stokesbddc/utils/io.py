"""I/O utilities for stokesbddc."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Union

from ..errors import IOError


def atomic_write(
    file_path: Union[str, Path],
    data: Union[bytes, str],
    temp_suffix: str = ".tmp",
) -> None:
    """Atomically write data to a file.

    Text is encoded as UTF-8. The parent directory is created if missing.

    Args:
        file_path: Path to write to
        data: Data to write
        temp_suffix: Suffix for the temporary file

    Raises:
        IOError: If the write fails
    """
    file_path = Path(file_path)
    temp_path = file_path.with_suffix(file_path.suffix + temp_suffix)
    payload = data.encode("utf-8") if isinstance(data, str) else data

    try:
        ensure_dir(file_path)
        with open(temp_path, "wb") as f:
            f.write(payload)
            f.flush()
            os.fsync(f.fileno())

        os.replace(temp_path, file_path)

    except OSError as e:
        raise IOError(f"Failed to write {file_path}: {e}", str(file_path)) from e

    finally:
        if temp_path.exists():
            temp_path.unlink()


def ensure_dir(file_path: Union[str, Path]) -> None:
    """Ensure the parent directory of a file exists."""
    Path(file_path).parent.mkdir(parents=True, exist_ok=True)
