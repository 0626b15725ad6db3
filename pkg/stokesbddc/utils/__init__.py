"""Utility modules for stokesbddc."""

from .hash import array_digest, compute_xxh3
from .io import atomic_write, ensure_dir
from .time import PhaseTimings, Timer, format_duration, time_ms

__all__ = [
    "atomic_write",
    "ensure_dir",
    "compute_xxh3",
    "array_digest",
    "Timer",
    "PhaseTimings",
    "time_ms",
    "format_duration",
]
