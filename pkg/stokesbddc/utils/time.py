"""Wall-clock timing of solver phases."""

from __future__ import annotations

import time
from contextlib import contextmanager
from typing import Dict, Generator, Optional


class Timer:
    """Stopwatch measuring one phase; stopping twice keeps the first reading."""

    def __init__(self) -> None:
        self._start_time: Optional[float] = None
        self._elapsed: float = 0.0

    def start(self) -> None:
        self._start_time = time.perf_counter()

    def stop(self) -> float:
        """Stop the timer and return elapsed time in seconds."""
        if self._start_time is not None:
            self._elapsed = time.perf_counter() - self._start_time
            self._start_time = None
        return self._elapsed

    @property
    def elapsed(self) -> float:
        """Elapsed time in seconds (live while running)."""
        if self._start_time is not None:
            return time.perf_counter() - self._start_time
        return self._elapsed

    @property
    def elapsed_ms(self) -> float:
        return self.elapsed * 1000.0


@contextmanager
def time_ms() -> Generator[Timer, None, None]:
    """Context manager yielding a running timer.

    Example:
        with time_ms() as timer:
            factor_interiors(system, decomposition)
        print(f"factorization took {timer.elapsed_ms:.2f}ms")
    """
    timer = Timer()
    timer.start()
    try:
        yield timer
    finally:
        timer.stop()


class PhaseTimings:
    """Milliseconds spent per named phase of a run, in the order the phases ran.

    A phase that raises is not recorded. Entering the same name again adds to
    its total.
    """

    def __init__(self) -> None:
        self.ms: Dict[str, float] = {}

    @contextmanager
    def phase(self, name: str) -> Generator[Timer, None, None]:
        with time_ms() as timer:
            yield timer
        self.ms[name] = self.ms.get(name, 0.0) + timer.elapsed_ms


def format_duration(ms: float) -> str:
    """Format a duration given in milliseconds for console output."""
    if ms < 1000.0:
        return f"{ms:.1f}ms"
    seconds = ms / 1000.0
    if seconds < 60.0:
        return f"{seconds:.2f}s"
    minutes, seconds = divmod(seconds, 60.0)
    return f"{int(minutes)}m{seconds:04.1f}s"
