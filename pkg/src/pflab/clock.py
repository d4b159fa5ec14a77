"""Injectable time sources.

Everything that needs time takes a Clock so the whole stack can run
against a simulated clock in tests: deterministic, and faster than
real time.
"""

from __future__ import annotations

import time
from typing import Protocol, runtime_checkable


@runtime_checkable
class Clock(Protocol):
    def now(self) -> float: ...

    def sleep(self, seconds: float) -> None: ...


class WallClock:
    """Real time. now() is the UNIX epoch in seconds."""

    def now(self) -> float:
        return time.time()

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds)


class SimulatedClock:
    """Manual time. sleep() jumps forward instead of blocking."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            self._now += seconds

    def advance(self, seconds: float) -> float:
        """Alias for sleep that reads better in tests; returns new time."""
        self.sleep(seconds)
        return self._now
