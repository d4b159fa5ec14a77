"""Rig controller: the single owner of live rig state.

Applies relay and variac commands with a settle delay, runs the
periodic measurement loop on an injectable clock, and serves scope
captures. All mutation and frame production happens under one lock, so
no frame can ever reflect a half-applied command.

The measurement loop is materialized lazily: poll() computes and emits
every tick that has become due since the last call. A wall-clock
deployment drives poll() from a pacemaker thread (see run_loop); tests
and the simulated-clock service simply call poll() after advancing the
clock.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable

from .circuit import RigConfig, RigState, WaveformWindow, synthesize_waveforms
from .clock import Clock, WallClock
from .errors import DegenerateSignalError, RangeError
from .sensing import MEASUREMENT_CYCLES, MeasurementFrame, measure

SETTLE_DELAY = 0.5
SCOPE_MAX_CYCLES = 10


@dataclass(frozen=True)
class FrameEvent:
    """One loop tick: either a measurement or an in-band error marker."""

    timestamp: float
    frame: MeasurementFrame | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.frame is not None


Listener = Callable[[FrameEvent], None]


class RigController:
    def __init__(
        self,
        config: RigConfig,
        clock: Clock | None = None,
        settle_delay: float = SETTLE_DELAY,
        window_cycles: int = MEASUREMENT_CYCLES,
    ):
        if settle_delay < 0:
            raise RangeError("settle delay must be non-negative")
        self.config = config
        self.clock = clock if clock is not None else WallClock()
        self.settle_delay = settle_delay
        self.window_cycles = window_cycles
        self.window_period = window_cycles / config.frequency
        self.state = RigState()

        self._lock = threading.RLock()
        self._origin = self.clock.now()
        # first frame lands one full window after startup: the loop
        # needs a window of signal before it has anything to average
        self._next_tick = self._origin + self.window_period
        self._settling_until = float("-inf")
        self._scope_cursor = self._origin
        self._listeners: list[Listener] = []

        self.latest: FrameEvent | None = None
        self.frames_emitted = 0
        self.frames_suppressed = 0
        self.commands_applied = 0

    # -- frame stream ----------------------------------------------------

    def subscribe(self, listener: Listener) -> None:
        with self._lock:
            self._listeners.append(listener)

    def poll(self) -> list[FrameEvent]:
        """Emit every tick due by now; returns the new events in order."""
        with self._lock:
            return self._catch_up(self.clock.now())

    def _catch_up(self, now: float) -> list[FrameEvent]:
        events: list[FrameEvent] = []
        while self._next_tick <= now:
            t = self._next_tick
            self._next_tick += self.window_period
            if t < self._settling_until:
                self.frames_suppressed += 1
                continue
            events.append(self._tick(t))
        return events

    def _tick(self, t: float) -> FrameEvent:
        self.state.sim_time = t
        try:
            frame = measure(
                self.config, self.state, cycles=self.window_cycles, timestamp=t
            )
            event = FrameEvent(timestamp=t, frame=frame)
        except DegenerateSignalError as exc:
            event = FrameEvent(timestamp=t, frame=None, error=str(exc))
        self.latest = event
        self.frames_emitted += 1
        for listener in list(self._listeners):
            listener(event)
        return event

    def run_loop(self, until: float | None = None):
        """Generator that paces the loop on the controller's clock.

        Yields FrameEvents as they become due, sleeping between ticks.
        A wall-clock service runs this in a daemon thread; with a
        simulated clock it fast-forwards time, which is mostly useful
        for soak tests.
        """
        while until is None or self.clock.now() < until:
            with self._lock:
                events = self._catch_up(self.clock.now())
                wait = self._next_tick - self.clock.now()
            yield from events
            if wait > 0:
                self.clock.sleep(wait)

    # -- commands ---------------------------------------------------------

    def set_capacitor(self, engaged: bool) -> RigState:
        """Relay command. A no-op when already in the requested state."""
        with self._lock:
            now = self.clock.now()
            self._catch_up(now)
            if self.state.capacitor_engaged != engaged:
                self.state.capacitor_engaged = bool(engaged)
                self._start_settle(now)
            return self.state

    def set_variac(self, fraction: float) -> RigState:
        """Supply scaling command; fraction of nominal in (0, 1]."""
        if not 0.0 < fraction <= 1.0:
            raise RangeError(f"variac fraction must be in (0, 1], got {fraction!r}")
        with self._lock:
            now = self.clock.now()
            self._catch_up(now)
            if self.state.variac_fraction != fraction:
                self.state.variac_fraction = float(fraction)
                self._start_settle(now)
            return self.state

    def set_load(self, fraction: float) -> RigState:
        """Load scaling command; fraction of the full load in (0, 1]."""
        if not 0.0 < fraction <= 1.0:
            raise RangeError(f"load fraction must be in (0, 1], got {fraction!r}")
        with self._lock:
            now = self.clock.now()
            self._catch_up(now)
            if self.state.load_fraction != fraction:
                self.state.load_fraction = float(fraction)
                self._start_settle(now)
            return self.state

    def _start_settle(self, now: float) -> None:
        self.commands_applied += 1
        self._settling_until = now + self.settle_delay

    # -- scope ------------------------------------------------------------

    def capture_scope(self, cycles: int) -> WaveformWindow:
        """Synthesized waveform snapshot at the current state.

        Consecutive captures get strictly increasing start times even if
        the clock has not moved between calls.
        """
        if not isinstance(cycles, int) or not 1 <= cycles <= SCOPE_MAX_CYCLES:
            raise RangeError(f"scope cycles must be an integer in [1, {SCOPE_MAX_CYCLES}]")
        with self._lock:
            now = self.clock.now()
            self._catch_up(now)
            t0 = max(now, self._scope_cursor)
            self.state.sim_time = t0
            window = synthesize_waveforms(self.config, self.state, cycles)
            self._scope_cursor = t0 + cycles / self.config.frequency
            return window

    # -- introspection ----------------------------------------------------

    @property
    def settling(self) -> bool:
        return self.clock.now() < self._settling_until

    def status(self) -> dict:
        with self._lock:
            return {
                "capacitor_engaged": self.state.capacitor_engaged,
                "variac_fraction": self.state.variac_fraction,
                "load_fraction": self.state.load_fraction,
                "settling": self.settling,
                "frames_emitted": self.frames_emitted,
                "frames_suppressed": self.frames_suppressed,
                "commands_applied": self.commands_applied,
                "window_period": self.window_period,
                "time": self.clock.now(),
            }
