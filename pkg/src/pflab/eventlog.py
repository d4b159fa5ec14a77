"""Append-only JSONL session log with replay.

One event per line: {"ts": ..., "session": ..., "kind": ..., "payload":
{...}}. Frames are decimated to roughly one per second so a session log
stays readable; commands, claims, scope captures, and releases are
logged one-to-one. A storage failure flips the degraded flag and is
otherwise swallowed: logging must never block rig control.
"""

from __future__ import annotations

import json
import os
from dataclasses import replace
from pathlib import Path
from typing import Any, Iterable

from .circuit import RigState

KINDS = ("claim", "command", "frame", "scope", "release")
FRAME_INTERVAL = 1.0


class EventLog:
    def __init__(
        self,
        path: str | Path,
        frame_interval: float = FRAME_INTERVAL,
        fsync: bool = False,
    ):
        self.path = Path(path)
        self.frame_interval = frame_interval
        self.fsync = fsync
        self.degraded = False
        self._last_frame_ts: float | None = None

    def log(self, ts: float, kind: str, payload: dict, session: str | None = None) -> None:
        if kind not in KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        record = {"ts": ts, "session": session, "kind": kind, "payload": payload}
        line = json.dumps(record)
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                if self.fsync:
                    fh.flush()
                    os.fsync(fh.fileno())
        except OSError:
            self.degraded = True

    def log_frame(self, ts: float, payload: dict, session: str | None = None) -> bool:
        """Decimated frame logging; returns True when the line was kept."""
        if (
            self._last_frame_ts is not None
            and ts - self._last_frame_ts < self.frame_interval
        ):
            return False
        self._last_frame_ts = ts
        self.log(ts, "frame", payload, session)
        return True


def read_events(path: str | Path) -> list[dict[str, Any]]:
    """Parse a JSONL log; corrupt lines are skipped, not fatal."""
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                events.append(json.loads(line))
            except json.JSONDecodeError:
                continue
    return events


def replay_commands(
    events: Iterable[dict[str, Any]], initial: RigState | None = None
) -> RigState:
    """Fold the command events over an initial state.

    Reproduces the command-determined fields (relay, variac, load) of
    the final rig state; sim_time is loop-derived and stays at the
    initial value.
    """
    state = replace(initial) if initial is not None else RigState()
    for event in events:
        if event.get("kind") != "command":
            continue
        payload = event.get("payload", {})
        name = payload.get("name")
        if name == "relay":
            state.capacitor_engaged = bool(payload["engaged"])
        elif name == "variac":
            state.variac_fraction = float(payload["fraction"])
        elif name == "load":
            state.load_fraction = float(payload["fraction"])
    return state
