"""Time-slot reservations and exclusive control tokens.

One rig, one schedule: students get non-overlapping slots, each with a
claim code. Claiming a slot inside its window (with a small grace for
clock skew) issues the single control token; everything mutating the
rig must present it until the slot ends or the holder releases.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .clock import Clock, WallClock
from .errors import LabError

CLAIM_GRACE = 30.0
_CODE_ALPHABET = "abcdefghjkmnpqrstuvwxyz23456789"  # no lookalike chars


class InvalidInterval(LabError):
    code = "interval"


class OverlapError(LabError):
    code = "overlap"


class UnknownCode(LabError):
    code = "unknown_code"


class UnknownSlot(LabError):
    code = "unknown_slot"


class NotYourTime(LabError):
    code = "not_your_time"


class AlreadyClaimed(LabError):
    code = "already_claimed"


@dataclass(frozen=True)
class SessionSlot:
    slot_id: str
    student_id: str
    start: float
    end: float
    claim_code: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "slot_id": self.slot_id,
            "student_id": self.student_id,
            "start": self.start,
            "end": self.end,
            "claim_code": self.claim_code,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SessionSlot":
        return cls(
            slot_id=str(data["slot_id"]),
            student_id=str(data["student_id"]),
            start=float(data["start"]),
            end=float(data["end"]),
            claim_code=str(data["claim_code"]),
        )


@dataclass(frozen=True)
class SessionToken:
    token: str
    slot_id: str
    issued_at: float
    expires_at: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "token": self.token,
            "slot_id": self.slot_id,
            "issued_at": self.issued_at,
            "expires_at": self.expires_at,
        }


@dataclass(frozen=True)
class AuthResult:
    allow: bool
    reason: str | None = None
    slot_id: str | None = None


class SessionService:
    """Arbiter for slots and the single active token.

    All mutations serialize through one lock; authorization is a read
    of the current token snapshot. An injectable rng keeps generated
    codes reproducible in tests; by default codes are drawn from the
    system rng.
    """

    def __init__(
        self,
        clock: Clock | None = None,
        grace: float = CLAIM_GRACE,
        rng: random.Random | None = None,
        slots_path: str | Path | None = None,
    ):
        self.clock = clock if clock is not None else WallClock()
        self.grace = grace
        self._rng = rng if rng is not None else random.SystemRandom()
        self._slots_path = Path(slots_path) if slots_path is not None else None
        self._slots: dict[str, SessionSlot] = {}
        self._active: SessionToken | None = None
        self._lock = threading.Lock()
        if self._slots_path is not None and self._slots_path.exists():
            self._load()

    # -- slots -------------------------------------------------------------

    def create_slot(
        self,
        student_id: str,
        start: float,
        end: float,
        claim_code: str | None = None,
    ) -> SessionSlot:
        if not student_id:
            raise InvalidInterval("student id must not be empty")
        if not end > start:
            raise InvalidInterval(f"slot end must be after start ({start} .. {end})")
        with self._lock:
            self._refresh_locked()
            for other in self._slots.values():
                if start < other.end and other.start < end:
                    raise OverlapError(
                        f"slot overlaps {other.slot_id} "
                        f"({other.start} .. {other.end})"
                    )
            slot = SessionSlot(
                slot_id=f"slot-{student_id}-{int(start)}",
                student_id=student_id,
                start=float(start),
                end=float(end),
                claim_code=claim_code if claim_code else self._generate_code(10),
            )
            self._slots[slot.slot_id] = slot
            self._save()
            return slot

    def revoke_slot(self, slot_id: str) -> SessionSlot:
        with self._lock:
            self._refresh_locked()
            slot = self._slots.pop(slot_id, None)
            if slot is None:
                raise UnknownSlot(f"no slot {slot_id}")
            if self._active is not None and self._active.slot_id == slot_id:
                self._active = None
            self._save()
            return slot

    def list_slots(self) -> list[SessionSlot]:
        with self._lock:
            self._refresh_locked()
            return sorted(self._slots.values(), key=lambda s: s.start)

    # -- claim / authorize / release ----------------------------------------

    def claim(self, claim_code: str, now: float | None = None) -> SessionToken:
        now = self.clock.now() if now is None else now
        with self._lock:
            self._refresh_locked()
            slot = next(
                (s for s in self._slots.values() if s.claim_code == claim_code), None
            )
            if slot is None:
                raise UnknownCode("claim code not recognized")
            if not slot.start - self.grace <= now < slot.end:
                raise NotYourTime(
                    f"slot {slot.slot_id} runs {slot.start} .. {slot.end}"
                )
            self._expire_locked(now)
            if self._active is not None:
                raise AlreadyClaimed(
                    "a control token is already active for this rig"
                )
            token = SessionToken(
                token=self._generate_code(24),
                slot_id=slot.slot_id,
                issued_at=now,
                expires_at=slot.end,
            )
            self._active = token
            return token

    def authorize(self, token: str | None, now: float | None = None) -> AuthResult:
        now = self.clock.now() if now is None else now
        active = self._active  # single read; snapshot semantics
        if active is not None and now >= active.expires_at:
            with self._lock:
                self._expire_locked(now)
            # the holder of the lapsed token learns why; anyone else
            # just sees an unknown token
            if token and token == active.token:
                return AuthResult(allow=False, reason="expired")
            active = self._active
        if active is None or not token or token != active.token:
            return AuthResult(allow=False, reason="unknown")
        return AuthResult(allow=True, slot_id=active.slot_id)

    def release(self, token: str | None, now: float | None = None) -> bool:
        """Drop the active token if it matches; idempotent."""
        with self._lock:
            if self._active is not None and token == self._active.token:
                self._active = None
                return True
            return False

    def active_slot_id(self, now: float | None = None) -> str | None:
        now = self.clock.now() if now is None else now
        active = self._active
        if active is None or now >= active.expires_at:
            return None
        return active.slot_id

    def _expire_locked(self, now: float) -> None:
        if self._active is not None and now >= self._active.expires_at:
            self._active = None

    # -- persistence ---------------------------------------------------------

    def _generate_code(self, length: int) -> str:
        return "".join(self._rng.choice(_CODE_ALPHABET) for _ in range(length))

    def _refresh_locked(self) -> None:
        """Re-read the booking sheet before trusting the memory view.

        The sheet is shared with the admin CLI, so slots can appear or
        vanish while the service runs. Claiming and slot management are
        human-paced, so the extra read is free; authorization stays a
        pure memory check.
        """
        if self._slots_path is None:
            return
        try:
            self._load()
        except (OSError, json.JSONDecodeError):
            # missing or half-written sheet: keep the last good view
            pass

    def _load(self) -> None:
        data = json.loads(self._slots_path.read_text(encoding="utf-8"))
        slots: dict[str, SessionSlot] = {}
        for raw in data.get("slots", []):
            slot = SessionSlot.from_dict(raw)
            slots[slot.slot_id] = slot
        self._slots = slots
        if self._active is not None and self._active.slot_id not in self._slots:
            self._active = None

    def _save(self) -> None:
        if self._slots_path is None:
            return
        slots = sorted(self._slots.values(), key=lambda s: s.start)
        payload = {"slots": [s.to_dict() for s in slots]}
        self._slots_path.write_text(
            json.dumps(payload, indent=2) + "\n", encoding="utf-8"
        )
