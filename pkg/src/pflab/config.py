"""Service configuration.

One JSON file describes the whole deployment: the rig electrical
parameters (either spelled out or derived from a registration number),
the cable catalogue, session policy, bind address, and credentials.
An empty file is valid and yields the default demonstration rig.

Environment overrides, applied after the file:
  PFLAB_BIND       bind address (host:port)
  PFLAB_ADMIN_KEY  admin credential for slot management and the variac
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

from .circuit import RigConfig
from .errors import ConfigError
from .prelab import (
    DEFAULT_CABLE_TABLE,
    CableSpec,
    identify_rl,
    personalize,
    select_cable,
    size_capacitor,
)

DEFAULT_BIND = "127.0.0.1:8000"
DEFAULT_LOG_PATH = "events.jsonl"
DEFAULT_SLOTS_PATH = "slots.json"

_RIG_KEYS = {
    "load_r",
    "load_l",
    "cap_c",
    "cable_r",
    "cable_x",
    "source_vrms",
    "frequency",
    "sample_rate",
    "adc_bits",
    "adc_fullscale",
    "v_sensor_gain",
    "i_sensor_gain",
}
_SESSION_KEYS = {"grace", "observer_mode", "slots_path"}
_TOP_KEYS = {
    "rig",
    "registration",
    "target_pf",
    "cable_length_m",
    "cable_table",
    "session",
    "bind",
    "admin_key",
    "log_path",
    "settle_delay",
}


@dataclass(frozen=True)
class LabConfig:
    rig: RigConfig
    cable_table: tuple[CableSpec, ...] = DEFAULT_CABLE_TABLE
    observer_mode: bool = False
    grace: float = 30.0
    bind: str = DEFAULT_BIND
    admin_key: str | None = None
    log_path: str = DEFAULT_LOG_PATH
    slots_path: str = DEFAULT_SLOTS_PATH
    settle_delay: float = 0.5

    @property
    def host(self) -> str:
        return self.bind.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        try:
            return int(self.bind.rsplit(":", 1)[1])
        except (IndexError, ValueError):
            raise ConfigError(f"bind address needs a host:port form, got {self.bind!r}")


def rig_for_registration(
    registration: int,
    target_pf: float = 0.99,
    length_m: float = 20.0,
    table: Sequence[CableSpec] = DEFAULT_CABLE_TABLE,
) -> RigConfig:
    """Build the rig a given student's pre-lab describes: their pump's
    R-L equivalent, the properly sized feeder cable, and the relay
    capacitor sized for the target power factor."""
    spec = personalize(registration)
    rl = identify_rl(spec)
    selection = select_cable(spec.i_rms, table=table, length_m=length_m)
    sized = size_capacitor(spec, target_pf)
    return RigConfig(
        load_r=rl.r_ohms,
        load_l=rl.l_henries,
        cap_c=sized.capacitance,
        cable_r=selection.resistance,
        source_vrms=spec.v_rms,
    )


def default_rig() -> RigConfig:
    return rig_for_registration(0)


def _parse_cable_table(raw: Any) -> tuple[CableSpec, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("cable_table must be a non-empty list")
    try:
        return tuple(CableSpec.from_dict(entry) for entry in raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad cable_table entry: {exc}") from exc


def _parse_rig(raw: Mapping[str, Any]) -> RigConfig:
    unknown = set(raw) - _RIG_KEYS
    if unknown:
        raise ConfigError(f"unknown rig keys: {sorted(unknown)}")
    required = {"load_r", "load_l", "cap_c", "cable_r"}
    missing = required - set(raw)
    if missing:
        raise ConfigError(f"rig section missing keys: {sorted(missing)}")
    return RigConfig(**raw)


def parse_config(data: Mapping[str, Any]) -> LabConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    table = (
        _parse_cable_table(data["cable_table"])
        if "cable_table" in data
        else DEFAULT_CABLE_TABLE
    )

    if "rig" in data:
        rig = _parse_rig(data["rig"])
    elif "registration" in data:
        rig = rig_for_registration(
            int(data["registration"]),
            target_pf=float(data.get("target_pf", 0.99)),
            length_m=float(data.get("cable_length_m", 20.0)),
            table=table,
        )
    else:
        rig = rig_for_registration(
            0,
            target_pf=float(data.get("target_pf", 0.99)),
            length_m=float(data.get("cable_length_m", 20.0)),
            table=table,
        )

    session = data.get("session", {})
    unknown = set(session) - _SESSION_KEYS
    if unknown:
        raise ConfigError(f"unknown session keys: {sorted(unknown)}")

    config = LabConfig(
        rig=rig,
        cable_table=table,
        observer_mode=bool(session.get("observer_mode", False)),
        grace=float(session.get("grace", 30.0)),
        bind=str(data.get("bind", DEFAULT_BIND)),
        admin_key=data.get("admin_key"),
        log_path=str(data.get("log_path", DEFAULT_LOG_PATH)),
        slots_path=str(session.get("slots_path", DEFAULT_SLOTS_PATH)),
        settle_delay=float(data.get("settle_delay", 0.5)),
    )
    return _apply_env(config)


def _apply_env(config: LabConfig) -> LabConfig:
    bind = os.environ.get("PFLAB_BIND")
    admin = os.environ.get("PFLAB_ADMIN_KEY")
    if bind:
        config = replace(config, bind=bind)
    if admin:
        config = replace(config, admin_key=admin)
    return config


def load_config(path: str | Path) -> LabConfig:
    """Read and validate a lab.json. Missing file is an error; an empty
    JSON object is a valid all-defaults deployment."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {p} is not valid JSON: {exc}") from exc
    return parse_config(data)
