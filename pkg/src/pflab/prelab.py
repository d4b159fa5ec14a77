"""Hand-calculation layer: pump personalization, R-L identification,
cable selection, capacitor sizing, and before/after loss comparison.

Everything here is closed-form and deterministic. Cross-checks against
the phasor solver live in the tests, not in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .circuit import RigConfig, loss_comparison
from .errors import LabError, RangeError

# Sized cable must carry at least this multiple of the computed current.
AMPACITY_MARGIN = 1.25

DEFAULT_PF = 0.87
DEFAULT_VOLTAGE = 230.0
DEFAULT_FREQUENCY = 50.0
DEFAULT_CABLE_LENGTH_M = 20.0
KW_PER_STEP = 7.5


class NoAdequateCable(LabError):
    """No table entry satisfies the ampacity margin for the load."""

    code = "no_cable"


@dataclass(frozen=True)
class PumpSpec:
    """Nameplate values for one student's pump assignment."""

    p_kw: float
    pf: float
    v_rms: float
    multiplier: int

    @property
    def p_watts(self) -> float:
        return self.p_kw * 1e3

    @property
    def i_rms(self) -> float:
        # P = V * I * pf, single phase
        return self.p_watts / (self.v_rms * self.pf)

    def to_dict(self) -> dict[str, Any]:
        return {
            "p_kw": self.p_kw,
            "pf": self.pf,
            "v_rms": self.v_rms,
            "multiplier": self.multiplier,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PumpSpec":
        return cls(
            p_kw=float(data["p_kw"]),
            pf=float(data["pf"]),
            v_rms=float(data["v_rms"]),
            multiplier=int(data["multiplier"]),
        )


@dataclass(frozen=True)
class SeriesRL:
    """Equivalent series resistance and inductance of the motor load."""

    r_ohms: float
    l_henries: float

    def to_dict(self) -> dict[str, float]:
        return {"r_ohms": self.r_ohms, "l_henries": self.l_henries}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SeriesRL":
        return cls(r_ohms=float(data["r_ohms"]), l_henries=float(data["l_henries"]))


@dataclass(frozen=True)
class CableSpec:
    """One catalogue row: conductor size, resistance per km, ampacity."""

    label: str
    cross_section_mm2: float
    r_per_km: float
    ampacity: float

    def resistance(self, length_m: float) -> float:
        if length_m < 0:
            raise RangeError("cable length must be non-negative")
        return self.r_per_km * length_m / 1000.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "cross_section_mm2": self.cross_section_mm2,
            "r_per_km": self.r_per_km,
            "ampacity": self.ampacity,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CableSpec":
        return cls(
            label=str(data["label"]),
            cross_section_mm2=float(data["cross_section_mm2"]),
            r_per_km=float(data["r_per_km"]),
            ampacity=float(data["ampacity"]),
        )


# Copper singles, DC resistance at 20 C. Swap in a site-specific catalogue
# through the service config if these do not match local stock.
DEFAULT_CABLE_TABLE: tuple[CableSpec, ...] = (
    CableSpec("Cu 2.5 mm2", 2.5, 7.41, 24.0),
    CableSpec("Cu 6 mm2", 6.0, 3.08, 41.0),
    CableSpec("Cu 10 mm2", 10.0, 1.83, 57.0),
    CableSpec("Cu 16 mm2", 16.0, 1.15, 76.0),
    CableSpec("Cu 25 mm2", 25.0, 0.727, 106.0),
    CableSpec("Cu 35 mm2", 35.0, 0.524, 145.0),
)


@dataclass(frozen=True)
class CableSelection:
    cable: CableSpec
    length_m: float
    load_current: float
    required_ampacity: float

    @property
    def resistance(self) -> float:
        return self.cable.resistance(self.length_m)

    def to_dict(self) -> dict[str, Any]:
        return {
            "cable": self.cable.to_dict(),
            "length_m": self.length_m,
            "load_current": self.load_current,
            "required_ampacity": self.required_ampacity,
            "resistance": self.resistance,
        }


@dataclass(frozen=True)
class CorrectionResult:
    """Capacitor sizing outcome for one target power factor."""

    target_pf: float
    q_var: float
    capacitance: float

    def to_dict(self) -> dict[str, float]:
        return {
            "target_pf": self.target_pf,
            "q_var": self.q_var,
            "capacitance": self.capacitance,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CorrectionResult":
        return cls(
            target_pf=float(data["target_pf"]),
            q_var=float(data["q_var"]),
            capacitance=float(data["capacitance"]),
        )


@dataclass(frozen=True)
class LossFigures:
    """Cable dissipation and voltage drop, before vs after correction."""

    loss_before: float
    loss_after: float
    vdrop_before: float
    vdrop_after: float
    i_before: float
    i_after: float

    @property
    def loss_ratio(self) -> float:
        return self.loss_after / self.loss_before

    @property
    def loss_saved(self) -> float:
        return self.loss_before - self.loss_after

    def to_dict(self) -> dict[str, float]:
        return {
            "loss_before": self.loss_before,
            "loss_after": self.loss_after,
            "loss_ratio": self.loss_ratio,
            "vdrop_before": self.vdrop_before,
            "vdrop_after": self.vdrop_after,
            "i_before": self.i_before,
            "i_after": self.i_after,
        }


def personalize(
    registration: int,
    pf: float = DEFAULT_PF,
    v_rms: float = DEFAULT_VOLTAGE,
) -> PumpSpec:
    """Derive a student's pump rating from their registration number.

    The last digit spreads students over three ratings so neighbouring
    numbers get different loads.
    """
    if registration < 0:
        raise RangeError("registration number must be non-negative")
    if not 0 < pf <= 1:
        raise RangeError("rated power factor must be in (0, 1]")
    if v_rms <= 0:
        raise RangeError("supply voltage must be positive")
    multiplier = registration % 3 + 1
    return PumpSpec(p_kw=KW_PER_STEP * multiplier, pf=pf, v_rms=v_rms, multiplier=multiplier)


def identify_rl(spec: PumpSpec, frequency: float = DEFAULT_FREQUENCY) -> SeriesRL:
    """Back out the series R-L that draws the nameplate P at the
    nameplate power factor when fed the nameplate voltage."""
    if frequency <= 0:
        raise RangeError("frequency must be positive")
    if spec.p_watts <= 0:
        raise RangeError("pump power must be positive")
    i = spec.i_rms
    z_mag = spec.v_rms / i
    phi = math.acos(spec.pf)
    r = z_mag * math.cos(phi)
    x = z_mag * math.sin(phi)
    return SeriesRL(r_ohms=r, l_henries=x / (2 * math.pi * frequency))


def select_cable(
    current: float,
    table: Sequence[CableSpec] = DEFAULT_CABLE_TABLE,
    length_m: float = DEFAULT_CABLE_LENGTH_M,
    margin: float = AMPACITY_MARGIN,
) -> CableSelection:
    """Pick the smallest cable whose ampacity covers ``margin * current``.

    Raises NoAdequateCable when even the largest entry falls short.
    """
    if current < 0:
        raise RangeError("load current must be non-negative")
    if margin < 1:
        raise RangeError("ampacity margin must be at least 1")
    required = current * margin
    candidates = sorted(table, key=lambda c: c.ampacity)
    for cable in candidates:
        if cable.ampacity >= required:
            return CableSelection(
                cable=cable,
                length_m=length_m,
                load_current=current,
                required_ampacity=required,
            )
    raise NoAdequateCable(
        f"no cable in table carries {required:.1f} A "
        f"(load {current:.1f} A with {margin:g}x margin)"
    )


def size_capacitor(
    spec: PumpSpec,
    target_pf: float,
    frequency: float = DEFAULT_FREQUENCY,
) -> CorrectionResult:
    """Shunt capacitance that lifts the displacement power factor of the
    pump from its rated value to ``target_pf`` at the given frequency.

    Q = P * (tan(phi1) - tan(phi2)), C = Q / (2 pi f V^2).
    """
    if not spec.pf < target_pf <= 1:
        raise RangeError(
            f"target power factor must be in ({spec.pf:g}, 1], got {target_pf:g}"
        )
    if frequency <= 0:
        raise RangeError("frequency must be positive")
    phi1 = math.acos(spec.pf)
    phi2 = math.acos(target_pf)
    q = spec.p_watts * (math.tan(phi1) - math.tan(phi2))
    c = q / (2 * math.pi * frequency * spec.v_rms**2)
    return CorrectionResult(target_pf=target_pf, q_var=q, capacitance=c)


def compare_losses(
    spec: PumpSpec,
    selection: CableSelection,
    capacitance: float,
    frequency: float = DEFAULT_FREQUENCY,
) -> LossFigures:
    """Cable loss and voltage drop with and without the correction
    capacitor, solved on the full source-cable-load circuit."""
    rl = identify_rl(spec, frequency)
    config = RigConfig(
        load_r=rl.r_ohms,
        load_l=rl.l_henries,
        cap_c=capacitance,
        cable_r=selection.resistance,
        source_vrms=spec.v_rms,
        frequency=frequency,
    )
    pair = loss_comparison(config)
    return LossFigures(
        loss_before=pair.without.p_cable_loss,
        loss_after=pair.with_cap.p_cable_loss,
        vdrop_before=pair.without.v_drop_cable,
        vdrop_after=pair.with_cap.v_drop_cable,
        i_before=pair.without.i_source.magnitude,
        i_after=pair.with_cap.i_source.magnitude,
    )
