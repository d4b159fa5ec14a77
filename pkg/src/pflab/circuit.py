"""Steady-state solver and waveform synthesizer for the rig circuit.

Topology: sinusoidal source (scaled by the variac) behind a series cable
impedance, feeding a series R-L load in parallel with a relay-switched shunt
capacitor.  Everything is phasor arithmetic at a single frequency; RMS
convention throughout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, RangeError

TAU = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    """Fold an angle in radians into (-pi, pi]."""
    a = math.remainder(angle, TAU)
    if a <= -math.pi:
        a += TAU
    return a


@dataclass(frozen=True)
class Phasor:
    """RMS magnitude and phase angle of a sinusoidal quantity."""

    magnitude: float
    angle: float

    def __post_init__(self):
        if self.magnitude < 0:
            # keep magnitude non-negative, flip the angle instead
            object.__setattr__(self, "magnitude", -self.magnitude)
            object.__setattr__(self, "angle", self.angle + math.pi)
        object.__setattr__(self, "angle", normalize_angle(self.angle))

    @classmethod
    def from_complex(cls, z: complex) -> "Phasor":
        return cls(abs(z), cmath.phase(z))

    def to_complex(self) -> complex:
        return cmath.rect(self.magnitude, self.angle)


@dataclass(frozen=True)
class RigConfig:
    """Electrical parameters of source, cable, load, capacitor and sampling.

    Sensor gains default to placing the rated load peaks at 80% of the ADC
    span; pass explicit values to override.
    """

    load_r: float
    load_l: float
    cap_c: float
    cable_r: float
    source_vrms: float = 230.0
    frequency: float = 50.0
    cable_x: float = 0.0
    sample_rate: float = 10_000.0
    adc_bits: int = 10
    adc_fullscale: float = 5.0
    v_sensor_gain: float | None = None
    i_sensor_gain: float | None = None

    def __post_init__(self):
        if not all(
            math.isfinite(v)
            for v in (
                self.source_vrms, self.frequency, self.load_r, self.load_l,
                self.cap_c, self.cable_r, self.cable_x, self.sample_rate,
                self.adc_fullscale,
            )
        ):
            raise ConfigError("non-finite rig parameter")
        if self.source_vrms <= 0 or self.frequency <= 0 or self.load_r <= 0:
            raise ConfigError("source_vrms, frequency and load_r must be > 0")
        if self.load_l < 0 or self.cap_c < 0 or self.cable_r < 0 or self.cable_x < 0:
            raise ConfigError("load_l, cap_c, cable_r, cable_x must be >= 0")
        if self.adc_fullscale <= 0:
            raise ConfigError("adc_fullscale must be > 0")
        if self.sample_rate < 20.0 * self.frequency:
            # below this the XOR pulse-width quantization error exceeds
            # ~1.6% of a half-cycle
            raise ConfigError("sample_rate must be >= 20 x frequency")
        if not 8 <= self.adc_bits <= 16:
            raise ConfigError("adc_bits must be within [8, 16]")
        if self.v_sensor_gain is None:
            object.__setattr__(self, "v_sensor_gain", self._default_gain(self.source_vrms))
        if self.i_sensor_gain is None:
            object.__setattr__(self, "i_sensor_gain", self._default_gain(self.rated_current()))
        if self.v_sensor_gain <= 0 or self.i_sensor_gain <= 0:
            raise ConfigError("sensor gains must be > 0")

    def _default_gain(self, rated_rms: float) -> float:
        # rated peak lands at 80% of the half-span around mid-rail
        return 0.8 * (self.adc_fullscale / 2.0) / (math.sqrt(2.0) * rated_rms)

    def omega(self) -> float:
        return TAU * self.frequency

    def load_impedance(self) -> complex:
        return complex(self.load_r, self.omega() * self.load_l)

    def cable_impedance(self) -> complex:
        return complex(self.cable_r, self.cable_x)

    def rated_current(self) -> float:
        """Source current with capacitor off, fractions 1.0, zero cable."""
        return self.source_vrms / abs(self.load_impedance())

    def unity_pf_capacitance(self) -> float:
        """Shunt C that cancels the load branch susceptance (unity pf at the load bus)."""
        return -(1.0 / self.load_impedance()).imag / self.omega()


@dataclass
class RigState:
    """Mutable truth of the rig: relay, variac and load settings.

    Fractions above 1.0 clamp down; non-positive values are rejected
    outright (there is nothing sensible to clamp them to).
    """

    capacitor_engaged: bool = False
    variac_fraction: float = 1.0
    load_fraction: float = 1.0
    sim_time: float = 0.0

    def __post_init__(self):
        for name in ("variac_fraction", "load_fraction"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise RangeError(f"{name} must be in (0, 1]")
            if v > 1.0:
                setattr(self, name, 1.0)


@dataclass(frozen=True)
class CircuitSolution:
    """Phasor solution plus the derived power quantities."""

    v_load: Phasor
    i_source: Phasor
    i_load: Phasor
    i_cap: Phasor
    p_load: float
    q_load: float
    p_cable_loss: float
    v_drop_cable: float
    power_factor: float
    pf_sign: str  # "lagging" | "leading" | "unity"


@dataclass(frozen=True)
class WaveformWindow:
    """Sampled v(t), i(t) over an integer number of cycles."""

    t0: float
    sample_rate: float
    v_samples: np.ndarray
    i_samples: np.ndarray
    cycles: int

    def __post_init__(self):
        if len(self.v_samples) != len(self.i_samples):
            raise ConfigError("waveform channels must have equal length")
        if not (np.isfinite(self.v_samples).all() and np.isfinite(self.i_samples).all()):
            raise ConfigError("waveform samples must be finite")

    def __len__(self) -> int:
        return len(self.v_samples)


_PF_SIGN_EPS = 1e-9


def solve_steady_state(config: RigConfig, state: RigState) -> CircuitSolution:
    """Exact complex-arithmetic solution of the rig at its current state.

    load_fraction applies constant-impedance scaling (impedance divided by
    the fraction); the variac scales the source voltage only.
    """
    z_load = config.load_impedance() / state.load_fraction
    z_cable = config.cable_impedance()
    if not (cmath.isfinite(z_load) and cmath.isfinite(z_cable)):
        raise ConfigError("non-finite impedance")
    if abs(z_load) <= 0:
        raise ConfigError("degenerate load impedance")

    y_load = 1.0 / z_load
    y_cap = complex(0.0, config.omega() * config.cap_c) if state.capacitor_engaged else 0j
    y_par = y_load + y_cap
    if abs(y_par) <= 0 or not cmath.isfinite(y_par):
        raise ConfigError("degenerate parallel combination")

    v_src = complex(config.source_vrms * state.variac_fraction, 0.0)
    i_source = v_src / (z_cable + 1.0 / y_par)
    v_load = i_source / y_par
    i_load = v_load * y_load
    i_cap = v_load * y_cap

    s_load = v_load * i_load.conjugate()
    phase_gap = normalize_angle(cmath.phase(v_load) - cmath.phase(i_source))
    if phase_gap > _PF_SIGN_EPS:
        pf_sign = "lagging"
    elif phase_gap < -_PF_SIGN_EPS:
        pf_sign = "leading"
    else:
        pf_sign = "unity"

    return CircuitSolution(
        v_load=Phasor.from_complex(v_load),
        i_source=Phasor.from_complex(i_source),
        i_load=Phasor.from_complex(i_load),
        i_cap=Phasor.from_complex(i_cap),
        p_load=s_load.real,
        q_load=s_load.imag,
        p_cable_loss=abs(i_source) ** 2 * config.cable_r,
        v_drop_cable=abs(i_source * z_cable),
        power_factor=math.cos(phase_gap),
        pf_sign=pf_sign,
    )


MAX_SYNTH_CYCLES = 50


def synthesize_waveforms(config: RigConfig, state: RigState, cycles: int) -> WaveformWindow:
    """Sample the steady-state v, i sinusoids over `cycles` full cycles.

    Sample k sits at t0 + k/sample_rate with t0 = state.sim_time; amplitudes
    are sqrt(2) x the RMS phasor magnitudes from solve_steady_state.
    """
    if not isinstance(cycles, int) or not 1 <= cycles <= MAX_SYNTH_CYCLES:
        raise RangeError(f"cycles must be an integer in [1, {MAX_SYNTH_CYCLES}]")
    sol = solve_steady_state(config, state)
    n = round(cycles * config.sample_rate / config.frequency)
    t = state.sim_time + np.arange(n) / config.sample_rate
    w = config.omega()
    v = math.sqrt(2.0) * sol.v_load.magnitude * np.sin(w * t + sol.v_load.angle)
    i = math.sqrt(2.0) * sol.i_source.magnitude * np.sin(w * t + sol.i_source.angle)
    return WaveformWindow(
        t0=state.sim_time,
        sample_rate=config.sample_rate,
        v_samples=v,
        i_samples=i,
        cycles=cycles,
    )


@dataclass(frozen=True)
class LossComparison:
    without: CircuitSolution
    with_cap: CircuitSolution

    @property
    def loss_delta(self) -> float:
        return self.without.p_cable_loss - self.with_cap.p_cable_loss

    @property
    def vdrop_delta(self) -> float:
        return self.without.v_drop_cable - self.with_cap.v_drop_cable


def loss_comparison(config: RigConfig, load_fraction: float = 1.0) -> LossComparison:
    """Solve the rig with and without the capacitor at the same loading."""
    if config.cable_r <= 0:
        raise ConfigError("loss comparison needs cable_r > 0")
    without = solve_steady_state(config, RigState(capacitor_engaged=False, load_fraction=load_fraction))
    with_cap = solve_steady_state(config, RigState(capacitor_engaged=True, load_fraction=load_fraction))
    return LossComparison(without=without, with_cap=with_cap)
