"""Instrumentation path emulation.

Models the measurement electronics between the power circuit and the
readout: sensor gain stages, an offset-binary ADC, comparator squaring,
an XOR phase detector, and windowed RMS extraction. All functions are
pure; optional Gaussian noise is injected only when a generator and a
positive sigma are supplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from .circuit import RigConfig, RigState, WaveformWindow, synthesize_waveforms
from .errors import DegenerateSignalError, RangeError

# Readout window length. Four cycles keeps the duty-cycle average stable
# while still refreshing fast enough for a live display at mains frequency.
MEASUREMENT_CYCLES = 4

Channel = Literal["voltage", "current"]


@dataclass(frozen=True, eq=False)
class DigitizedWindow:
    """ADC codes for one capture window, both channels."""

    v_codes: np.ndarray
    i_codes: np.ndarray
    sample_rate: float
    lsb_volts: float
    midscale: int
    clipped: bool


@dataclass(frozen=True)
class XorPhase:
    duty: float
    phase_rad: float
    power_factor: float


@dataclass(frozen=True)
class MeasurementFrame:
    """One readout sample: what the panel meters show."""

    vrms: float
    irms: float
    power_factor: float
    capacitor_engaged: bool
    timestamp: float
    window_cycles: int
    phase_rad: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "vrms": self.vrms,
            "irms": self.irms,
            "power_factor": self.power_factor,
            "capacitor_engaged": self.capacitor_engaged,
            "timestamp": self.timestamp,
            "window_cycles": self.window_cycles,
            "phase_rad": self.phase_rad,
        }


def _quantize(
    samples: np.ndarray,
    gain: float,
    config: RigConfig,
    noise_sigma: float,
    rng: np.random.Generator | None,
) -> tuple[np.ndarray, bool]:
    scaled = gain * samples
    if noise_sigma > 0.0:
        if rng is None:
            rng = np.random.default_rng()
        scaled = scaled + rng.normal(0.0, noise_sigma, size=scaled.shape)
    span = config.adc_fullscale
    lsb = span / 2**config.adc_bits
    raw = np.rint((scaled + span / 2.0) / lsb)
    max_code = 2**config.adc_bits - 1
    codes = np.clip(raw, 0, max_code)
    return codes.astype(np.int64), bool(np.any(raw != codes))


def digitize(
    window: WaveformWindow,
    config: RigConfig,
    noise_sigma: float = 0.0,
    rng: np.random.Generator | None = None,
) -> DigitizedWindow:
    """Run both channels through gain, optional noise, and the ADC.

    The ADC is offset-binary: zero input sits at mid-scale, as if the
    signal were AC-coupled onto a half-rail bias. Out-of-span samples
    saturate at the rails and set the clipped flag instead of raising.
    """
    if noise_sigma < 0.0:
        raise RangeError("noise sigma must be non-negative")
    v_codes, v_clip = _quantize(window.v_samples, config.v_sensor_gain, config, noise_sigma, rng)
    i_codes, i_clip = _quantize(window.i_samples, config.i_sensor_gain, config, noise_sigma, rng)
    return DigitizedWindow(
        v_codes=v_codes,
        i_codes=i_codes,
        sample_rate=window.sample_rate,
        lsb_volts=config.adc_fullscale / 2**config.adc_bits,
        midscale=2 ** (config.adc_bits - 1),
        clipped=v_clip or i_clip,
    )


def _crossings(codes: np.ndarray, midscale: int, name: str) -> tuple[bool, np.ndarray]:
    """Initial comparator state and the times it toggles, in sample units.

    The physical comparator switches the instant the analog input passes
    the mid-scale reference; the codes only sample that input. Linear
    interpolation between the two samples bracketing each sign change
    recovers the switch time with sub-sample resolution, the same
    information a hardware timer capturing the comparator edge would see.
    """
    x = (codes - midscale).astype(np.float64)
    high = x > 0.0
    flips = np.nonzero(high[1:] != high[:-1])[0]
    if flips.size == 0:
        raise DegenerateSignalError(f"{name} channel never crosses mid-scale")
    before = x[flips]
    after = x[flips + 1]
    return bool(high[0]), flips + before / (before - after)


def xor_phase(window: DigitizedWindow) -> XorPhase:
    """Phase measurement the way the comparator + XOR hardware does it.

    Each channel is squared against mid-scale, the two square waves feed
    an XOR whose high-time fraction maps linearly onto [0, pi]. Pulse
    widths are measured between interpolated comparator edges rather
    than by counting samples, so the duty resolution is set by the ADC,
    not the sample grid. The detector sees only the magnitude of the
    phase gap: leading and lagging current are indistinguishable here.
    """
    v_state, v_edges = _crossings(window.v_codes, window.midscale, "voltage")
    i_state, i_edges = _crossings(window.i_codes, window.midscale, "current")
    span = float(max(window.v_codes.size, window.i_codes.size))

    # Sweep both edge lists in time order, integrating XOR-high time.
    events = sorted(
        [(float(t), 0) for t in v_edges] + [(float(t), 1) for t in i_edges]
    )
    states = [v_state, i_state]
    high_time = 0.0
    cursor = 0.0
    for t, channel in events:
        if states[0] != states[1]:
            high_time += t - cursor
        cursor = t
        states[channel] = not states[channel]
    if states[0] != states[1]:
        high_time += span - cursor

    duty = high_time / span
    phase = duty * math.pi
    return XorPhase(duty=duty, phase_rad=phase, power_factor=math.cos(phase))


def windowed_rms(window: DigitizedWindow, channel: Channel, config: RigConfig) -> float:
    """RMS of one channel reconstructed from its ADC codes."""
    if channel == "voltage":
        codes, gain = window.v_codes, config.v_sensor_gain
    elif channel == "current":
        codes, gain = window.i_codes, config.i_sensor_gain
    else:
        raise RangeError(f"unknown channel {channel!r}")
    if codes.size == 0:
        raise RangeError("empty window")
    x = (codes - window.midscale) * window.lsb_volts / gain
    return float(np.sqrt(np.mean(x * x)))


def measure(
    config: RigConfig,
    state: RigState,
    cycles: int = MEASUREMENT_CYCLES,
    noise_sigma: float = 0.0,
    rng: np.random.Generator | None = None,
    timestamp: float | None = None,
) -> MeasurementFrame:
    """Full chain: synthesize, digitize, and reduce to panel readouts."""
    window = synthesize_waveforms(config, state, cycles)
    digitized = digitize(window, config, noise_sigma=noise_sigma, rng=rng)
    vrms = windowed_rms(digitized, "voltage", config)
    irms = windowed_rms(digitized, "current", config)
    detected = xor_phase(digitized)
    # The detector can report a hair past 90 degrees from edge jitter;
    # the panel never shows a negative power factor.
    pf = min(max(detected.power_factor, 0.0), 1.0)
    return MeasurementFrame(
        vrms=vrms,
        irms=irms,
        power_factor=pf,
        capacitor_engaged=state.capacitor_engaged,
        timestamp=state.sim_time if timestamp is None else timestamp,
        window_cycles=cycles,
        phase_rad=detected.phase_rad,
    )
