"""Shared helpers for waveform inspection in tests."""

import numpy as np


def first_upcrossing(samples: np.ndarray) -> int:
    """Index of the first negative-to-nonnegative transition."""
    for k in range(1, len(samples)):
        if samples[k - 1] < 0 <= samples[k]:
            return k
    raise AssertionError("no zero crossing found")


def crossing_lag_deg(w, cfg) -> float:
    """Phase lag of i behind v, from up-crossing offsets, folded to [-180, 180)."""
    per_cycle = round(cfg.sample_rate / cfg.frequency)
    lag = (first_upcrossing(w.i_samples) - first_upcrossing(w.v_samples)) % per_cycle
    deg = lag * 360.0 / per_cycle
    return deg - 360.0 if deg >= 180.0 else deg
