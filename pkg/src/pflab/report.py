"""Pre-lab worksheet rendering.

One registration number in, the full sizing story out: pump ratings,
R-L equivalent, feeder cable pick, correction capacitor, and the
loss comparison. The same report renders three ways: delimited
``key: value`` text for terminals and scripts, a JSON document for
tooling, and a set of figures for the write-up.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .prelab import (
    DEFAULT_CABLE_TABLE,
    CableSelection,
    CableSpec,
    CorrectionResult,
    LossFigures,
    PumpSpec,
    SeriesRL,
    compare_losses,
    identify_rl,
    personalize,
    select_cable,
    size_capacitor,
)

FIGURE_NAMES = ("power_triangle.png", "waveforms.png", "line_loss.png")


@dataclass(frozen=True)
class PrelabReport:
    registration: int
    frequency: float
    spec: PumpSpec
    rl: SeriesRL
    selection: CableSelection
    correction: CorrectionResult
    losses: LossFigures

    def rows(self) -> list[tuple[str, str]]:
        """Ordered report lines; keys are stable, values human-scaled."""
        spec, sel, cor, loss = self.spec, self.selection, self.correction, self.losses
        return [
            ("registration", str(self.registration)),
            ("pump_power_kw", f"{spec.p_kw:g}"),
            ("rated_pf", f"{spec.pf:g}"),
            ("supply_v_rms", f"{spec.v_rms:g}"),
            ("supply_frequency_hz", f"{self.frequency:g}"),
            ("load_current_a", f"{spec.i_rms:.2f}"),
            ("load_r_ohms", f"{self.rl.r_ohms:.4f}"),
            ("load_l_mh", f"{self.rl.l_henries * 1e3:.3f}"),
            ("cable", sel.cable.label),
            ("cable_length_m", f"{sel.length_m:g}"),
            ("cable_ampacity_a", f"{sel.cable.ampacity:g}"),
            ("required_ampacity_a", f"{sel.required_ampacity:.2f}"),
            ("cable_r_ohms", f"{sel.resistance:.4f}"),
            ("target_pf", f"{cor.target_pf:g}"),
            ("reactive_power_var", f"{cor.q_var:.1f}"),
            ("capacitance_uf", f"{cor.capacitance * 1e6:.2f}"),
            ("line_current_before_a", f"{loss.i_before:.2f}"),
            ("line_current_after_a", f"{loss.i_after:.2f}"),
            ("cable_loss_before_w", f"{loss.loss_before:.1f}"),
            ("cable_loss_after_w", f"{loss.loss_after:.1f}"),
            ("cable_loss_saved_w", f"{loss.loss_saved:.1f}"),
            ("loss_ratio", f"{loss.loss_ratio:.4f}"),
            ("v_drop_before_v", f"{loss.vdrop_before:.2f}"),
            ("v_drop_after_v", f"{loss.vdrop_after:.2f}"),
        ]

    def to_text(self) -> str:
        return "\n".join(f"{key}: {value}" for key, value in self.rows()) + "\n"

    def to_dict(self) -> dict[str, Any]:
        return {
            "registration": self.registration,
            "frequency": self.frequency,
            "pump": self.spec.to_dict(),
            "load": self.rl.to_dict(),
            "cable": self.selection.to_dict(),
            "correction": self.correction.to_dict(),
            "losses": self.losses.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def build_report(
    registration: int,
    target_pf: float = 0.99,
    length_m: float = 20.0,
    frequency: float = 50.0,
    table: Sequence[CableSpec] = DEFAULT_CABLE_TABLE,
) -> PrelabReport:
    spec = personalize(registration)
    rl = identify_rl(spec, frequency)
    selection = select_cable(spec.i_rms, table=table, length_m=length_m)
    correction = size_capacitor(spec, target_pf, frequency)
    losses = compare_losses(spec, selection, correction.capacitance, frequency)
    return PrelabReport(
        registration=registration,
        frequency=frequency,
        spec=spec,
        rl=rl,
        selection=selection,
        correction=correction,
        losses=losses,
    )


def render_figures(report: PrelabReport, out_dir: str | Path) -> list[Path]:
    """Write the worksheet figures as PNG files and return their paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    spec, cor, loss = report.spec, report.correction, report.losses
    p = spec.p_watts
    phi1 = math.acos(spec.pf)
    phi2 = math.acos(cor.target_pf)
    q1 = p * math.tan(phi1)
    q2 = p * math.tan(phi2)

    # power triangle before and after the capacitor
    fig, ax = plt.subplots(figsize=(6, 4.5))
    kw = dict(length_includes_head=True, width=18, head_width=160, head_length=220)
    ax.arrow(0, 0, p, 0, color="0.3", **kw)
    ax.arrow(p, 0, 0, q1, color="tab:red", **kw)
    ax.arrow(0, 0, p, q1, color="tab:red", alpha=0.6, **kw)
    ax.arrow(p, 0, 0, q2, color="tab:green", **kw)
    ax.arrow(0, 0, p, q2, color="tab:green", alpha=0.6, **kw)
    ax.annotate(f"P = {p / 1e3:.1f} kW", (p / 2, -0.06 * q1), ha="center")
    ax.annotate(f"Q = {q1 / 1e3:.2f} kvar", (p * 1.02, q1 * 0.95))
    ax.annotate(
        f"Q' = {q2 / 1e3:.2f} kvar ({cor.capacitance * 1e6:.0f} uF)",
        (p * 1.02, q2 * 1.1),
        color="tab:green",
    )
    ax.set_xlim(-0.05 * p, 1.35 * p)
    ax.set_ylim(-0.15 * q1, 1.2 * q1)
    ax.set_xlabel("active power (W)")
    ax.set_ylabel("reactive power (var)")
    ax.set_title("Correction shrinks the reactive leg")
    fig.tight_layout()
    path = out / "power_triangle.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)

    # source waveforms: the current catches up with the voltage
    t = np.linspace(0, 2 / report.frequency, 600)
    w = 2 * math.pi * report.frequency
    v = spec.v_rms * math.sqrt(2) * np.sin(w * t)
    i1 = loss.i_before * math.sqrt(2) * np.sin(w * t - phi1)
    i2 = loss.i_after * math.sqrt(2) * np.sin(w * t - phi2)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t * 1e3, v, color="0.4", label="supply voltage (V)")
    ax2 = ax.twinx()
    ax2.plot(t * 1e3, i1, color="tab:red", label="current, capacitor out (A)")
    ax2.plot(t * 1e3, i2, color="tab:green", label="current, capacitor in (A)")
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("voltage (V)")
    ax2.set_ylabel("current (A)")
    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], loc="upper right", fontsize=8)
    ax.set_title("Line current before and after correction")
    fig.tight_layout()
    path = out / "waveforms.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)

    # cable dissipation drops with the square of the current
    fig, ax = plt.subplots(figsize=(5, 4))
    bars = ax.bar(
        ["capacitor out", "capacitor in"],
        [loss.loss_before, loss.loss_after],
        color=["tab:red", "tab:green"],
        width=0.55,
    )
    ax.bar_label(bars, fmt="%.1f W")
    ax.set_ylabel("cable loss (W)")
    ax.set_title(f"Loss ratio {loss.loss_ratio:.3f}")
    fig.tight_layout()
    path = out / "line_loss.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)

    return paths
