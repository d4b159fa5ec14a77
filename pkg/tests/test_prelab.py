"""Hand-calculation layer tests.

Expected numbers are frozen from the closed-form relations
(P = V.I.pf, Q = P(tan phi1 - tan phi2), C = Q / (2 pi f V^2)) and
cross-checked through the phasor solver where that adds information.
"""

import math
import random

import pytest

from pflab.circuit import RigConfig, RigState, solve_steady_state
from pflab.errors import RangeError
from pflab.prelab import (
    AMPACITY_MARGIN,
    DEFAULT_CABLE_TABLE,
    CableSpec,
    CorrectionResult,
    NoAdequateCable,
    PumpSpec,
    SeriesRL,
    compare_losses,
    identify_rl,
    personalize,
    select_cable,
    size_capacitor,
)

Z1_I = 37.481259370314845
Z1_R = 5.338667999999999
Z1_L = 9.630664815485199e-3
Z2_R = 2.6693339999999997
Z2_L = 4.8153324077425995e-3
Z3_I = 112.44377811094454
Z3_R = 1.779556
Z3_L = 3.210221605161733e-3

Q_99 = 3181.7537546804274
C_99 = 1.914524906459689e-4
Q_UNITY = 4250.445874352086
C_UNITY = 2.557578341201087e-4

LOSS_RATIO = 0.7722681359044995  # (0.87 / 0.99) ** 2


def spec_for(multiplier: int) -> PumpSpec:
    # registration == multiplier - 1 lands on that multiplier
    return personalize(multiplier - 1)


class TestPersonalize:
    def test_multiplier_cycles_over_three_steps(self):
        mults = [personalize(reg).multiplier for reg in range(9)]
        assert mults == [1, 2, 3, 1, 2, 3, 1, 2, 3]

    def test_power_steps_by_seven_and_a_half_kw(self):
        assert personalize(0).p_kw == 7.5
        assert personalize(1).p_kw == 15.0
        assert personalize(2).p_kw == 22.5

    def test_defaults(self):
        spec = personalize(123456)
        assert spec.pf == 0.87
        assert spec.v_rms == 230.0

    def test_rated_current_z1(self):
        assert spec_for(1).i_rms == pytest.approx(Z1_I, rel=1e-12)

    def test_rated_current_z3(self):
        assert spec_for(3).i_rms == pytest.approx(Z3_I, rel=1e-12)

    def test_negative_registration_rejected(self):
        with pytest.raises(RangeError):
            personalize(-1)

    @pytest.mark.parametrize("pf", [0.0, -0.5, 1.01])
    def test_bad_power_factor_rejected(self, pf):
        with pytest.raises(RangeError):
            personalize(0, pf=pf)

    def test_bad_voltage_rejected(self):
        with pytest.raises(RangeError):
            personalize(0, v_rms=0.0)


class TestIdentifyRL:
    def test_z1_values(self):
        rl = identify_rl(spec_for(1))
        assert rl.r_ohms == pytest.approx(Z1_R, rel=1e-12)
        assert rl.l_henries == pytest.approx(Z1_L, rel=1e-12)

    def test_z2_and_z3_scale_inversely_with_power(self):
        rl2 = identify_rl(spec_for(2))
        rl3 = identify_rl(spec_for(3))
        assert rl2.r_ohms == pytest.approx(Z2_R, rel=1e-12)
        assert rl2.l_henries == pytest.approx(Z2_L, rel=1e-12)
        assert rl3.r_ohms == pytest.approx(Z3_R, rel=1e-12)
        assert rl3.l_henries == pytest.approx(Z3_L, rel=1e-12)
        assert rl2.r_ohms == pytest.approx(Z1_R / 2, rel=1e-12)
        assert rl3.l_henries == pytest.approx(Z1_L / 3, rel=1e-12)

    @pytest.mark.parametrize("multiplier", [1, 2, 3])
    def test_solver_reproduces_nameplate(self, multiplier):
        spec = spec_for(multiplier)
        rl = identify_rl(spec)
        config = RigConfig(
            load_r=rl.r_ohms, load_l=rl.l_henries, cap_c=0.0, cable_r=0.0
        )
        sol = solve_steady_state(config, RigState())
        assert sol.p_load == pytest.approx(spec.p_watts, rel=1e-9)
        assert sol.power_factor == pytest.approx(spec.pf, abs=1e-12)
        assert sol.pf_sign == "lagging"

    def test_unity_pf_collapses_to_resistance(self):
        spec = PumpSpec(p_kw=7.5, pf=1.0, v_rms=230.0, multiplier=1)
        rl = identify_rl(spec)
        assert rl.l_henries == pytest.approx(0.0, abs=1e-12)
        assert rl.r_ohms == pytest.approx(230.0**2 / 7500.0, rel=1e-12)

    def test_bad_frequency_rejected(self):
        with pytest.raises(RangeError):
            identify_rl(spec_for(1), frequency=0.0)


class TestSelectCable:
    def test_z1_takes_ten_mm2(self):
        sel = select_cable(Z1_I)
        assert sel.cable.cross_section_mm2 == 10.0
        assert sel.required_ampacity == pytest.approx(Z1_I * AMPACITY_MARGIN)

    def test_z2_takes_twenty_five_mm2(self):
        assert select_cable(spec_for(2).i_rms).cable.cross_section_mm2 == 25.0

    def test_z3_takes_thirty_five_mm2(self):
        assert select_cable(Z3_I).cable.cross_section_mm2 == 35.0

    def test_default_length_resistance(self):
        sel = select_cable(Z1_I)
        assert sel.resistance == pytest.approx(1.83 * 20.0 / 1000.0, rel=1e-12)

    def test_margin_is_honoured_at_the_boundary(self):
        # 57 A / 1.25 = 45.6 A fits 10 mm2 exactly; a hair more does not
        assert select_cable(45.6).cable.cross_section_mm2 == 10.0
        assert select_cable(45.6 + 1e-6).cable.cross_section_mm2 == 16.0

    def test_selection_is_monotone_in_current(self):
        sizes = [
            select_cable(i).cable.cross_section_mm2 for i in (1, 20, 40, 60, 90, 115)
        ]
        assert sizes == sorted(sizes)

    def test_table_order_does_not_matter(self):
        shuffled = list(DEFAULT_CABLE_TABLE)
        random.Random(7).shuffle(shuffled)
        assert (
            select_cable(Z1_I, table=shuffled).cable
            == select_cable(Z1_I).cable
        )

    def test_oversized_load_raises(self):
        with pytest.raises(NoAdequateCable):
            select_cable(200.0)

    def test_zero_current_gets_smallest_cable(self):
        assert select_cable(0.0).cable.cross_section_mm2 == 2.5

    def test_negative_current_rejected(self):
        with pytest.raises(RangeError):
            select_cable(-1.0)

    def test_sub_unity_margin_rejected(self):
        with pytest.raises(RangeError):
            select_cable(10.0, margin=0.9)


class TestSizeCapacitor:
    def test_point_ninety_nine_target(self):
        result = size_capacitor(spec_for(1), 0.99)
        assert result.q_var == pytest.approx(Q_99, rel=1e-12)
        assert result.capacitance == pytest.approx(C_99, rel=1e-12)

    def test_unity_target(self):
        result = size_capacitor(spec_for(1), 1.0)
        assert result.q_var == pytest.approx(Q_UNITY, rel=1e-12)
        assert result.capacitance == pytest.approx(C_UNITY, rel=1e-12)

    @pytest.mark.parametrize("target,tol", [(0.99, 1e-6), (1.0, 1e-9)])
    def test_solver_confirms_corrected_pf(self, target, tol):
        spec = spec_for(1)
        rl = identify_rl(spec)
        sized = size_capacitor(spec, target)
        config = RigConfig(
            load_r=rl.r_ohms,
            load_l=rl.l_henries,
            cap_c=sized.capacitance,
            cable_r=0.0,
        )
        sol = solve_steady_state(config, RigState(capacitor_engaged=True))
        assert sol.power_factor == pytest.approx(target, abs=tol)

    def test_capacitance_grows_with_target(self):
        spec = spec_for(1)
        caps = [size_capacitor(spec, t).capacitance for t in (0.9, 0.95, 0.99, 1.0)]
        assert caps == sorted(caps)
        assert all(c > 0 for c in caps)

    def test_reactive_demand_scales_with_power(self):
        small = size_capacitor(spec_for(1), 0.99)
        big = size_capacitor(spec_for(2), 0.99)
        assert big.q_var == pytest.approx(2 * small.q_var, rel=1e-12)
        assert big.capacitance == pytest.approx(2 * small.capacitance, rel=1e-12)

    @pytest.mark.parametrize("target", [0.87, 0.5, 1.001, 0.0])
    def test_unreachable_targets_rejected(self, target):
        with pytest.raises(RangeError):
            size_capacitor(spec_for(1), target)


class TestCompareLosses:
    def setup_method(self):
        self.spec = spec_for(1)
        self.selection = select_cable(self.spec.i_rms)

    def test_loss_ratio_matches_pf_square_law(self):
        figures = compare_losses(self.spec, self.selection, C_99)
        assert figures.loss_ratio == pytest.approx(LOSS_RATIO, abs=1e-4)

    def test_current_ratio_matches_pf_ratio(self):
        figures = compare_losses(self.spec, self.selection, C_99)
        assert figures.i_after / figures.i_before == pytest.approx(
            0.87 / 0.99, abs=1e-3
        )

    def test_correction_reduces_drop_and_loss(self):
        figures = compare_losses(self.spec, self.selection, C_99)
        assert figures.loss_after < figures.loss_before
        assert figures.vdrop_after < figures.vdrop_before
        assert figures.loss_saved > 0

    def test_zero_capacitance_changes_nothing(self):
        figures = compare_losses(self.spec, self.selection, 0.0)
        assert figures.loss_after == figures.loss_before
        assert figures.vdrop_after == figures.vdrop_before

    def test_loss_tracks_cable_length(self):
        cable = self.selection.cable
        halved = select_cable(self.spec.i_rms, length_m=10.0)
        assert halved.cable == cable
        full = compare_losses(self.spec, self.selection, C_99)
        half = compare_losses(self.spec, halved, C_99)
        assert full.loss_before == pytest.approx(2 * half.loss_before, rel=0.011)
        assert full.vdrop_before == pytest.approx(2 * half.vdrop_before, rel=0.011)


class TestSerialization:
    def test_pump_spec_round_trip(self):
        spec = spec_for(2)
        assert PumpSpec.from_dict(spec.to_dict()) == spec

    def test_series_rl_round_trip(self):
        rl = identify_rl(spec_for(1))
        assert SeriesRL.from_dict(rl.to_dict()) == rl

    def test_cable_spec_round_trip(self):
        cable = DEFAULT_CABLE_TABLE[2]
        assert CableSpec.from_dict(cable.to_dict()) == cable

    def test_correction_result_round_trip(self):
        sized = size_capacitor(spec_for(1), 0.99)
        assert CorrectionResult.from_dict(sized.to_dict()) == sized

    def test_selection_dict_carries_resistance(self):
        sel = select_cable(Z1_I)
        data = sel.to_dict()
        assert data["resistance"] == pytest.approx(0.0366, rel=1e-12)
        assert data["cable"]["label"] == "Cu 10 mm2"

    def test_loss_figures_dict_has_ratio(self):
        figures = compare_losses(spec_for(1), select_cable(Z1_I), C_99)
        data = figures.to_dict()
        assert data["loss_ratio"] == pytest.approx(figures.loss_ratio)
        assert math.isfinite(data["vdrop_after"])
