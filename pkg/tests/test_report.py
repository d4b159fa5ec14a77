"""Worksheet report: delimited text, JSON twin, rendered figures."""

import json

import pytest

from pflab.report import FIGURE_NAMES, build_report, render_figures

C_99_UF = 191.4524906459689
LOSS_RATIO = 0.7722681359044995


@pytest.fixture(scope="module")
def report():
    return build_report(0)


class TestRows:
    def test_keys_are_stable(self, report):
        keys = [key for key, _ in report.rows()]
        assert keys == [
            "registration",
            "pump_power_kw",
            "rated_pf",
            "supply_v_rms",
            "supply_frequency_hz",
            "load_current_a",
            "load_r_ohms",
            "load_l_mh",
            "cable",
            "cable_length_m",
            "cable_ampacity_a",
            "required_ampacity_a",
            "cable_r_ohms",
            "target_pf",
            "reactive_power_var",
            "capacitance_uf",
            "line_current_before_a",
            "line_current_after_a",
            "cable_loss_before_w",
            "cable_loss_after_w",
            "cable_loss_saved_w",
            "loss_ratio",
            "v_drop_before_v",
            "v_drop_after_v",
        ]

    def test_text_lines_are_colon_delimited(self, report):
        lines = report.to_text().strip().splitlines()
        assert len(lines) == len(report.rows())
        parsed = dict(line.split(": ", 1) for line in lines)
        assert parsed["pump_power_kw"] == "7.5"
        assert parsed["cable"] == "Cu 10 mm2"
        assert float(parsed["capacitance_uf"]) == pytest.approx(C_99_UF, abs=0.01)
        assert float(parsed["loss_ratio"]) == pytest.approx(LOSS_RATIO, abs=1e-4)

    def test_registration_shifts_the_numbers(self):
        bigger = build_report(1)  # 15 kW pump
        parsed = dict(
            line.split(": ", 1) for line in bigger.to_text().strip().splitlines()
        )
        assert parsed["pump_power_kw"] == "15"
        assert parsed["cable"] == "Cu 25 mm2"


class TestJson:
    def test_document_round_trips(self, report):
        doc = json.loads(report.to_json())
        assert doc["pump"]["p_kw"] == 7.5
        assert doc["correction"]["capacitance"] == pytest.approx(C_99_UF * 1e-6)
        assert doc["losses"]["loss_before"] > doc["losses"]["loss_after"]
        assert doc["cable"]["cable"]["label"] == "Cu 10 mm2"

    def test_text_and_json_agree(self, report):
        doc = json.loads(report.to_json())
        parsed = dict(
            line.split(": ", 1) for line in report.to_text().strip().splitlines()
        )
        assert float(parsed["cable_r_ohms"]) == pytest.approx(
            doc["cable"]["resistance"], abs=5e-5
        )
        assert float(parsed["reactive_power_var"]) == pytest.approx(
            doc["correction"]["q_var"], abs=0.05
        )


class TestFigures:
    def test_figures_render_to_files(self, report, tmp_path):
        paths = render_figures(report, tmp_path)
        assert [p.name for p in paths] == list(FIGURE_NAMES)
        for p in paths:
            assert p.exists()
            assert p.stat().st_size > 5000  # more than a blank canvas
            assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_output_directory_is_created(self, report, tmp_path):
        nested = tmp_path / "a" / "b"
        paths = render_figures(report, nested)
        assert all(p.parent == nested for p in paths)
