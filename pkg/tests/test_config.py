"""Configuration parsing, validation, and environment overrides."""

import json

import pytest

from pflab.config import (
    DEFAULT_BIND,
    default_rig,
    load_config,
    parse_config,
    rig_for_registration,
)
from pflab.errors import ConfigError

Z1_R = 5.338667999999999
Z1_L = 9.630664815485199e-3
Z2_R = 2.6693339999999997
C_99 = 1.914524906459689e-4
C_UNITY = 2.557578341201087e-4


class TestDefaults:
    def test_empty_object_is_a_valid_deployment(self):
        cfg = parse_config({})
        assert cfg.bind == DEFAULT_BIND
        assert cfg.grace == 30.0
        assert cfg.observer_mode is False
        assert cfg.admin_key is None
        assert cfg.settle_delay == 0.5
        assert cfg.log_path == "events.jsonl"
        assert cfg.slots_path == "slots.json"

    def test_default_rig_is_the_demonstration_pump(self):
        rig = default_rig()
        assert rig.load_r == pytest.approx(Z1_R)
        assert rig.load_l == pytest.approx(Z1_L)
        assert rig.cap_c == pytest.approx(C_99)
        assert rig.source_vrms == 230.0
        assert rig.frequency == 50.0

    def test_host_and_port_split(self):
        cfg = parse_config({"bind": "0.0.0.0:9001"})
        assert cfg.host == "0.0.0.0"
        assert cfg.port == 9001

    def test_port_without_colon_rejected_on_access(self):
        cfg = parse_config({"bind": "localhost"})
        with pytest.raises(ConfigError):
            cfg.port


class TestRegistrationDerivation:
    def test_registration_picks_the_pump_size(self):
        cfg = parse_config({"registration": 4})
        assert cfg.rig.load_r == pytest.approx(Z2_R)
        # twice the power wants twice the correction capacitance
        assert cfg.rig.cap_c == pytest.approx(2 * C_99, rel=1e-12)

    def test_target_pf_changes_the_capacitor(self):
        cfg = parse_config({"target_pf": 1.0})
        assert cfg.rig.cap_c == pytest.approx(C_UNITY)

    def test_cable_length_scales_cable_resistance(self):
        short = parse_config({"cable_length_m": 20})
        long = parse_config({"cable_length_m": 40})
        assert long.rig.cable_r == pytest.approx(2 * short.rig.cable_r, rel=1e-12)

    def test_custom_cable_table_feeds_the_derivation(self):
        table = [
            {
                "label": "bus bar",
                "cross_section_mm2": 300,
                "r_per_km": 0.1,
                "ampacity": 500,
            }
        ]
        cfg = parse_config({"cable_table": table, "cable_length_m": 20})
        assert cfg.rig.cable_r == pytest.approx(0.1 * 20 / 1000)
        assert cfg.cable_table[0].label == "bus bar"

    def test_registration_helper_matches_parse(self):
        via_parse = parse_config({"registration": 7}).rig
        direct = rig_for_registration(7)
        assert via_parse == direct


class TestExplicitRig:
    def test_rig_section_overrides_derivation(self):
        cfg = parse_config(
            {"rig": {"load_r": 5.0, "load_l": 0.01, "cap_c": 2e-4, "cable_r": 0.05}}
        )
        assert cfg.rig.load_r == 5.0
        assert cfg.rig.cable_r == 0.05
        # unlisted electrical constants keep their defaults
        assert cfg.rig.source_vrms == 230.0
        assert cfg.rig.sample_rate == 10000.0

    def test_rig_section_missing_keys_rejected(self):
        with pytest.raises(ConfigError, match="missing"):
            parse_config({"rig": {"load_r": 5.0}})

    def test_rig_section_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown rig"):
            parse_config(
                {
                    "rig": {
                        "load_r": 5.0,
                        "load_l": 0.01,
                        "cap_c": 2e-4,
                        "cable_r": 0.05,
                        "load_z": 1.0,
                    }
                }
            )


class TestValidation:
    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            parse_config({"bindd": "127.0.0.1:8000"})

    def test_unknown_session_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown session keys"):
            parse_config({"session": {"graace": 10}})

    def test_root_must_be_an_object(self):
        with pytest.raises(ConfigError):
            parse_config([1, 2, 3])

    def test_empty_cable_table_rejected(self):
        with pytest.raises(ConfigError, match="cable_table"):
            parse_config({"cable_table": []})

    def test_malformed_cable_entry_rejected(self):
        with pytest.raises(ConfigError, match="cable_table"):
            parse_config({"cable_table": [{"label": "x"}]})


class TestSessionBlock:
    def test_session_policy_is_plumbed_through(self):
        cfg = parse_config(
            {
                "session": {
                    "grace": 10,
                    "observer_mode": True,
                    "slots_path": "var/slots.json",
                }
            }
        )
        assert cfg.grace == 10.0
        assert cfg.observer_mode is True
        assert cfg.slots_path == "var/slots.json"


class TestEnvironmentOverrides:
    def test_bind_override(self, monkeypatch):
        monkeypatch.setenv("PFLAB_BIND", "10.0.0.1:9999")
        cfg = parse_config({"bind": "127.0.0.1:8000"})
        assert cfg.bind == "10.0.0.1:9999"

    def test_admin_key_override(self, monkeypatch):
        monkeypatch.setenv("PFLAB_ADMIN_KEY", "from-env")
        cfg = parse_config({"admin_key": "from-file"})
        assert cfg.admin_key == "from-env"

    def test_no_env_keeps_file_values(self, monkeypatch):
        monkeypatch.delenv("PFLAB_BIND", raising=False)
        monkeypatch.delenv("PFLAB_ADMIN_KEY", raising=False)
        cfg = parse_config({"bind": "1.2.3.4:1", "admin_key": "k"})
        assert cfg.bind == "1.2.3.4:1"
        assert cfg.admin_key == "k"


class TestLoadConfig:
    def test_round_trip_from_file(self, tmp_path):
        doc = {
            "registration": 2,
            "bind": "127.0.0.1:8123",
            "admin_key": "secret",
            "session": {"grace": 15, "observer_mode": True},
        }
        path = tmp_path / "lab.json"
        path.write_text(json.dumps(doc))
        cfg = load_config(path)
        assert cfg.port == 8123
        assert cfg.admin_key == "secret"
        assert cfg.grace == 15.0
        assert cfg.observer_mode is True

    def test_missing_file_is_an_error(self, tmp_path):
        with pytest.raises(ConfigError, match="lab.json"):
            load_config(tmp_path / "lab.json")

    def test_invalid_json_is_an_error(self, tmp_path):
        path = tmp_path / "lab.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_empty_object_file_is_valid(self, tmp_path):
        path = tmp_path / "lab.json"
        path.write_text("{}")
        cfg = load_config(path)
        assert cfg.rig == default_rig()
