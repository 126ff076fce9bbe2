import pytest
import yaml

from vlcsec.shared.config import ConfigLoader, SuiteConfig, dbm_to_watts, watts_to_dbm
from vlcsec.shared.errors import ConfigError, RangeError, SchemaError
from vlcsec.sim import EveKind, build_campaign


class TestDefaults:
    def test_reference_parameters(self, suite):
        assert (suite.room.length, suite.room.width) == (40.0, 40.0)
        assert suite.room.height == 3.98
        assert suite.leds.side == 9.6
        assert suite.noma.zeta == 0.6
        assert suite.simulation.trials == 10_000
        assert sorted(suite.scenarios) == ["1", "2", "3"]

    def test_noise_variance(self, suite):
        assert suite.noise.variance_w == pytest.approx(1.462e-13, rel=1e-3)

    def test_reference_power(self, suite):
        assert suite.powers_dbm() == [pytest.approx(23.9794, abs=1e-4)]

    def test_defaults_pass_range_checks(self, suite):
        assert suite.check_ranges() is suite


class TestUnits:
    def test_dbm_round_trip(self):
        assert watts_to_dbm(dbm_to_watts(17.5)) == pytest.approx(17.5)

    def test_thirty_dbm_is_one_watt(self):
        assert dbm_to_watts(30.0) == pytest.approx(1.0)

    def test_nonpositive_watts(self):
        with pytest.raises(ValueError):
            watts_to_dbm(0.0)


class TestFromMapping:
    def test_aliases_and_names(self):
        a = ConfigLoader.from_mapping({"room": {"L": 20.0}})
        b = ConfigLoader.from_mapping({"room": {"length": 20.0}})
        assert a.room.length == b.room.length == 20.0

    def test_empty_document(self):
        assert ConfigLoader.from_mapping(None) == SuiteConfig()

    def test_top_level_must_be_mapping(self):
        with pytest.raises(SchemaError):
            ConfigLoader.from_mapping([1, 2])

    def test_unknown_key_names_field(self):
        with pytest.raises(SchemaError) as excinfo:
            ConfigLoader.from_mapping({"noma": {"beta": 0.3}})
        assert excinfo.value.field_path == "noma.beta"

    def test_numeric_scenario_name(self):
        assert ConfigLoader.from_mapping({"simulation": {"scenario": 2}}).simulation.scenario == "2"

    def test_custom_scenarios_keep_builtins(self):
        suite = ConfigLoader.from_mapping({"scenarios": {"pair": {"users": [[1, 1], [2, 2]]}}})
        assert sorted(suite.scenarios) == ["1", "2", "3", "pair"]

    def test_dump_round_trip(self, suite):
        assert ConfigLoader.from_mapping(suite.dump()) == suite

    def test_schema_error_is_config_error(self):
        with pytest.raises(ConfigError):
            ConfigLoader.from_mapping({"simulation": {"trials": 0}})


class TestRangeChecks:
    @pytest.mark.parametrize(
        "data",
        [
            {"noma": {"zeta": 0.5}},
            {"noma": {"zeta": 1.2}},
            {"room": {"z_D": 4.0}},
            {"body": {"H": 0.8}},
            {"pd": {"eta": 2.5}},
            {"leds": {"l": 15.0}},
            {"leds": {"lattice": "explicit"}},
            {"simulation": {"scenario": "missing"}},
            {"simulation": {"eve_box": [0, 50, 0, 40]}},
        ],
    )
    def test_rejected(self, data):
        with pytest.raises(RangeError):
            ConfigLoader.from_mapping(data).check_ranges()

    def test_zeta_one_allowed(self):
        ConfigLoader.from_mapping({"noma": {"zeta": 1.0}}).check_ranges()

    def test_square_lattice_ignores_triangular_bound(self):
        ConfigLoader.from_mapping({"leds": {"lattice": "square", "l": 15.0}}).check_ranges()


class TestFixtures:
    def test_malformed_yaml(self, fixtures_dir):
        with pytest.raises(SchemaError, match="YAML"):
            ConfigLoader.read(fixtures_dir / "configs" / "malformed_yaml.yaml")

    def test_unknown_key(self, fixtures_dir):
        with pytest.raises(SchemaError) as excinfo:
            ConfigLoader.read(fixtures_dir / "configs" / "unknown_key.yaml")
        assert excinfo.value.field_path == "room.ceiling_color"

    @pytest.mark.parametrize(
        "name", ["zeta_out_of_range", "lattice_too_wide", "user_outside_room"]
    )
    def test_out_of_range(self, fixtures_dir, name):
        suite = ConfigLoader.read(fixtures_dir / "configs" / f"{name}.yaml")
        with pytest.raises(RangeError):
            build_campaign(suite)

    def test_custom_scenario(self, fixtures_dir):
        cfg = build_campaign(ConfigLoader.read(fixtures_dir / "configs" / "custom_scenario.yaml"))
        assert cfg.scenario.name == "corner"
        assert cfg.scenario.users == ((8.0, 8.0), (12.0, 10.0))
        assert cfg.scenario.eve.kind is EveKind.FIXED
        assert cfg.scenario.eve.point == (10.0, 9.0)
        assert cfg.powers_dbm == (10.0, 20.0)
        assert cfg.zeta == 0.7


class TestLoad:
    def test_env_overrides(self, monkeypatch):
        monkeypatch.setenv("VLCSEC_TRIALS", "25")
        monkeypatch.setenv("VLCSEC_SEED", "9")
        monkeypatch.setenv("VLCSEC_LOG_LEVEL", "debug")
        suite = ConfigLoader.load()
        assert suite.simulation.trials == 25
        assert suite.simulation.seed == 9
        assert suite.log_level == "debug"

    def test_bad_env_value(self, monkeypatch):
        monkeypatch.setenv("VLCSEC_JOBS", "many")
        with pytest.raises(SchemaError) as excinfo:
            ConfigLoader.load()
        assert excinfo.value.field_path == "VLCSEC_JOBS"

    def test_config_from_env(self, monkeypatch, fixtures_dir):
        monkeypatch.setenv("VLCSEC_CONFIG", str(fixtures_dir / "configs" / "custom_scenario.yaml"))
        assert ConfigLoader.load().simulation.scenario == "corner"

    def test_missing_env_file_falls_back(self, monkeypatch, tmp_path):
        monkeypatch.setenv("VLCSEC_CONFIG", str(tmp_path / "absent.yaml"))
        assert ConfigLoader.load() == SuiteConfig()

    def test_argument_beats_env(self, monkeypatch, fixtures_dir, tmp_path):
        monkeypatch.setenv("VLCSEC_CONFIG", str(fixtures_dir / "configs" / "custom_scenario.yaml"))
        path = tmp_path / "plain.yaml"
        path.write_text("simulation:\n  trials: 3\n", encoding="utf-8")
        suite = ConfigLoader.load(path)
        assert suite.simulation.scenario == "1"
        assert suite.simulation.trials == 3


class TestTemplate:
    def test_round_trip(self):
        text = ConfigLoader.template()
        assert text.startswith("# vlcsec configuration")
        assert ConfigLoader.from_mapping(yaml.safe_load(text)) == SuiteConfig()

    def test_uses_aliases(self):
        data = yaml.safe_load(ConfigLoader.template())
        assert data["room"]["L"] == 40.0
        assert "scenarios" not in data
