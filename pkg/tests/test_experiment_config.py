"""
Tests for experiment config parsing.
"""

import pytest

from common.experiment_config import (
    ConfigError,
    ExperimentConfig,
    load_config,
    parse_config,
)
from dynamics.errors import UsageError
from dynamics.interval import tent_map
from dynamics.odometer import parse_point
from dynamics.radix import RadixSpec

YAML_CONFIG = """\
system: odometer
action: simulate
spec: "2"
holes:
  - center: "digits:|0"
    schedule: {form: geometric, c: "1", lambda: "1/2"}
  - center: "digits:1,0"
    schedule: {form: geometric, c: "1", lambda: "1/2"}
params:
  n_max: 6
  point: "digits:1,0,0,1,0,0|0"
"""


class TestParsing:
    @pytest.mark.unit
    def test_odometer_config(self, simulate_config):
        config = parse_config(simulate_config)
        assert config.system == "odometer"
        assert config.spec == RadixSpec.constant(2)
        assert config.holes[1].center == parse_point("digits:|1,0", config.spec)
        assert config.params.n_max == 6

    @pytest.mark.unit
    def test_round_trip(self, simulate_config):
        config = parse_config(simulate_config)
        assert ExperimentConfig.from_dict(config.to_dict()) == config

    @pytest.mark.unit
    def test_tent_round_trip(self):
        data = {
            "system": "tent",
            "action": "construct",
            "holes": [{"center": "2/5", "schedule": {"form": "harmonic", "c": "1/10"}}],
            "params": {"schedule": [1]},
        }
        config = parse_config(data)
        assert config.map == tent_map()
        assert config.to_dict()["map"] == "tent"
        assert parse_config(config.to_dict()) == config

    @pytest.mark.unit
    def test_custom_map_round_trip(self):
        data = {
            "system": "tent",
            "action": "simulate",
            "map": {"name": "skew", "points": [["0", "0"], ["1/3", "1"], ["1", "0"]]},
        }
        config = parse_config(data)
        assert config.to_dict()["map"]["points"][1] == ["1/3", "1/1"]
        assert parse_config(config.to_dict()) == config

    @pytest.mark.unit
    def test_solenoid_config(self):
        config = parse_config({"system": "solenoid", "action": "solenoid-check", "branching": "2,3", "stage": 2})
        assert config.spec == RadixSpec(period=(2, 3))
        assert config.to_dict()["branching"] == "2,3"

    @pytest.mark.unit
    def test_yaml_matches_json(self, simulate_config, write_config):
        from_yaml = load_config(write_config(YAML_CONFIG, "config.yaml"))
        from_json = load_config(write_config(simulate_config))
        assert from_yaml == from_json

    @pytest.mark.unit
    def test_with_params(self, simulate_config):
        config = parse_config(simulate_config).with_params(seed=7, n_max=None)
        assert config.params.seed == 7
        assert config.params.n_max == 6

    @pytest.mark.unit
    def test_zero_limits_are_kept(self, simulate_config):
        simulate_config["params"].update(depth_cap=3, max_depth=0, max_offset=0)
        params = parse_config(simulate_config).params
        assert (params.depth_cap, params.max_depth, params.max_offset) == (3, 0, 0)
        assert parse_config(simulate_config).with_params(seed=None).params.max_depth == 0


class TestErrors:
    @pytest.mark.unit
    def test_errors_are_usage_errors(self):
        assert issubclass(ConfigError, UsageError)

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "patch,path",
        [
            ({"system": "torus"}, "system"),
            ({"action": "dance"}, "action"),
            ({"spec": "2|3|4"}, "spec"),
            ({"holes": {}}, "holes"),
            ({"params": {"n_max": "six"}}, "params.n_max"),
            ({"params": {"n_max": -1}}, "params.n_max"),
            ({"params": {"speed": 1}}, "params.speed"),
            ({"params": {"schedule": [1, "2"]}}, "params.schedule"),
        ],
    )
    def test_reports_path(self, simulate_config, patch, path):
        simulate_config.update(patch)
        with pytest.raises(ConfigError) as err:
            parse_config(simulate_config)
        assert err.value.path == path
        assert str(err.value).startswith(f"{path}: ")

    @pytest.mark.unit
    def test_bad_center(self, simulate_config):
        simulate_config["holes"][1]["center"] = "digits:3"
        with pytest.raises(ConfigError) as err:
            parse_config(simulate_config)
        assert err.value.path == "holes[1].center"

    @pytest.mark.unit
    def test_bad_lambda(self, simulate_config):
        simulate_config["holes"][0]["schedule"]["lambda"] = "3/2"
        with pytest.raises(ConfigError) as err:
            parse_config(simulate_config)
        assert err.value.path == "holes[0].schedule"
        assert "lambda" in err.value.reason

    @pytest.mark.unit
    def test_missing_field(self, simulate_config):
        del simulate_config["holes"][0]["schedule"]
        with pytest.raises(ConfigError) as err:
            parse_config(simulate_config)
        assert err.value.path == "holes[0].schedule"

    @pytest.mark.unit
    def test_action_per_system(self):
        with pytest.raises(ConfigError) as err:
            parse_config({"system": "tent", "action": "sample"})
        assert err.value.path == "action"

    @pytest.mark.unit
    def test_malformed_json(self, write_config):
        path = write_config('{"system": "odometer",')
        with pytest.raises(ConfigError) as err:
            load_config(path)
        assert "invalid JSON" in err.value.reason

    @pytest.mark.unit
    def test_malformed_yaml(self, write_config):
        path = write_config("system: [odometer\n", "config.yml")
        with pytest.raises(ConfigError) as err:
            load_config(path)
        assert "invalid YAML" in err.value.reason

    @pytest.mark.unit
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    @pytest.mark.unit
    def test_document_must_be_object(self):
        with pytest.raises(ConfigError):
            parse_config(["system", "odometer"])
