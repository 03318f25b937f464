import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from intlab.config import (
    EXPERIMENT_PARAMS,
    as_complex,
    config_digest,
    default_workers,
    load_config,
    validate_config,
)
from intlab.errors import ConfigError


def test_defaults_are_applied():
    config = validate_config({"experiment": "sumid", "params": {"ell": 1}})
    assert config["params"] == {**EXPERIMENT_PARAMS["sumid"], "ell": 1}
    assert config["output_path"] == "results"
    assert config["seed"] == 0
    assert config["sweep"] is None


def test_missing_experiment():
    with pytest.raises(ConfigError, match="Missing required"):
        validate_config({"params": {}})


@given(st.text(min_size=1).filter(lambda k: k not in EXPERIMENT_PARAMS["sumid"]))
def test_unknown_params_rejected(key):
    with pytest.raises(ConfigError, match="Unknown params"):
        validate_config({"experiment": "sumid", "params": {key: 1}})


def test_unknown_top_level_key_and_experiment():
    with pytest.raises(ConfigError, match="Unknown config keys"):
        validate_config({"experiment": "sumid", "colour": "blue"})
    with pytest.raises(ConfigError, match="Unknown experiment"):
        validate_config({"experiment": "nonsense"})


def test_unknown_tolerance_rejected():
    with pytest.raises(ConfigError, match="Unknown tolerances"):
        validate_config({"experiment": "sumid", "tolerances": {"sum_identiy": 1e-3}})


@pytest.mark.parametrize("bad", [float("inf"), float("-inf"), float("nan")])
def test_non_finite_numbers_rejected(bad):
    with pytest.raises(ConfigError, match="Non-finite"):
        validate_config({"experiment": "sumid", "params": {"z": bad}})
    with pytest.raises(ConfigError, match="Non-finite"):
        validate_config({"experiment": "sumid", "params": {"nu": [0.1, bad]}})


def test_sweep_validation():
    with pytest.raises(ConfigError, match="empty"):
        validate_config({"experiment": "sumid", "sweep": {"parameter": "z", "values": []}})
    with pytest.raises(ConfigError, match="not a 'sumid' param"):
        validate_config({"experiment": "sumid", "sweep": {"parameter": "x", "values": [1]}})
    config = validate_config({"experiment": "sumid", "sweep": {"parameter": "z", "values": [0.1, 0.2]}})
    assert config["sweep"]["values"] == [0.1, 0.2]


@pytest.mark.parametrize("seed", [-1, 1.5, "7"])
def test_seed_must_be_non_negative_integer(seed):
    with pytest.raises(ConfigError, match="seed"):
        validate_config({"experiment": "sumid", "seed": seed})


def test_load_config_reports_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "experiment": "sumid",\n  "params": {,}\n}\n', encoding="utf-8")
    with pytest.raises(ConfigError, match=r"broken\.json:3:\d+: invalid JSON"):
        load_config(path)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.json")


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "ok.json"
    path.write_text(json.dumps({"experiment": "toda", "params": {"level": 1}}), encoding="utf-8")
    assert validate_config(load_config(path))["params"]["level"] == 1


def test_digest_ignores_key_order():
    a = {"experiment": "sumid", "params": {"ell": 0, "z": 0.4}}
    b = {"params": {"z": 0.4, "ell": 0}, "experiment": "sumid"}
    assert config_digest(a) == config_digest(b)
    assert config_digest(a) != config_digest({**a, "seed": 1})


def test_as_complex():
    assert as_complex([0.5, -1.0]) == complex(0.5, -1.0)
    assert as_complex(2) == 2.0
    with pytest.raises(ConfigError):
        as_complex([1.0, 2.0, 3.0])


def test_default_workers(monkeypatch):
    monkeypatch.delenv("INTLAB_WORKERS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("INTLAB_WORKERS", "4")
    assert default_workers() == 4
    monkeypatch.setenv("INTLAB_WORKERS", "many")
    with pytest.raises(ConfigError):
        default_workers()
