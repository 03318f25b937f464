import json

import pytest

from intlab.config import validate_config
from intlab.errors import ConfigError, ToleranceError
from intlab.runner import run, sweep


def test_run_writes_results(sumid_config):
    outcome = run(validate_config(sumid_config))
    assert outcome.exit_code == 0
    csv_path, json_path = outcome.paths
    assert csv_path.name == "sumid.csv"
    payload = json.loads(json_path.read_text(encoding="utf-8"))
    assert payload["experiment"] == "sumid"
    assert payload["checks"][0]["passed"] is True


def test_runs_are_byte_identical(sumid_config, tmp_path):
    config = validate_config(sumid_config)
    first = run(config, out_dir=tmp_path / "one")
    second = run(config, out_dir=tmp_path / "two")
    for a, b in zip(first.paths, second.paths):
        assert a.read_bytes() == b.read_bytes()


def test_check_mode_raises_on_failure(tmp_path):
    config = validate_config({"experiment": "bethe", "output_path": str(tmp_path),
                              "tolerances": {"bethe_residual": -1.0}})
    outcome = run(config)
    assert outcome.result.failed
    with pytest.raises(ToleranceError) as info:
        run(config, check=True)
    assert info.value.exit_code == 3


def test_serial_sweep_keeps_order_and_status(sumid_config):
    config = validate_config(sumid_config)
    outcome = sweep(config, "z", [0.2, 0.95, 0.4], progress=False)
    assert outcome.statuses[0] == "ok"
    assert outcome.statuses[1].startswith("DomainError")
    assert outcome.statuses[2] == "ok"
    assert outcome.exit_code == 1
    lines = [line for line in outcome.paths[0].read_text(encoding="utf-8").splitlines()
             if not line.startswith("#")]
    assert len(lines) == 4
    assert lines[1].startswith("0.2,ok,0")


def test_parallel_sweep_matches_serial(sumid_config, tmp_path):
    config = validate_config(sumid_config)
    serial = sweep(config, "nu", [0.1, 0.3], workers=1, out_dir=tmp_path / "serial", progress=False)
    parallel = sweep(config, "nu", [0.1, 0.3], workers=2, out_dir=tmp_path / "parallel", progress=False)
    assert serial.statuses == parallel.statuses
    assert serial.paths[0].read_bytes() == parallel.paths[0].read_bytes()


def test_sweep_rejects_bad_requests(sumid_config):
    config = validate_config(sumid_config)
    with pytest.raises(ConfigError):
        sweep(config, "z", [], progress=False)
    with pytest.raises(ConfigError):
        sweep(config, "temperature", [1.0], progress=False)


def test_results_never_overwrite_config(sumid_config, tmp_path):
    source = tmp_path / "sumid.json"
    text = json.dumps(sumid_config)
    source.write_text(text, encoding="utf-8")
    config = validate_config(sumid_config)
    with pytest.raises(ConfigError):
        run(config, out_dir=tmp_path, config_path=source)
    with pytest.raises(ConfigError):
        sweep(config, "z", [0.2], out_dir=tmp_path, progress=False, config_path=tmp_path / "sumid_z_000.json")
    assert source.read_text(encoding="utf-8") == text
    assert run(config, out_dir=tmp_path / "results", config_path=source).exit_code == 0
