import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def invoke(*args):
    return subprocess.run([sys.executable, str(ROOT / "integrable_lab.py"), *args, "--quiet"],
                          cwd=ROOT, capture_output=True, text=True)


def test_malformed_config_exits_1(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"experiment": ', encoding="utf-8")
    assert invoke("--config", str(path)).returncode == 1


def test_tolerance_failure_exits_3(tmp_path):
    (tmp_path / "configs").mkdir()
    path = tmp_path / "configs" / "bethe.json"
    path.write_text(json.dumps({"experiment": "bethe", "tolerances": {"bethe_residual": -1.0}}),
                    encoding="utf-8")
    assert invoke("--config", str(path), "--out", str(tmp_path)).returncode == 0
    assert invoke("--config", str(path), "--out", str(tmp_path), "--check").returncode == 3


def test_sweep_from_command_line(tmp_path):
    path = tmp_path / "sumid.json"
    path.write_text(json.dumps({"experiment": "sumid", "params": {"cutoff": 10}}), encoding="utf-8")
    done = invoke("--config", str(path), "--out", str(tmp_path), "--sweep", "z", "--values", "[0.2, 0.3]",
                  "--no-progress")
    assert done.returncode == 0
    assert (tmp_path / "sumid_z_sweep.csv").exists()


def test_output_next_to_config_is_refused(tmp_path):
    path = tmp_path / "bethe.json"
    text = json.dumps({"experiment": "bethe"})
    path.write_text(text, encoding="utf-8")
    assert invoke("--config", str(path), "--out", str(tmp_path)).returncode == 1
    assert path.read_text(encoding="utf-8") == text


def test_slow_marker_is_registered(pytestconfig):
    assert any(line.startswith("slow:") for line in pytestconfig.getini("markers"))
