import json

import numpy as np

from intlab.report_generator import build_provenance, jsonable, write_results


def provenance():
    return build_provenance({"experiment": "sumid", "seed": 3}, flags=("outside-window",))


def test_provenance_fields():
    record = provenance()
    assert set(record) == {"config_digest", "intlab", "numpy", "scipy", "flags", "seed"}
    assert record["flags"] == "outside-window"
    assert record["seed"] == 3
    assert build_provenance({"experiment": "sumid"})["flags"] == "none"


def test_csv_layout(tmp_path):
    rows = [{"n": 1, "value": 0.1, "z": complex(1.0, -2.0), "ok": True},
            {"n": 2, "value": 1.0 / 3.0, "z": 0.5, "ok": False}]
    csv_path, json_path = write_results(rows, {"total": 3}, tmp_path / "out", "demo", provenance())
    text = csv_path.read_bytes().decode("utf-8")
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0].startswith("# config_digest: ")
    header_index = next(i for i, line in enumerate(lines) if not line.startswith("#"))
    assert header_index == 6
    assert lines[header_index] == "n,value,z_re,z_im,ok"
    assert lines[header_index + 1] == "1,0.1,1,-2,true"
    assert lines[header_index + 2] == "2,0.333333333333333,0.5,0,false"
    payload = json.loads(json_path.read_text(encoding="utf-8"))
    assert payload["total"] == 3
    assert payload["provenance"]["seed"] == 3


def test_identical_inputs_give_identical_files(tmp_path):
    rows = [{"x": 0.25, "y": complex(0.0, 1.0)}]
    first = write_results(rows, {"s": 1.5}, tmp_path / "a", "run", provenance())
    second = write_results(rows, {"s": 1.5}, tmp_path / "b", "run", provenance())
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_write_failure_returns_none(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    assert write_results([{"a": 1}], {}, blocker, "demo", provenance()) is None


def test_jsonable():
    assert jsonable({"z": complex(1, 2), "bad": float("nan"), "arr": np.array([1, 2])}) == {
        "z": [1.0, 2.0], "bad": None, "arr": [1, 2]}
    assert jsonable(np.float64(np.inf)) is None
    assert jsonable(np.bool_(True)) is True
