import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from hilbert_dyn.cli import dumps17, fmt17, main
from hilbert_dyn.suites import cone_suite

DIAG21 = {"map_id": "diag21", "body": {"type": "simplex", "n": 2},
          "map": {"type": "projective_linear", "matrix": [[2, 0], [0, 1]]}, "start": [0.5, 0.5], "seed": 0}


def write(path, obj):
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def test_run_diag21(tmp_path, capsys):
    cfg = write(tmp_path / "c.json", DIAG21)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["verdict"] == "SingleFace"
    assert rep["provenance"]["seed"] == 0 and rep["provenance"]["iterations"] > 0
    rows = list(csv.reader((tmp_path / "o" / "orbit.csv").open()))
    assert rows[0] == ["n", "coord_0", "coord_1", "displacement", "from_start"]
    assert float(rows[2][3]) == pytest.approx(np.log(2))
    assert (tmp_path / "o" / "orbit.svg").exists()


def test_run_is_deterministic(tmp_path):
    cfg = write(tmp_path / "c.json", cone_suite(0)[5])  # positive3
    for d in ("a", "b"):
        assert main(["run", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    for name in ("orbit.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_svg_only_in_dimension_two(tmp_path):
    cfg = write(tmp_path / "c.json", cone_suite(0)[3])  # diag221 on the 3-simplex
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    assert not (tmp_path / "o" / "orbit.svg").exists()
    raw = dict(DIAG21, emit={"svg": False})
    cfg = write(tmp_path / "d.json", raw)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "p")]) == 0
    assert not (tmp_path / "p" / "orbit.svg").exists()


def test_run_errors(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", "{not json")
    assert main(["run", "--config", bad, "--out", str(tmp_path / "o")]) == 1
    unb = write(tmp_path / "unb.json", {"body": {"type": "hpolytope", "normals": [[-1, 0], [0, -1]],
                                                 "offsets": [0, 0]}, "map": {"type": "identity"},
                                        "start": [1, 1]})
    assert main(["run", "--config", unb, "--out", str(tmp_path / "o")]) == 2
    assert "Unbounded" in capsys.readouterr().err
    wrong = write(tmp_path / "w.json", dict(DIAG21, map={"type": "projective_linear", "matrix": [[1]]}))
    assert main(["run", "--config", wrong, "--out", str(tmp_path / "o")]) == 1
    missing = write(tmp_path / "m.json", {"map": {"type": "identity"}})
    assert main(["run", "--config", missing, "--out", str(tmp_path / "o")]) == 1


def test_sweep_dim2(tmp_path):
    assert main(["sweep", "--suite", "dim2", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "summary.csv").open()))
    assert len(rows) == 10
    assert list(rows[0]) == ["map_id", "body", "verdict", "tau_hat", "D_upper", "delta_hat", "gv_gap",
                             "single_face", "runtime_ms"]
    assert all(r["verdict"] in ("FixedPoint", "SingleFace") for r in rows)


def test_sweep_dir_chain_examples(tmp_path):
    d = tmp_path / "cfg"
    d.mkdir()
    for raw in cone_suite(0)[:3]:  # diag21, perron1112, uppertri21
        write(d / f"{raw['map_id']}.json", raw)
    write(d / "broken.json", "{")
    assert main(["sweep", "--dir", str(d), "--out", str(tmp_path / "o")]) == 0
    rows = list(csv.DictReader((tmp_path / "o" / "summary.csv").open()))
    assert len(rows) == 4
    ok = [r for r in rows if r["verdict"] != "Error"]
    assert len(ok) == 3
    for r in ok:
        tau, D, delta = float(r["tau_hat"]), float(r["D_upper"]), float(r["delta_hat"])
        assert 0 <= tau <= D + 1e-6 <= delta + 2e-6


def test_sweep_empty(tmp_path):
    (tmp_path / "empty").mkdir()
    assert main(["sweep", "--dir", str(tmp_path / "empty"), "--out", str(tmp_path / "o")]) == 1


def test_sweep_parallel_matches_serial(tmp_path, monkeypatch):
    d = tmp_path / "cfg"
    d.mkdir()
    for raw in cone_suite(0)[:4]:
        write(d / f"{raw['map_id']}.json", raw)
    monkeypatch.setenv("HILBERT_DYN_THREADS", "1")
    assert main(["sweep", "--dir", str(d), "--out", str(tmp_path / "s")]) == 0
    monkeypatch.setenv("HILBERT_DYN_THREADS", "2")
    assert main(["sweep", "--dir", str(d), "--out", str(tmp_path / "p")]) == 0
    for raw in cone_suite(0)[:4]:
        name = raw["map_id"]
        assert (tmp_path / "s" / name / "report.json").read_bytes() == \
            (tmp_path / "p" / name / "report.json").read_bytes()


def test_metric_command(tmp_path, capsys):
    body = write(tmp_path / "disk.json", {"type": "ellipsoid", "center": [0, 0], "shape": [[1, 0], [0, 1]]})
    assert main(["metric", "--body", body, "--x", "0,0", "--y", "0.5,0", "--scale", "half"]) == 0
    assert capsys.readouterr().out.strip() == "0.549306144334"
    assert main(["metric", "--body", body, "--x", "0,0", "--y", "0.5,0"]) == 0
    assert capsys.readouterr().out.strip() == "1.09861228867"
    assert main(["metric", "--body", body, "--x", "0,0", "--y", "2,0"]) == 2
    assert main(["metric", "--body", body, "--x", "0,a", "--y", "0.5,0"]) == 1


def test_validate(capsys):
    assert main(["validate"]) == 0
    first = capsys.readouterr().out
    assert main(["validate"]) == 0
    assert capsys.readouterr().out == first
    assert main(["validate", "--inject-scale-mismatch"]) == 3
    assert "FAIL simplex-vs-chord" in capsys.readouterr().out


def test_numpy_fallback_validates(tmp_path):
    env = dict(os.environ, HILBERT_DYN_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-m", "hilbert_dyn", "validate"], env=env, capture_output=True, text=True)
    assert out.returncode == 0, out.stdout + out.stderr


def test_json_encoding():
    assert fmt17(0.1) == "0.10000000000000001"
    text = dumps17({"a": [0.1, 1], "b": float("inf"), "c": None, "d": True})
    doc = json.loads(text)
    assert doc == {"a": [0.1, 1], "b": None, "c": None, "d": True}
