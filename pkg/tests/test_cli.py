import json
import math
import os
import subprocess
import sys
from pathlib import Path

import pytest

from spinfiber.cli import run

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "decompose_identity": ["decompose", "--metric", "eta.json", "--transform", "identity.json"],
    "decompose_near_identity": ["decompose", "--metric", "d4.json", "--transform", "near_identity.json"],
    "gamma_d4": ["gamma", "--metric", "d4.json"],
    "lift_boost": ["lift", "--metric", "eta.json", "--isometry", "boost.json"],
    "transport_dilatation": ["transport", "--field", "blob_field.json", "--motion", "dilatation_motion.json",
                             "--metric", "eta.json"],
    "aggregate_blob": ["aggregate", "--field", "blob_field.json"],
}


def invoke(args, capsys):
    cwd = os.getcwd()
    os.chdir(DATA)
    try:
        code = run(args)
    finally:
        os.chdir(cwd)
    out, err = capsys.readouterr()
    return code, out, err


def comparable(report):
    return {k: v for k, v in report.items() if k != "metadata"}


def close(a, b, path="$"):
    if isinstance(a, dict):
        assert isinstance(b, dict) and set(a) == set(b), path
        for k in a:
            close(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, list):
        assert isinstance(b, list) and len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            close(x, y, f"{path}[{i}]")
    elif isinstance(a, float) or isinstance(b, float):
        assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-14), f"{path}: {a} != {b}"
    else:
        assert a == b, path


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    code, out, err = invoke(CASES[name], capsys)
    report = json.loads(out)
    assert code == 0, err
    assert report["status"] == "pass"
    assert "wall_clock_s" in report["metadata"]
    path = GOLDEN / f"{name}.json"
    if os.environ.get("SPINFIBER_UPDATE_GOLDEN"):
        path.write_text(json.dumps(comparable(report), indent=1) + "\n")
    close(comparable(report), json.loads(path.read_text()))


def test_identity_decomposition_has_zero_residuals(capsys):
    code, out, _ = invoke(CASES["decompose_identity"], capsys)
    report = json.loads(out)
    assert code == 0
    assert all(v == 0 for v in report["residuals"].values())
    assert set(report["result"]) == {"V", "Delta", "U", "source", "target", "baseShift"}


def test_gamma_residual(capsys):
    _, out, _ = invoke(CASES["gamma_d4"], capsys)
    assert json.loads(out)["residuals"]["anticommutator"] <= 1e-12


def test_deterministic_payload(capsys):
    a = comparable(json.loads(invoke(CASES["decompose_near_identity"], capsys)[1]))
    b = comparable(json.loads(invoke(CASES["decompose_near_identity"], capsys)[1]))
    assert json.dumps(a) == json.dumps(b)


def test_residual_failure_exits_1(capsys):
    code, out, err = invoke(CASES["decompose_near_identity"] + ["--tol-reconstruction", "1e-30"], capsys)
    report = json.loads(out)
    assert code == 1 and report["status"] == "fail"
    assert report["tolerancesUsed"]["reconstruction"] == 1e-30
    assert "FAIL" in err


def test_global_tol_and_env(capsys, monkeypatch):
    _, out, _ = invoke(["--tol", "1e-7"] + CASES["gamma_d4"], capsys)
    assert set(json.loads(out)["tolerancesUsed"].values()) == {1e-7}
    monkeypatch.setenv("SPINFIBER_TOL", "1e-5")
    _, out, _ = invoke(CASES["gamma_d4"], capsys)
    assert set(json.loads(out)["tolerancesUsed"].values()) == {1e-5}
    _, out, _ = invoke(CASES["gamma_d4"] + ["--tol", "1e-6"], capsys)
    assert set(json.loads(out)["tolerancesUsed"].values()) == {1e-6}


@pytest.mark.parametrize("args", [
    ["bogus"],
    [],
    ["decompose", "--metric", "eta.json"],
    ["decompose", "--metric", "missing.json", "--transform", "identity.json"],
    ["gamma", "--metric", "broken.json"],
    ["lift", "--metric", "eta.json", "--isometry", "not_isometry.json"],
    ["lift", "--metric", "eta.json", "--isometry", "boost_motion.json"],
    ["decompose", "--metric", "eta.json", "--transform", "identity.json", "--tol-reconstruction"],
    ["decompose", "--metric", "eta.json", "--transform", "identity.json", "--frobnicate"],
])
def test_usage_and_input_errors_exit_2(args, capsys, tmp_path):
    (DATA / "broken.json").write_text("{not json")
    try:
        code, out, err = invoke(args, capsys)
    finally:
        (DATA / "broken.json").unlink()
    assert code == 2
    assert out == ""
    assert err.strip()


def test_transport_writes_out_file(capsys, tmp_path):
    target = tmp_path / "g.json"
    code, out, _ = invoke(CASES["transport_dilatation"] + ["--out", str(target)], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["residuals"]["norm_change"] == 0
    field = json.loads(target.read_text())
    assert set(field) >= {"spacetime_grid", "base_grid", "values"}


def test_transport_boost_norm(capsys):
    code, out, _ = invoke(["transport", "--field", "blob_field.json", "--motion", "boost_motion.json",
                           "--metric", "eta.json"], capsys)
    report = json.loads(out)
    assert code == 0 and report["residuals"]["norm_change"] <= 1e-10
    assert report["result"]["field"]["spacetime_grid"]["axes"][0][0] == 0.5


def test_connection_and_lie(capsys):
    code, out, _ = invoke(["connection", "--tetrad", "frw_tetrad.json", "--metric", "frw_metric.json"], capsys)
    report = json.loads(out)
    assert code == 0 and report["residuals"]["orthonormality"] <= 1e-14
    om = report["result"]["spin_connection"]["values"]
    assert om[5][1][0][0][1][1][0] == pytest.approx(0.2, abs=1e-3)
    code, out, _ = invoke(["lie", "--tetrad", "frw_tetrad.json", "--vector", "dt.json"], capsys)
    L = json.loads(out)["result"]["lie_derivative"]["values"]
    assert code == 0 and L[5][1][0][0][2][2] == pytest.approx(0.2 * math.exp(0.1), rel=1e-3)


def test_lie_frw(capsys, tmp_path):
    target = tmp_path / "frw.json"
    code, out, _ = invoke(["lie-frw", "--scale", "exp", "--H", "0.1", "--t1", "0", "--t2", "1.02",
                           "--field", "blob_field.json", "--out", str(target)], capsys)
    report = json.loads(out)
    assert code == 0
    res = report["result"]
    assert res["base_steps"] == 2 and res["t2"] == pytest.approx(1.0)
    assert res["snap_distance"] == pytest.approx(0.02)
    assert report["residuals"]["norm_change"] == 0
    fields = json.loads(target.read_text())
    assert set(fields) == {"transported", "lie_derivative"}


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "spinfiber", "gamma", "--metric", str(DATA / "eta.json")],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["status"] == "pass"
