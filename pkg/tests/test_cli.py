import json

import numpy as np
import pytest
from click.testing import CliRunner

from corona_lab.cli import EXIT_CORONA, EXIT_INPUT, EXIT_OK, EXIT_TOL, main

COARSE = ["--nr", "16", "--ntheta", "64", "--fit-radius", "0.8"]


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args], catch_exceptions=False)


@pytest.fixture
def const_disk(tmp_path):
    return write(tmp_path / "const.json", {"kind": "disk", "n": 1, "F": [[[0.5, 0]]], "G": [[[0.5, 0]]]})


@pytest.fixture(scope="module")
def seed7(tmp_path_factory):
    """The n = 2 regression fixture solved at the default grid (shared)."""
    d = tmp_path_factory.mktemp("seed7")
    r = invoke("gen", "--n", 2, "--delta", 0.3, "--degree", 4, "--seed", 7, "--out", d / "p.json")
    assert r.exit_code == EXIT_OK
    r = invoke("solve-disk", d / "p.json", "--out", d / "out")
    return d, r


def test_gen_deterministic(tmp_path):
    a = invoke("gen", "--n", 1, "--delta", 0.5, "--seed", 1)
    b = invoke("gen", "--n", 1, "--delta", 0.5, "--seed", 1)
    assert a.exit_code == EXIT_OK and a.output == b.output
    assert json.loads(a.output)["kind"] == "disk"
    invoke("gen", "--n", 1, "--delta", 0.5, "--seed", 1, "--out", tmp_path / "p.json")
    assert (tmp_path / "p.json").read_text() == a.output


def test_gen_infeasible_budget():
    r = invoke("gen", "--n", 8, "--delta", 0.99, "--degree", 8)
    assert r.exit_code == EXIT_INPUT and "budget infeasible" in r.output


def test_solve_disk_constants(tmp_path, const_disk):
    r = invoke("solve-disk", const_disk, *COARSE, "--out", tmp_path / "o")
    assert r.exit_code == EXIT_OK, r.output
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["status"] == "PASS"
    assert max(rep["results"]["smooth_bezout"]) <= 1e-12
    for name in ("solution.json", "timings.json", "smooth_r1.csv", "fit_r2.csv"):
        assert (tmp_path / "o" / name).exists()
    assert "holo_bezout: PASS" in r.output


def test_solve_disk_common_zero(tmp_path):
    p = write(tmp_path / "z.json", {"kind": "disk", "F": [[[0, 0], [1, 0]]], "G": [[[0, 0], [1, 0]]]})
    r = invoke("solve-disk", p, *COARSE)
    assert r.exit_code == EXIT_CORONA and "corona condition violated" in r.output


def test_input_errors(tmp_path, const_disk):
    (tmp_path / "bad.json").write_text("{")
    assert invoke("solve-disk", tmp_path / "bad.json").exit_code == EXIT_INPUT
    assert invoke("solve-disk", tmp_path / "missing.json").exit_code == EXIT_INPUT
    assert invoke("solve-ball", const_disk).exit_code == EXIT_INPUT
    assert invoke("solve-disk", const_disk, "--rmax", 1.5).exit_code == EXIT_INPUT
    assert invoke("symbolic-check", "--n", 4).exit_code == EXIT_INPUT


def test_tolerance_failure_exit_code(tmp_path):
    p = write(tmp_path / "q.json", {"kind": "ball", "f": [[[-2, 0, 0, 0], [1, 0, 0, 0]]]})
    r = invoke("solve-ball", p, "--fit-degree", 4, "--tol", 1e-30)
    assert r.exit_code == EXIT_TOL and "ball_bezout: FAIL" in r.output


def test_seed7_regression(seed7):
    d, r = seed7
    assert r.exit_code == EXIT_OK, r.output
    rep = json.loads((d / "out" / "report.json").read_text())
    assert all(v == "PASS" for v in rep["criteria"].values())
    assert len(rep["inputs"]["problem"]) == 40


def test_verify_reproduces_solve(seed7, tmp_path):
    d, _ = seed7
    r = invoke("verify", d / "out" / "solution.json", d / "p.json", "--out", tmp_path / "v")
    assert r.exit_code == EXIT_OK
    solved = json.loads((d / "out" / "report.json").read_text())["results"]["fit_bezout"]
    verified = json.loads((tmp_path / "v" / "report.json").read_text())["results"]["fit_bezout"]
    assert max(abs(a - b) for a, b in zip(solved, verified)) <= 1e-12


def test_verify_detects_tampering(seed7, tmp_path):
    d, _ = seed7
    sol = json.loads((d / "out" / "solution.json").read_text())
    sol["H"][0][1][0] += 1e-2
    r = invoke("verify", write(tmp_path / "t.json", sol), d / "p.json", "--out", tmp_path / "v")
    assert r.exit_code == EXIT_TOL
    res = json.loads((tmp_path / "v" / "report.json").read_text())["results"]["fit_bezout"]
    assert max(res) > 1e-3


def test_verify_left_product_counterexample(tmp_path):
    f = [[[0, -0.5, 0, 0], [1, 0, 0, 0]], [[0, 0, 0, -0.5], [0, 0, 1, 0]]]
    g = [[[0, 1, 0, 0]], [[0, 0, 0, 1]]]
    p = write(tmp_path / "p.json", {"kind": "ball", "f": f})
    s = write(tmp_path / "s.json", {"kind": "ball", "product": "left", "g": g})
    r = invoke("verify", s, p, "--out", tmp_path / "v")
    assert r.exit_code == EXIT_OK
    assert json.loads((tmp_path / "v" / "report.json").read_text())["results"]["ball_residual"] <= 1e-12
    s = write(tmp_path / "s2.json", {"kind": "ball", "product": "right", "g": g})
    assert invoke("verify", s, p).exit_code == EXIT_TOL


def test_solve_ball_one_generator(tmp_path):
    p = write(tmp_path / "q.json", {"kind": "ball", "f": [[[-2, 0, 0, 0], [1, 0, 0, 0]]]})
    r = invoke("solve-ball", p, "--out", tmp_path / "o")
    assert r.exit_code == EXIT_OK
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["results"]["ball_residual"] <= 1e-10
    assert rep["criteria"]["norm_bound"] == "PASS"
    r = invoke("verify", tmp_path / "o" / "solution.json", p)
    assert r.exit_code == EXIT_OK


def test_solve_ball_interior_zero(tmp_path):
    p = write(tmp_path / "z.json", {"kind": "ball", "f": [[[0, -0.5, 0, 0], [1, 0, 0, 0]]]})
    assert invoke("solve-ball", p).exit_code == EXIT_CORONA


def test_solve_ball_two_generators(tmp_path):
    p = write(tmp_path / "b2.json", {"kind": "ball", "f": [[[0, 0, 0, 0], [0, 0.5, 0, 0]], [[0.5, 0, 0, 0]]]})
    r = invoke("solve-ball", p, "--nr", 32, "--ntheta", 128)
    assert r.exit_code == EXIT_OK, r.output


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symbolic_check(n, tmp_path):
    r = invoke("symbolic-check", "--n", n, "--out", tmp_path)
    assert r.exit_code == EXIT_OK
    assert json.loads((tmp_path / "report.json").read_text())["status"] == "PASS"


@pytest.mark.parametrize("method", [["--method", "midpoint", "--subdivide"], ["--method", "cell"]])
def test_dbar_test(tmp_path, method):
    r = invoke("dbar-test", *method, "--out", tmp_path)
    assert r.exit_code == EXIT_OK
    field = np.loadtxt(tmp_path / "error_field.csv", delimiter=",", skiprows=1)
    assert field.shape == (16 * 64, 4)
    assert np.all(np.isfinite(field)) and field[:, 2].max() <= 2e-2


def test_reports_are_byte_identical(tmp_path, const_disk):
    for name in ("a", "b"):
        assert invoke("solve-disk", const_disk, *COARSE, "--out", tmp_path / name).exit_code == EXIT_OK
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
