import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nablafrac import SelfAdjointProblem, SturmLiouvilleBC, dense_oracle_solve, rising
from nablafrac.cli import EXIT_FAIL, EXIT_INVALID, EXIT_OK, EXIT_SINGULAR, TOL_ENV, default_tol, main, parse_range
from nablafrac.errors import ValidationError
from nablafrac.problem import ProblemFile, check_solution, read_solution_csv
from nablafrac.sampling import ProblemRanges, random_problem, singular_bc, zero_rho_bc

EX22 = {"kind": "caputo_ivp", "a": 0, "b": 12, "nu": 0.7, "h": "identity", "init": [2]}
EX47 = {"kind": "selfadjoint_ivp", "a": 0, "b": 12, "nu": 0.6, "p": "one", "q": 0, "h": "t", "init": [0, 0]}
BVP = {"kind": "bvp", "a": 0, "b": 9, "nu": 0.45, "p": [1, 1.5, 2, 1, 0.5, 1, 1, 2, 1],
       "q": -0.1, "h": "identity", "bc": {"alpha": 1, "beta": 0.5, "gamma": 1, "delta": 0.25, "A": 1, "B": -1}}


def write(tmp_path, obj, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def problem_dict(prob, bc, kind="bvp"):
    return {"kind": kind, "a": prob.a, "b": prob.b, "nu": prob.nu.nu, "p": list(prob.p.values),
            "q": list(prob.q.values), "h": list(prob.h.values),
            "bc": [bc.alpha, bc.beta, bc.gamma, bc.delta, bc.A, bc.B]}


# -- solve -------------------------------------------------------------------


def test_solve_example_caputo_ivp(tmp_path):
    out = tmp_path / "out"
    assert main(["solve", "--problem", write(tmp_path, EX22), "--out", str(out)]) == EXIT_OK
    table = rows((out / "solution.csv").read_text())
    assert list(table[0]) == ["t", "x"]
    by_t = {float(r["t"]): float(r["x"]) for r in table}
    assert by_t[0.0] == 2.0 and by_t[1.0] == pytest.approx(3.0, rel=1e-14)
    report = json.loads((out / "report.json").read_text())
    assert report["kind"] == "caputo_ivp" and report["residual_max"] <= 1e-12


def test_solve_selfadjoint_ivp_to_stdout(tmp_path, capsys):
    assert main(["solve", "--problem", write(tmp_path, EX47)]) == EXIT_OK
    table = rows(capsys.readouterr().out)
    for r in table:
        t = float(r["t"])
        assert float(r["x"]) == pytest.approx(rising(t - 1, 2.6) / math.gamma(3.6), rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("problem", [EX22, EX47, BVP])
def test_round_trip_residuals(tmp_path, problem):
    out = tmp_path / "out"
    assert main(["solve", "--problem", write(tmp_path, problem), "--out", str(out)]) == EXIT_OK
    report = json.loads((out / "report.json").read_text())
    x = read_solution_csv((out / "solution.csv").read_text())
    rmax, conds = check_solution(ProblemFile.from_dict(problem), x)
    assert abs(rmax - report["residual_max"]) <= 1e-12
    for key, val in conds.items():
        assert abs(val - report["condition_residuals"][key]) <= 1e-12
    assert report["residual_max"] <= 1e-9


def test_solve_bvp_matches_oracle(tmp_path):
    out = tmp_path / "out"
    assert main(["solve", "--problem", write(tmp_path, BVP), "--out", str(out)]) == EXIT_OK
    x = read_solution_csv((out / "solution.csv").read_text())
    pf = ProblemFile.from_dict(BVP)
    z = dense_oracle_solve(pf.selfadjoint(), pf.bc())
    np.testing.assert_allclose(x.values, z.values, rtol=1e-9, atol=1e-12)
    report = json.loads((out / "report.json").read_text())
    assert report["solvability"]["solvable"] is True and report["solvability"]["rho"] is None


def test_outputs_byte_identical(tmp_path):
    path = write(tmp_path, BVP)
    for name in ("one", "two"):
        assert main(["solve", "--problem", path, "--out", str(tmp_path / name)]) == EXIT_OK
    for f in ("solution.csv", "report.json"):
        assert (tmp_path / "one" / f).read_bytes() == (tmp_path / "two" / f).read_bytes()


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"nu": -0.5}, "nu"),
        ({"nu": 1.5}, "nu"),
        ({"kind": "pde"}, "kind"),
        ({"p": [1, 2, 3]}, "p"),
        ({"h": "square"}, "h"),
        ({"b": 0.5}, "b"),
        ({"bc": [1, 0]}, "bc"),
    ],
)
def test_validation_errors_name_the_field(tmp_path, capsys, patch, field):
    bad = {**BVP, **patch}
    assert main(["solve", "--problem", write(tmp_path, bad)]) == EXIT_INVALID
    assert f"`{field}`" in capsys.readouterr().err


def test_length_mismatch_reports_expected_length(tmp_path, capsys):
    bad = {**BVP, "h": [1.0, 2.0]}
    assert main(["solve", "--problem", write(tmp_path, bad)]) == EXIT_INVALID
    assert "expected 8 values" in capsys.readouterr().err


def test_missing_and_malformed_files(tmp_path):
    assert main(["solve", "--problem", str(tmp_path / "nope.json")]) == EXIT_INVALID
    (tmp_path / "bad.json").write_text("{not json")
    assert main(["solve", "--problem", str(tmp_path / "bad.json")]) == EXIT_INVALID
    assert main(["solve"]) == EXIT_INVALID


def test_zero_rho_problem_exits_singular(tmp_path, capsys):
    rng = np.random.default_rng(17)
    prob = random_problem(rng, ProblemRanges(zero_q=True, max_length=10))
    bc = zero_rho_bc(prob, rng)
    path = write(tmp_path, problem_dict(prob, bc))
    assert main(["solve", "--problem", path, "--caputo-boundary-at-b"]) == EXIT_SINGULAR
    assert "error" in capsys.readouterr().err


def test_engineered_singular_problem_exits_singular(tmp_path):
    rng = np.random.default_rng(5)
    prob = random_problem(rng, ProblemRanges(max_length=12))
    path = write(tmp_path, problem_dict(prob, singular_bc(prob, rng)))
    assert main(["solve", "--problem", path]) == EXIT_SINGULAR


def test_tolerance_from_environment(tmp_path, monkeypatch):
    monkeypatch.delenv(TOL_ENV, raising=False)
    assert default_tol() == 1e-10
    monkeypatch.setenv(TOL_ENV, "1e-6")
    assert default_tol() == 1e-6
    # a nearly singular problem flips to singular under a loose tolerance
    rng = np.random.default_rng(8)
    prob = random_problem(rng, ProblemRanges(max_length=8))
    bc = singular_bc(prob, rng)
    nudged = SturmLiouvilleBC(bc.alpha, bc.beta, bc.gamma, bc.delta * (1 + 1e-8))
    path = write(tmp_path, problem_dict(prob, nudged))
    assert main(["solve", "--problem", path]) == EXIT_SINGULAR
    assert main(["solve", "--problem", path, "--tol", "1e-14"]) == EXIT_OK
    monkeypatch.setenv(TOL_ENV, "zero")
    assert main(["solve", "--problem", path]) == EXIT_INVALID


# -- green -------------------------------------------------------------------


def test_green_table(tmp_path):
    out = tmp_path / "g"
    assert main(["green", "--a", "0", "--b", "5", "--nu", "0.5", "--out", str(out)]) == EXIT_OK
    table = rows((out / "green.csv").read_text())
    assert len(table) == 36
    G = {(float(r["t"]), float(r["s"])): (float(r["G"]), r["branch"]) for r in table}
    assert G[2.0, 3.0][0] == pytest.approx(-32 / 35, abs=1e-12) and G[2.0, 3.0][1] == "u"
    assert G[3.0, 2.0][0] == pytest.approx(-3 / 7, abs=1e-12) and G[3.0, 2.0][1] == "v"
    assert all(G[0.0, float(s)][0] == 0.0 for s in range(6))


def test_green_table_is_impulse_response(tmp_path, capsys):
    args = ["green", "--a", "1", "--b", "8", "--nu", "0.35", "--bc", "1,0.5,0.8,0.6",
            "--p", "1,2,1.5,0.7,1,1,3", "--q", "0.2"]
    assert main(args) == EXIT_OK
    table = rows(capsys.readouterr().out)
    G = np.array([float(r["G"]) for r in table]).reshape(8, 8)
    bc = SturmLiouvilleBC(1, 0.5, 0.8, 0.6)
    base = SelfAdjointProblem.build(1, 8, 0.35, p=[1, 2, 1.5, 0.7, 1, 1, 3], q=0.2)
    for k in range(1, 7):
        h = np.zeros(6)
        h[k - 1] = 1.0
        y = dense_oracle_solve(base.with_h(list(h)), bc)
        np.testing.assert_allclose(G[:, k], y.values, rtol=1e-9, atol=1e-12)


def test_green_singular_and_invalid(capsys):
    # beta = delta = 1, alpha = gamma = 0 with nu = 1: constants solve both rows
    assert main(["green", "--a", "0", "--b", "4", "--nu", "1", "--bc", "0,1,0,1"]) == EXIT_SINGULAR
    assert main(["green", "--a", "0", "--b", "4", "--nu", "0.5", "--p", "1,1"]) == EXIT_INVALID
    assert main(["green", "--a", "0", "--b", "4", "--nu", "0.5", "--bc", "0,0,1,0"]) == EXIT_INVALID
    capsys.readouterr()


# -- verify ------------------------------------------------------------------


def test_verify_default_sweep(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path)]) == EXIT_OK
    table = rows((tmp_path / "verify.csv").read_text())
    assert len(table) == 11 * 9
    assert all(r["status"] == "PASS" for r in table)
    capsys.readouterr()


def test_verify_single_cell(capsys):
    assert main(["verify", "--b", "5", "--nu", "0.5"]) == EXIT_OK
    (row,) = rows(capsys.readouterr().out)
    margin = float(row["row_sum_margin"])
    assert margin <= 0 and margin + 4.70158 > 0


def test_verify_constructed_method(capsys):
    assert main(["verify", "--b", "2:6", "--nu", "0.25,0.75", "--method", "constructed"]) == EXIT_OK
    assert len(rows(capsys.readouterr().out)) == 10


def test_verify_exit_one_on_violation(monkeypatch, capsys):
    import dataclasses

    import nablafrac.cli as cli

    real = cli.inequality_margins

    def forged(*args, **kwargs):
        return dataclasses.replace(real(*args, **kwargs), max_G=0.5)

    monkeypatch.setattr(cli, "inequality_margins", forged)
    assert main(["verify", "--b", "3:4", "--nu", "0.5"]) == EXIT_FAIL
    assert rows(capsys.readouterr().out)[0]["status"] == "FAIL"


def test_verify_rejects_negative_tolerance(capsys):
    assert main(["verify", "--b", "5", "--nu", "0.5", "--tol", "-1"]) == EXIT_INVALID
    capsys.readouterr()


@pytest.mark.parametrize("argv", [["--b", "5:2"], ["--nu", "0.9:0.1:0.1"], ["--b", "2.5"], ["--nu", "0.5:1.5:0.5"],
                                  ["--b", "3", "--nu", "1.2"]])
def test_verify_invalid_ranges(capsys, argv):
    assert main(["verify", *argv]) == EXIT_INVALID
    capsys.readouterr()


def test_parse_range():
    assert parse_range("2:5", "b", integer=True) == [2, 3, 4, 5]
    assert parse_range("0.1:0.5:0.1", "nu") == [0.1, 0.2, 0.3, 0.4, 0.5]
    assert parse_range("0.25,0.75", "nu") == [0.25, 0.75]
    with pytest.raises(ValidationError):
        parse_range("5:2", "b")
    with pytest.raises(ValidationError):
        parse_range("1:2:0", "b")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nablafrac", "verify", "--b", "3", "--nu", "0.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
