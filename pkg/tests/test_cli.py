import csv
import io
import json
import subprocess
import sys

import pytest

from uqsl2 import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out else None), err


# --- eval ----------------------------------------------------------------------------------

def test_eval_cgc_table(capsys):
    code, rep, _ = report(capsys, "eval", "cgc", "mu=-5", "gamma=-6", "N=2")
    assert code == 0
    table = rep["cases"][0]["table"]
    assert len(table) == 3 and all(len(r) == 3 for r in table)
    assert table[2][0] == "1"  # l = N, m = 0
    assert set(rep["meta"]) >= {"version", "mode", "q", "tolerance", "depth", "seed"}


def test_eval_fusion_diagonal(capsys):
    for target in ("fusion", "fusion_inv"):
        code, rep, _ = report(capsys, "eval", target, "delta=-4", "gamma=-3", "s=3", "lam=-25")
        assert code == 0
        table = rep["cases"][0]["table"]
        assert [table[i][i] for i in range(4)] == ["1"] * 4
        assert all(table[m][n] == "0" for m in range(4) for n in range(m))


def test_eval_exchange_s_zero(capsys):
    code, rep, _ = report(capsys, "eval", "exchange", "gamma=-3", "delta=-4", "s=0", "lam=-9")
    assert code == 0
    assert rep["cases"][0]["table"] == [["v^(12)"]]


def test_eval_numeric_values_are_floats_in_full_precision(capsys):
    code, rep, _ = report(capsys, "eval", "q3j", "j1=1/2", "j2=1/2", "j=1", "m1=1/2", "m2=1/2",
                          "--mode", "numeric")
    assert code == 0
    assert float(rep["cases"][0]["value"]) == pytest.approx(1.0)


@pytest.mark.parametrize("argv", [
    ("eval", "sixj", "j1=1/2", "j2=1/2", "j3=1/2", "j=1/2", "j12=0", "j13=0", "--mode", "numeric"),
    ("eval", "racah_w", "j1=1/2", "j2=1/2", "j3=1/2", "j=1/2", "j12=1", "j13=1", "--mode", "numeric"),
    ("eval", "sixj", "a=1/2", "b=1/2", "c=0", "d=1/2", "e=1/2", "f=0", "--mode", "numeric"),
    ("eval", "q_hahn", "n=1", "x=1", "a=2", "b=3", "N=4"),
    ("eval", "q_racah", "m=1", "n=1", "lam=-7", "gamma=-3", "delta=-4", "s=2"),
    ("eval", "cgc", "mu=-5", "gamma=-6", "N=2", "method=direct"),
])
def test_eval_targets(capsys, argv):
    code, rep, _ = report(capsys, *argv)
    assert code == 0 and rep["cases"]


def test_eval_errors_exit_2(capsys):
    code, out, err = run(capsys, "eval", "fusion", "delta=-4", "gamma=-3", "s=2", "lam=1")
    assert code == 2 and not out and "nonnegative integer" in err
    assert run(capsys, "eval", "cgc", "mu=-5")[0] == 2
    assert run(capsys, "eval", "nosuch")[0] == 2
    assert run(capsys, "eval", "cgc", "--mode", "fuzzy")[0] == 2


# --- verify --------------------------------------------------------------------------------

def test_verify_orthogonality_numeric(capsys):
    code, rep, _ = report(capsys, "verify", "orthogonality", "--mode", "numeric", "--q", "0.3", "--tol", "1e-9")
    assert code == 0
    s = rep["summary"]
    assert s["failed"] == 0 and s["passed"] == s["cases"] > 0
    assert 0 <= float(s["max_residual"]) < 1e-9


def test_verify_exact_reports_exact_zero(capsys):
    code, rep, _ = report(capsys, "verify", "fusion_inverse")
    assert code == 0
    assert all(c["exact_zero"] and c["ok"] for c in rep["cases"])


def test_verify_failure_exit_1(capsys):
    code, rep, err = report(capsys, "verify", "orthogonality", "--mode", "numeric", "--tol", "1e-30")
    assert code == 1
    assert rep["summary"]["failed"] > 0 and "failed" in err
    assert any("worst" in c for c in rep["cases"] if not c["ok"])


def test_verify_constraint_exit_2(capsys):
    code, out, err = run(capsys, "verify", "qdybe_verma", "lam=-3", "gamma=-3")
    assert code == 2 and "nonnegative integer" in err


def test_verify_with_params(capsys):
    code, rep, _ = report(capsys, "verify", "exchange_agree", "gamma=-3", "delta=-4", "lam=-25", "s=2")
    assert code == 0 and rep["summary"]["cases"] == 1


def test_unknown_identity_exit_2(capsys):
    assert run(capsys, "verify", "nosuch")[0] == 2
    assert run(capsys, "verify")[0] == 2


# --- sweep ----------------------------------------------------------------------------------

def test_sweep_exchange_agree(capsys):
    code, rep, _ = report(capsys, "sweep", "exchange_agree", "--samples", "20", "s=4", "--seed", "3")
    assert code == 0 and rep["summary"]["cases"] == 20


def test_sweep_zero_samples(capsys):
    code, rep, _ = report(capsys, "sweep", "cocycle", "--samples", "0")
    assert code == 0
    assert rep["cases"] == [] and rep["summary"]["cases"] == 0


def test_sweep_determinism(capsys):
    argv = ("sweep", "fusion_inverse", "--samples", "5", "--seed", "11")
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]
    assert first != run(capsys, "sweep", "fusion_inverse", "--samples", "5", "--seed", "12")[1]


def test_sweep_workers_match_serial(capsys):
    argv = ("sweep", "fusion_inverse", "--samples", "4", "--seed", "5")
    assert run(capsys, *argv)[1] == run(capsys, *argv, "--workers", "2")[1]


def test_sweep_range_override(capsys):
    code, rep, _ = report(capsys, "sweep", "fusion_inverse", "--samples", "3", "s=1:2")
    assert code == 0
    assert all(1 <= c["params"]["s"] <= 2 for c in rep["cases"])


# --- output and configuration ----------------------------------------------------------------

def test_csv_output(capsys):
    code, out, _ = run(capsys, "verify", "sb_inverse", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["identity"] == "sb_inverse" for r in rows)


def test_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "er5", "--mode", "numeric", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["summary"]["failed"] == 0


def test_timings_opt_in(capsys):
    _, rep, _ = report(capsys, "verify", "sb_inverse")
    assert all("elapsed" not in c for c in rep["cases"])
    _, rep, _ = report(capsys, "verify", "sb_inverse", "--timings")
    assert all(c["elapsed"] >= 0 for c in rep["cases"])


def test_env_overrides(capsys, monkeypatch):
    monkeypatch.setenv("UQSL2_MODE", "numeric")
    monkeypatch.setenv("UQSL2_Q", "0.5")
    _, rep, _ = report(capsys, "verify", "sb_inverse")
    assert rep["meta"]["mode"] == "numeric" and rep["meta"]["q"] == 0.5
    # explicit flags win over the environment
    _, rep, _ = report(capsys, "verify", "sb_inverse", "--mode", "exact")
    assert rep["meta"]["mode"] == "exact"
    monkeypatch.setenv("UQSL2_DEPTH", "deep")
    assert run(capsys, "verify", "sb_inverse")[0] == 2


def test_bad_configuration(capsys):
    assert run(capsys, "verify", "sb_inverse", "--q", "1.5", "--mode", "numeric")[0] == 2
    assert run(capsys, "verify", "sb_inverse", "--tol", "-1")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "uqsl2", "eval", "exchange", "gamma=-3", "delta=-4",
                           "s=0", "lam=-9"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["cases"][0]["table"] == [["v^(12)"]]
