import csv
import io
import json
import math

import pytest

from oscint import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# ---------------------------------------------------------------- parsing


def test_parse_range():
    assert cli.parse_range("-1:1:3") == [-1.0, 0.0, 1.0]
    assert cli.parse_range("2.5") == [2.5]
    for bad in ("1:2", "1:0:3", "a:b:3", "0:1:0"):
        with pytest.raises(cli.UsageError):
            cli.parse_range(bad)


def test_parse_k():
    assert cli.parse_k("3") == [3]
    assert cli.parse_k("1..4") == [1, 2, 3, 4]
    for bad in ("0", "4..2", "x"):
        with pytest.raises(cli.UsageError):
            cli.parse_k(bad)


def test_default_tol_env(monkeypatch):
    monkeypatch.delenv("OSCINT_DEFAULT_TOL", raising=False)
    assert cli.default_tol() == cli.FALLBACK_TOL
    monkeypatch.setenv("OSCINT_DEFAULT_TOL", "1e-5")
    assert cli.default_tol() == 1e-5
    monkeypatch.setenv("OSCINT_DEFAULT_TOL", "nope")
    with pytest.raises(cli.UsageError):
        cli.default_tol()


# ------------------------------------------------------------------- eval


def test_eval_crossing_row(capsys):
    code, out, _ = run(capsys, "eval", "--k", "1", "--tau", "0")
    assert code == 0
    (row,) = rows(out)
    assert out.splitlines()[0] == "k,tau,value,method,err_estimate"
    assert row["k"] == "1" and row["method"] == "closed_form"
    assert float(row["value"]) == pytest.approx(math.pi / 8, rel=1e-12)
    assert f"{float(row['value']):.10f}" == "0.3926990817"


def test_eval_grid_shape(capsys):
    code, out, _ = run(capsys, "eval", "--k", "1..5", "--tau", "-6:10:321")
    assert code == 0
    table = rows(out)
    assert len(table) == 5 * 321
    assert {r["k"] for r in table} == {"1", "2", "3", "4", "5"}


def test_eval_with_oracle(capsys):
    code, out, _ = run(capsys, "eval", "--k", "2", "--tau", "3", "--oracle")
    assert code == 0
    closed, ode = rows(out)
    assert (closed["method"], ode["method"]) == ("closed_form", "ode")
    assert float(closed["value"]) == pytest.approx(float(ode["value"]), abs=1e-6)


def test_eval_j1_with_oracle(capsys):
    code, out, _ = run(capsys, "eval", "--quantity", "J", "--tau", "-2:4:4", "--oracle")
    assert code == 0
    table = rows(out)
    closed = [float(r["value"]) for r in table if r["method"] == "closed_form"]
    ode = [float(r["value"]) for r in table if r["method"] == "ode"]
    assert closed == pytest.approx(ode, abs=1e-6)


@pytest.mark.parametrize("argv", [
    ["eval", "--k", "0", "--tau", "0"],
    ["eval", "--tau", "1:2"],
    ["eval", "--k", "2", "--tau", "0", "--quantity", "J"],
    ["eval", "--tau", "0", "--bogus"],
    ["figdata", "--fig", "nope"],
    ["verify", "--suite", "limits", "--tol", "-1"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and err


def test_eval_writes_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "eval", "--tau", "0:1:3", "--out", str(path))
    assert code == 0 and out == ""
    assert len(rows(path.read_text())) == 3


# ----------------------------------------------------------------- coeffs


def test_coeffs_text_k3(capsys):
    code, out, _ = run(capsys, "coeffs", "--k", "3", "--format", "text")
    assert code == 0 and "7π²/4" in out


def test_coeffs_structured_k1(capsys):
    code, out, _ = run(capsys, "coeffs", "--k", "1", "--format", "structured")
    doc = json.loads(out)
    assert code == 0
    assert doc["prefactor"] == "1/4"
    assert doc["terms"] == [{"a": 0, "coeff": "1", "kind": "Abs2"}]


def test_coeffs_k6_passes_cancellation(capsys):
    code, out, _ = run(capsys, "coeffs", "--k", "6", "--format", "structured")
    assert code == 0
    assert json.loads(out)["k"] == 6


def test_coeffs_csv(capsys):
    code, out, _ = run(capsys, "coeffs", "--k", "1..2", "--format", "csv")
    table = rows(out)
    assert code == 0
    assert [r["k"] for r in table] == ["1", "2", "2"]


# ----------------------------------------------------------------- verify


def test_verify_derivatives_structured(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "derivatives", "--format", "structured")
    doc = json.loads(out)
    assert code == 0
    assert doc["suite"] == "derivatives"
    assert [r["id"] for r in doc["results"]] == ["d1_modsq", "d2_modsq"]
    assert all(set(r) == {"id", "residual", "pass"} and r["pass"] for r in doc["results"])


def test_verify_text_table(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "derivatives", "--tau", "-1:1:3")
    assert code == 0
    assert out.count("PASS") == 2


def test_verify_failure_exits_1(capsys, monkeypatch):
    monkeypatch.setenv("OSCINT_DEFAULT_TOL", "1e-30")
    code, out, err = run(capsys, "verify", "--suite", "routes", "--tau", "-1:1:3")
    assert code == 1
    assert "FAIL" in out and "failed:" in err


def test_verify_routes_pass(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "routes", "--tau", "-2:4:7", "--format", "structured")
    assert code == 0, out
    assert {r["id"] for r in json.loads(out)["results"]} >= {"ode_k1", "ode_k5", "j1_ode"}


# ---------------------------------------------------------------- figdata


@pytest.mark.parametrize("fig,extra,header", [
    ("z-trajectory", ["--tau", "-10:20:600"], "tau,I1,J1"),
    ("ik", ["--k", "1..2", "--tau", "-1:1:5"], "k,tau,value,k_factorial_scaled"),
    ("fresnel-circle", ["--tau", "-1:1:5"], "tau,half_plus_C,half_plus_S,modsq_D"),
    ("i1-j1", ["--tau", "-1:1:5"], "tau,I1_closed,I1_ode,J1_closed,J1_ode"),
    ("derivatives", ["--tau", "-1:1:3"], "tau,d1_closed,d1_fd,d2_closed,d2_fd"),
])
def test_figdata_headers(capsys, fig, extra, header):
    code, out, _ = run(capsys, "figdata", "--fig", fig, *extra)
    assert code == 0
    assert out.splitlines()[0] == header


def test_figdata_z_trajectory_shape(capsys):
    _, out, _ = run(capsys, "figdata", "--fig", "z-trajectory", "--tau", "-10:20:600")
    assert len(rows(out)) == 600


def test_figdata_ik_scaling(capsys):
    _, out, _ = run(capsys, "figdata", "--fig", "ik", "--k", "3", "--tau", "0")
    (row,) = rows(out)
    assert float(row["k_factorial_scaled"]) == pytest.approx(6 * float(row["value"]), rel=1e-15)


def test_figdata_spectrum_minima(capsys):
    code, out, _ = run(capsys, "figdata", "--fig", "spectrum")
    v = [float(r["modulus"]) for r in rows(out)]
    peak = max(v)
    minima = [i for i in range(1, len(v) - 1) if v[i] < v[i - 1] and v[i] < v[i + 1] and v[i] < 0.05 * peak]
    assert code == 0 and len(minima) >= 3


def test_output_is_deterministic(capsys):
    argv = ["figdata", "--fig", "i1-j1", "--tau", "-2:2:9"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
