import csv
import io
import json

import pytest

from coupon_brother.cli import OutputFormat, UsageError, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exact_dp_rational(capsys):
    code, out, _ = run(capsys, "exact", "--n", "2", "--method", "dp", "--exact")
    assert code == 0
    assert out.splitlines() == ["u,probability", "1,1/2", "2,1/2"]


def test_exact_pgf_n1(capsys):
    code, out, _ = run(capsys, "exact", "--n", "1", "--method", "pgf")
    assert out.splitlines() == ["u,probability", "1,1.0"]


@pytest.mark.parametrize("extra", [[], ["--exact"], ["--format", "json", "--exact"]])
def test_exact_methods_byte_identical(capsys, extra):
    _, a, _ = run(capsys, "exact", "--n", "5", "--method", "pgf", *extra)
    _, b, _ = run(capsys, "exact", "--n", "5", "--method", "dp", *extra)
    assert a == b


def test_exact_cap_exit_code(capsys):
    code, out, err = run(capsys, "exact", "--n", "300", "--method", "pgf")
    assert code == 3 and out == "" and "200" in err
    code, _, _ = run(capsys, "exact", "--n", "12", "--method", "pgf", "--cap", "11")
    assert code == 3


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["exact", "--n", "0"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2
    code, _, _ = run(capsys, "exact", "--n", "3", "--precision", "30")
    assert code == 2
    code, _, _ = run(capsys, "cf", "--n", "1", "--t-min", "1", "--t-max", "1", "--t-steps", "1")
    assert code == 2


def test_moments(capsys):
    code, out, _ = run(capsys, "moments", "--n", "2")
    rec = json.loads(out)
    assert code == 0
    assert rec["mean"] == "3/2" and rec["variance"] == "1/4" and rec["checks_passed"] is True
    _, out, _ = run(capsys, "moments", "--n", "1")
    assert json.loads(out)["variance"] == "0"
    _, out, _ = run(capsys, "moments", "--n", "50")
    assert json.loads(out)["checks_passed"] is True


def test_cf_grid_and_methods(capsys):
    code, out, _ = run(capsys, "cf", "--n", "50", "--t-min", "-2", "--t-max", "2", "--t-steps", "5", "--tol", "1e-8")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["t", "re", "im", "abs_error", "method"]
    zero = [r for r in rows if float(r["t"]) == 0][0]
    assert float(zero["re"]) == 1 and float(zero["im"]) == 0
    _, out2, _ = run(capsys, "cf", "--n", "50", "--t-min", "-2", "--t-max", "2", "--t-steps", "5", "--method", "pmf")
    rows2 = list(csv.DictReader(io.StringIO(out2)))
    for a, b in zip(rows, rows2):
        assert abs(complex(float(a["re"]), float(a["im"])) - complex(float(b["re"]), float(b["im"]))) < 1e-7


def test_cf_large_n_trend(capsys):
    gaps = []
    for n in ("100", "1000", "10000"):
        _, out, _ = run(capsys, "cf", "--n", n, "--t-min", "1", "--t-max", "1", "--t-steps", "1", "--method", "pmf", "--format", "json")
        s = json.loads(out)["samples"][0]
        gaps.append(abs(complex(s["re"], s["im"]) - 1 / (1 - 1j)))
    assert gaps[0] > gaps[1] > gaps[2]


def test_simulate_deterministic_across_workers(capsys, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    code, _, err_a = run(capsys, "simulate", "--n", "40", "--reps", "5000", "--seed", "9", "--out", str(a))
    assert code == 0
    _, _, err_b = run(capsys, "simulate", "--n", "40", "--reps", "5000", "--seed", "9", "--workers", "4", "--out", str(b))
    assert a.read_text() == b.read_text()
    assert a.read_text().splitlines()[0] == "u,count"
    summary = json.loads(err_a)
    assert summary == json.loads(err_b)
    assert set(summary) >= {"mean", "var", "reps", "seed"}


def test_simulate_json(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "2", "--reps", "1000", "--seed", "1", "--format", "json")
    rec = json.loads(out)
    assert sum(r["count"] for r in rec["histogram"]) == 1000
    assert rec["summary"]["reps"] == 1000


def test_simulate_requires_seed():
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--n", "5", "--reps", "10"])
    assert info.value.code == 2


def test_converge(capsys):
    code, out, _ = run(capsys, "converge", "--n-list", "2", "100")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert list(rows[0]) == ["n", "source", "mean_over_lnn", "var_over_lnn2", "ks_to_exp1", "reps"]
    assert float(rows[0]["mean_over_lnn"]) == pytest.approx(2.164042561333, abs=1e-11)
    code, _, _ = run(capsys, "converge", "--n-list", "10", "--source", "montecarlo")
    assert code == 2
    code, out, _ = run(capsys, "converge", "--n-list", "10", "--source", "montecarlo", "--seed", "5", "--reps", "2000")
    assert code == 0 and out.splitlines()[1].startswith("10,montecarlo,")


def test_converge_partial_failure(capsys):
    code, out, err = run(capsys, "converge", "--n-list", "10", "200000")
    assert code == 3
    assert len(out.splitlines()) == 3 and "n=200000" in err


def test_proofcheck(capsys):
    code, out, _ = run(capsys, "proofcheck", "--n", "100", "--t", "1", "--eps", "0.25")
    rec = json.loads(out)
    assert code == 0
    assert set(rec) >= {"i1", "i2", "i3", "reconstructed_cf", "direct_cf", "i3_limit", "residual"}
    assert rec["residual"] < 1e-6
    code, _, _ = run(capsys, "proofcheck", "--n", "100", "--t", "0")
    assert code == 2


def test_quadrature_budget_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("COUPON_BROTHER_MAX_EVALS", "60")
    code, _, err = run(capsys, "cf", "--n", "100", "--t-min", "1", "--t-max", "3", "--t-steps", "2", "--tol", "1e-12")
    assert code == 4 and "numerical" in err


def test_deterministic_output(capsys):
    argv = ["converge", "--n-list", "10", "30", "--source", "montecarlo", "--seed", "3", "--reps", "3000"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


@pytest.mark.parametrize("precision", [1, 5, 12, 17])
def test_csv_round_trip(precision):
    fmt = OutputFormat("csv", precision)
    for x in (0.1, 1 / 3, 2.164042561333445, 1e-300, -7.25e12, 1.0):
        text = fmt.text(x)
        assert fmt.real(float(text)) == fmt.real(x)
        assert float(text) == fmt.real(x)


def test_output_format_validation():
    with pytest.raises(UsageError):
        OutputFormat("xml")
    with pytest.raises(UsageError):
        OutputFormat("csv", 0)
