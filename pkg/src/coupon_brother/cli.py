"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 resource limit, 4 numerical
non-convergence. Exact rationals are written as ``p/q`` strings.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import analytic, convergence, exact, montecarlo
from .errors import ConsistencyError, QuadratureBudgetError, ResourceLimitError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_NUMERICAL = 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class OutputFormat:
    kind: str = "csv"
    precision: int = 12
    exact: bool = False

    def __post_init__(self):
        if self.kind not in ("csv", "json"):
            raise UsageError(f"unknown format {self.kind!r}")
        if not 1 <= self.precision <= 17:
            raise UsageError(f"--precision must lie in [1, 17], got {self.precision}")

    def real(self, x: float) -> float:
        """Round to the declared number of significant digits."""
        x = float(x)
        if not math.isfinite(x):
            return x
        return float(f"{x:.{self.precision}g}")

    def text(self, x: float) -> str:
        return repr(self.real(x))

    def rational(self, q) -> str:
        return str(q) if self.exact else self.text(float(q))


def _complex_json(z: complex, fmt: OutputFormat) -> dict:
    return {"re": fmt.real(z.real), "im": fmt.real(z.imag)}


def _write_csv(out, header, rows):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _dump_json(out, obj):
    json.dump(obj, out, indent=2)
    out.write("\n")


def cmd_exact(args, fmt: OutputFormat, out):
    if args.method == "pgf":
        pmf = exact.pmf_from_pgf(exact.pgf_foata(args.n, cap=args.cap or exact.PGF_CAP))
    else:
        pmf = exact.pmf_dp(args.n, cap=args.cap or exact.DP_EXACT_CAP)
    rows = [(u, fmt.rational(pmf.probs[u])) for u in range(1, pmf.n + 1)]
    if fmt.kind == "csv":
        _write_csv(out, ["u", "probability"], rows)
    else:
        _dump_json(out, {"n": pmf.n, "pmf": [{"u": u, "probability": p} for u, p in rows]})


def cmd_moments(args, fmt: OutputFormat, out):
    rep = exact.moments(exact.pmf_dp(args.n))
    record = {
        "n": rep.n,
        "mean": str(rep.mean),
        "variance": str(rep.variance),
        "harmonic": str(rep.harmonic),
        "formula_variance": str(rep.formula_variance),
        "checks_passed": rep.checks_passed,
    }
    if fmt.kind == "json":
        _dump_json(out, record)
    else:
        _write_csv(out, ["key", "value"], [(k, str(v).lower() if isinstance(v, bool) else v) for k, v in record.items()])
    return EXIT_OK if rep.checks_passed else EXIT_NUMERICAL


def _t_grid(t_min: float, t_max: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise UsageError("--t-steps must be >= 1")
    if steps == 1:
        if t_min != t_max:
            raise UsageError("--t-steps 1 needs --t-min == --t-max")
        return np.array([t_min])
    if t_max < t_min:
        raise UsageError("--t-max must be >= --t-min")
    return np.linspace(t_min, t_max, steps)


def cmd_cf(args, fmt: OutputFormat, out):
    ts = _t_grid(args.t_min, args.t_max, args.t_steps)
    if args.method == "pmf":
        samples = analytic.cf_from_pmf(args.n, ts)
    else:
        samples = [analytic.cf(args.n, t, args.tol, analytic.CfMethod.INTEGRAL) for t in ts]
    rows = [
        (fmt.text(s.t), fmt.text(s.value.real), fmt.text(s.value.imag), fmt.text(s.error_estimate), s.method.value)
        for s in samples
    ]
    if fmt.kind == "csv":
        _write_csv(out, ["t", "re", "im", "abs_error", "method"], rows)
    else:
        _dump_json(
            out,
            {
                "n": args.n,
                "samples": [
                    {"t": float(r[0]), "re": float(r[1]), "im": float(r[2]), "abs_error": float(r[3]), "method": r[4]}
                    for r in rows
                ],
            },
        )


def cmd_simulate(args, fmt: OutputFormat, out):
    config = montecarlo.SimConfig(n=args.n, reps=args.reps, seed=args.seed, workers=args.workers, record_t=True)
    batch = montecarlo.run_batch(config)
    summary = {
        "n": args.n,
        "reps": args.reps,
        "seed": args.seed,
        "mean": fmt.real(batch.mean),
        "var": fmt.real(batch.variance),
        "mean_t": fmt.real(batch.t_mean),
    }
    hist = batch.histogram()
    if fmt.kind == "csv":
        _write_csv(out, ["u", "count"], sorted(hist.items()))
        json.dump(summary, sys.stderr)
        sys.stderr.write("\n")
    else:
        _dump_json(out, {"summary": summary, "histogram": [{"u": u, "count": c} for u, c in sorted(hist.items())]})


def cmd_converge(args, fmt: OutputFormat, out):
    n_list = sorted(args.n_list)
    if args.source == "montecarlo" and args.seed is None:
        raise UsageError("--seed is required for --source montecarlo")
    rows = convergence.sweep(
        n_list, args.source, reps=args.reps, seed=args.seed, workers=args.workers, exact_cap=args.exact_cap
    )
    table = [
        (
            r.n,
            r.source.value,
            fmt.text(r.mean_over_lnn),
            fmt.text(r.var_over_lnn2),
            fmt.text(r.ks_to_exp1),
            "" if r.reps is None else r.reps,
        )
        for r in rows
    ]
    if fmt.kind == "csv":
        _write_csv(out, ["n", "source", "mean_over_lnn", "var_over_lnn2", "ks_to_exp1", "reps"], table)
    else:
        _dump_json(
            out,
            [
                {
                    "n": r.n,
                    "source": r.source.value,
                    "mean_over_lnn": fmt.real(r.mean_over_lnn),
                    "var_over_lnn2": fmt.real(r.var_over_lnn2),
                    "ks_to_exp1": fmt.real(r.ks_to_exp1),
                    "reps": r.reps,
                    "status": r.status,
                }
                for r in rows
            ],
        )
    failed = [r for r in rows if not r.ok]
    for r in failed:
        print(f"coupon-brother: n={r.n}: {r.status}", file=sys.stderr)
    if any(r.status.startswith(ResourceLimitError.__name__) for r in failed):
        return EXIT_RESOURCE
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_proofcheck(args, fmt: OutputFormat, out):
    d = analytic.proof_decomposition(args.n, args.t, args.eps, args.tol)
    record = {
        "n": d.n,
        "t": d.t,
        "eps": d.epsilon,
        "i1": _complex_json(d.i1, fmt),
        "i2": _complex_json(d.i2, fmt),
        "i3": _complex_json(d.i3, fmt),
        "reconstructed_cf": _complex_json(d.reconstructed_cf, fmt),
        "direct_cf": _complex_json(d.direct_cf, fmt),
        "i3_limit": _complex_json(d.i3_limit, fmt),
        "residual": fmt.real(d.residual),
        "error_estimate": fmt.real(d.error_estimate),
    }
    if fmt.kind == "json":
        _dump_json(out, record)
    else:
        flat = []
        for k, v in record.items():
            if isinstance(v, dict):
                flat += [(f"{k}_re", v["re"]), (f"{k}_im", v["im"])]
            else:
                flat.append((k, v))
        _write_csv(out, ["key", "value"], flat)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--precision", type=int, default=12, help="significant digits for floats (1-17)")
    common.add_argument("--exact", action="store_true", help="write rationals as p/q strings")
    common.add_argument("--out", default="-", help="output path (default: stdout)")

    parser = argparse.ArgumentParser(
        prog="coupon-brother",
        description="Exact and simulated law of the brother's empty slots in the coupon collector problem.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="PMF of U_N")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--method", choices=("pgf", "dp"), default="dp")
    p.add_argument("--cap", type=_positive_int, default=None, help="override the size cap of the method")
    p.set_defaults(func=cmd_exact, default_format="csv")

    p = sub.add_parser("moments", parents=[common], help="exact mean and variance with closed-form checks")
    p.add_argument("--n", type=_positive_int, required=True)
    p.set_defaults(func=cmd_moments, default_format="json")

    p = sub.add_parser("cf", parents=[common], help="characteristic function of U_N / ln N on a t grid")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--t-steps", type=int, default=11)
    p.add_argument("--method", choices=("integral", "pmf"), default="integral")
    p.add_argument("--tol", type=float, default=analytic.TOL_COMPLEX)
    p.set_defaults(func=cmd_cf, default_format="csv")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo histogram of U_N")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--reps", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_simulate, default_format="csv")

    p = sub.add_parser("converge", parents=[common], help="distance of U_N / ln N from Exp(1) across n")
    p.add_argument("--n-list", type=int, nargs="+", required=True)
    p.add_argument("--source", choices=("exact", "montecarlo"), default="exact")
    p.add_argument("--reps", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--exact-cap", type=int, default=convergence.EXACT_SWEEP_CAP)
    p.set_defaults(func=cmd_converge, default_format="csv")

    p = sub.add_parser("proofcheck", parents=[common], help="I1/I2/I3 split of the characteristic function")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--tol", type=float, default=analytic.TOL_COMPLEX)
    p.set_defaults(func=cmd_proofcheck, default_format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        fmt = OutputFormat(args.format or args.default_format, args.precision, args.exact)
        code = args.func(args, fmt, buf) or EXIT_OK
    except (UsageError, ValueError) as exc:
        print(f"coupon-brother: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"coupon-brother: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (QuadratureBudgetError, ConsistencyError) as exc:
        print(f"coupon-brother: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
