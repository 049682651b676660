"""Distance between the law of ``U_N / ln N`` and the unit exponential.

``U_N / ln N`` lives on the lattice ``{u / ln N}``, so its CDF is a step
function. Against the continuous CDF ``1 - e^-x`` the supremum gap is
attained at a jump, on one side or the other; :func:`ks_exp1_pmf` checks
both sides of every jump.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from . import exact, montecarlo
from .errors import CouponBrotherError

EXACT_SWEEP_CAP = 200


class Source(enum.Enum):
    EXACT = "exact"
    MONTE_CARLO = "montecarlo"


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    source: Source
    mean_over_lnn: float
    var_over_lnn2: float
    ks_to_exp1: float
    reps: int | None = None
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _log_n(n: int) -> float:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2 (ln n > 0), got {n!r}")
    return math.log(n)


def _exp_cdf(x: np.ndarray) -> np.ndarray:
    return -np.expm1(-x)


def ks_exp1_pmf(probs, n: int) -> float:
    """KS distance from Exp(1) of ``U / ln n`` when ``P(U = u) = probs[u]``.

    ``probs`` may be floats or exact rationals; rationals are accumulated
    exactly before conversion.
    """
    ln = _log_n(n)
    probs = list(probs) if not isinstance(probs, np.ndarray) else probs
    if len(probs) < 2:
        raise ValueError("need probabilities for u = 0..n")
    if isinstance(probs, np.ndarray):
        cdf = np.cumsum(np.asarray(probs, dtype=float))
    else:
        acc = mpq(0)
        cum = []
        for p in probs:
            acc += mpq(p)
            cum.append(float(acc))
        cdf = np.array(cum)
    u = np.arange(len(cdf))
    jumps = np.flatnonzero(np.diff(np.concatenate([[0.0], cdf])) != 0)
    if jumps.size == 0:
        raise ValueError("distribution has no mass")
    x = u[jumps] / ln
    g = _exp_cdf(x)
    right = cdf[jumps]
    left = np.concatenate([[0.0], cdf])[jumps]
    gap = max(float(np.max(np.abs(right - g))), float(np.max(np.abs(left - g))))
    # past the last jump the step CDF sits at its final value
    gap = max(gap, abs(1.0 - float(cdf[-1])))
    return min(gap, 1.0)


def ks_exp1_normalized(values: Sequence[float]) -> float:
    """Sorted-sample KS distance of already-normalized values from Exp(1)."""
    x = np.sort(np.asarray(values, dtype=float))
    m = x.size
    if m == 0:
        raise ValueError("need at least one sample")
    g = _exp_cdf(x)
    i = np.arange(1, m + 1)
    d_plus = np.max(i / m - g)
    d_minus = np.max(g - (i - 1) / m)
    return float(max(d_plus, d_minus))


def ks_exp1_samples(samples: Sequence[float], n: int) -> float:
    """KS distance from Exp(1) of the empirical law of ``samples / ln n``."""
    ln = _log_n(n)
    return ks_exp1_normalized(np.asarray(samples, dtype=float) / ln)


def ks_exp1(data, n: int) -> float:
    """Dispatch on the input: an :class:`~coupon_brother.exact.ExactPmf`, a
    :class:`~coupon_brother.montecarlo.SimBatch` (its histogram is an
    empirical PMF), or raw samples of ``U``."""
    if isinstance(data, exact.ExactPmf):
        return ks_exp1_pmf(data.probs, n)
    if isinstance(data, montecarlo.SimBatch):
        return ks_exp1_pmf(data.empirical_pmf(), n)
    return ks_exp1_samples(data, n)


def _exact_row(n: int, exact_cap: int) -> ConvergenceRow:
    ln = math.log(n)
    if n <= exact_cap:
        pmf = exact.pmf_dp(n)
        rep = exact.moments(pmf)
        return ConvergenceRow(
            n=n,
            source=Source.EXACT,
            mean_over_lnn=float(rep.mean) / ln,
            var_over_lnn2=float(rep.variance) / ln**2,
            ks_to_exp1=ks_exp1_pmf(pmf.probs, n),
        )
    probs = exact.pmf_dp_float(n)
    u = np.arange(n + 1, dtype=float)
    mean = math.fsum(u * probs)
    var = math.fsum((u - mean) ** 2 * probs)
    return ConvergenceRow(
        n=n,
        source=Source.EXACT,
        mean_over_lnn=mean / ln,
        var_over_lnn2=var / ln**2,
        ks_to_exp1=ks_exp1_pmf(probs, n),
    )


def _mc_row(n: int, reps: int, seed: int, workers: int) -> ConvergenceRow:
    ln = math.log(n)
    batch = montecarlo.run_batch(montecarlo.SimConfig(n=n, reps=reps, seed=seed, workers=workers))
    return ConvergenceRow(
        n=n,
        source=Source.MONTE_CARLO,
        mean_over_lnn=batch.mean / ln,
        var_over_lnn2=batch.variance / ln**2,
        ks_to_exp1=ks_exp1_pmf(batch.empirical_pmf(), n),
        reps=reps,
    )


def sweep(
    n_list: Sequence[int],
    source: Source | str = Source.EXACT,
    reps: int | None = None,
    seed: int | None = None,
    workers: int = 1,
    exact_cap: int = EXACT_SWEEP_CAP,
) -> list[ConvergenceRow]:
    """One :class:`ConvergenceRow` per ``n``, in input order.

    The exact source uses rational PMFs up to ``exact_cap`` and the float DP
    above it. A row whose computation fails carries ``status`` set to the
    error message and NaN statistics; the remaining rows are still computed.
    """
    source = Source(source)
    n_list = [int(n) for n in n_list]
    for n in n_list:
        _log_n(n)
    if any(a > b for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be sorted ascending")
    if source is Source.MONTE_CARLO and (reps is None or seed is None):
        raise ValueError("the Monte Carlo source needs reps and seed")

    rows = []
    for n in n_list:
        try:
            if source is Source.EXACT:
                rows.append(_exact_row(n, exact_cap))
            else:
                rows.append(_mc_row(n, reps, seed, workers))
        except CouponBrotherError as exc:
            nan = float("nan")
            rows.append(ConvergenceRow(n, source, nan, nan, nan, reps, status=f"{type(exc).__name__}: {exc}"))
    return rows
