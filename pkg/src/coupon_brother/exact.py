"""Exact finite-N law of U_N, the brother's empty slots when the collector finishes.

Two independent routes produce the PMF:

* :func:`pgf_foata` sums the trinomial formula for the generating function
  ``G_N(s) = E[s**U_N]`` with exact rationals, and :func:`pmf_from_pgf`
  reads the probabilities off its coefficients;
* :func:`pmf_dp` runs the two-sibling process as an absorbing Markov chain
  on ``(g, b)`` = (distinct types the collector owns, distinct types the
  brother owns).

All rationals are ``gmpy2.mpq`` (always in lowest terms).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numba
import numpy as np
from gmpy2 import mpq, mpz

from .errors import ConsistencyError, ResourceLimitError
from .polynomial import Basis, ShiftedPoly

PGF_CAP = 200
DP_EXACT_CAP = 2000
DP_FLOAT_CAP = 100_000


def _check_n(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


@functools.lru_cache(maxsize=64)
def harmonic(n: int) -> mpq:
    """Return ``H_n = 1 + 1/2 + ... + 1/n`` exactly."""
    n = _check_n(n)
    # sum over a common denominator; one normalization at the end
    den = math.lcm(*range(1, n + 1))
    return mpq(sum(den // m for m in range(1, n + 1)), den)


def harmonic_variance(n: int) -> mpq:
    """Closed form ``4 (H_1 + H_2/2 + ... + H_n/n) - 3 H_n - H_n**2``."""
    n = _check_n(n)
    h = mpq(0)
    weighted = mpq(0)
    for m in range(1, n + 1):
        h += mpq(1, m)
        weighted += h / m
    return 4 * weighted - 3 * h - h * h


@dataclass(frozen=True)
class ExactPmf:
    """PMF of U_N over ``u = 0..n`` as exact rationals.

    Construction checks the support and normalization and raises
    :class:`ConsistencyError` if they fail.
    """

    n: int
    probs: tuple

    def __post_init__(self):
        _check_n(self.n)
        probs = tuple(mpq(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) != self.n + 1:
            raise ConsistencyError(f"expected {self.n + 1} entries, got {len(probs)}")
        if probs[0] != 0:
            raise ConsistencyError(f"P(U=0) must be 0, got {probs[0]}")
        bad = [u for u in range(1, self.n + 1) if probs[u] <= 0]
        if bad:
            raise ConsistencyError(f"nonpositive probability at u={bad[0]}: {probs[bad[0]]}")
        total = sum(probs, mpq(0))
        if total != 1:
            raise ConsistencyError(f"probabilities sum to {total}, not 1")

    def to_float(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])


@dataclass(frozen=True)
class MomentReport:
    n: int
    mean: mpq
    variance: mpq
    harmonic: mpq
    formula_variance: mpq

    @property
    def checks_passed(self) -> bool:
        return self.mean == self.harmonic and self.variance == self.formula_variance

    def verify(self) -> "MomentReport":
        if self.mean != self.harmonic:
            raise ConsistencyError(f"n={self.n}: mean {self.mean} != H_n {self.harmonic}")
        if self.variance != self.formula_variance:
            raise ConsistencyError(
                f"n={self.n}: variance {self.variance} != closed form {self.formula_variance}"
            )
        return self


def pgf_foata(n: int, cap: int = PGF_CAP) -> ShiftedPoly:
    """Generating function of U_N from the trinomial sum.

    ``G_N(s) = s * sum_{k+l+m=N-1} (N-1)!/(k! l! m!) (-1)^l N (s-1)^m m! / (N-k)^(m+1)``

    Each term is a single monomial in ``(s - 1)``, so the sum is accumulated
    in that basis and converted once at the end. Only exact arithmetic is
    offered: the alternating sum cancels catastrophically in floating point.
    """
    n = _check_n(n)
    if n > cap:
        raise ResourceLimitError(f"pgf_foata: n={n} exceeds cap {cap}", cap=cap)
    fact = [math.factorial(i) for i in range(n)]
    top = fact[n - 1] * n
    coeffs = []
    for m in range(n):
        acc = mpq(0)
        for k in range(n - m):
            l = n - 1 - k - m
            num = top if l % 2 == 0 else -top
            acc += mpq(num, fact[k] * fact[l] * (n - k) ** (m + 1))
        coeffs.append(acc)
    poly = ShiftedPoly(Basis.POWERS_OF_S_MINUS_1, tuple(coeffs)).times_s()
    return poly.to_powers_of_s()


def pmf_from_pgf(poly: ShiftedPoly) -> ExactPmf:
    """Read ``P(U = u)`` off the coefficient of ``s**u``."""
    if poly.basis is not Basis.POWERS_OF_S:
        raise ValueError("pmf_from_pgf expects a polynomial in powers of s")
    if poly.degree < 1:
        raise ValueError(f"PGF of U_N has degree >= 1, got {poly.degree}")
    probs = poly.coeffs
    neg = [u for u, p in enumerate(probs) if p < 0]
    if neg:
        raise ConsistencyError(f"negative coefficient at s^{neg[0]}: {probs[neg[0]]}")
    total = sum(probs, mpq(0))
    if total != 1:
        raise ConsistencyError(f"coefficients sum to {total}, not 1")
    return ExactPmf(poly.degree, probs)


def pmf_dp(n: int, cap: int = DP_EXACT_CAP) -> ExactPmf:
    """Exact PMF of U_N from the absorbing chain on (g, b).

    Conditioning on state-changing draws, ``(g, b)`` moves to ``(g+1, b)``
    with probability ``(n-g)/(n-b)`` and to ``(g, b+1)`` with probability
    ``(g-b)/(n-b)``; absorption happens at ``g = n`` with ``U = n - b``.

    The masses are carried as integers: the value at ``(g, b)`` is stored
    multiplied by ``n!/(n-b)! * L**g`` with ``L = lcm(1..n)``, which turns
    every transition into an integer multiply.
    """
    n = _check_n(n)
    if n > cap:
        raise ResourceLimitError(f"pmf_dp: n={n} exceeds exact cap {cap}", cap=cap)
    lcm = math.lcm(*range(1, n + 1))
    cof = [mpz(lcm // (n - b)) for b in range(n)]
    inflow = [mpz(1)] + [mpz(0)] * n
    for g in range(n):
        nxt = [mpz(0)] * (n + 1)
        prev = mpz(0)
        for b in range(g + 1):
            # mass accumulated along the row: arrivals from row g-1 plus brother steps
            cur = inflow[b] + (g - b + 1) * prev
            nxt[b] = cur * (n - g) * cof[b]
            prev = cur
        inflow = nxt
    scale = mpz(lcm) ** n
    probs = [mpq(0)] * (n + 1)
    falling = mpz(1)
    for b in range(n):
        probs[n - b] = mpq(inflow[b], falling * scale)
        falling *= n - b
    return ExactPmf(n, tuple(probs))


@numba.njit(cache=True, nogil=True)
def _dp_float_kernel(n):
    inflow = np.zeros(n + 1)
    inflow[0] = 1.0
    for g in range(n):
        prev = 0.0
        for b in range(g + 1):
            cur = inflow[b] + prev * (g - b + 1) / (n - b + 1)
            inflow[b] = cur * (n - g) / (n - b)
            prev = cur
    probs = np.zeros(n + 1)
    for b in range(n):
        probs[n - b] = inflow[b]
    return probs


@functools.lru_cache(maxsize=16)
def _pmf_dp_float_cached(n: int) -> np.ndarray:
    probs = _dp_float_kernel(n)
    probs.setflags(write=False)
    return probs


def pmf_dp_float(n: int, cap: int = DP_FLOAT_CAP) -> np.ndarray:
    """Double-precision version of :func:`pmf_dp`; returns ``probs[u]``, u = 0..n.

    O(n**2) time and O(n) memory. The returned array is read-only and cached.
    """
    n = _check_n(n)
    if n > cap:
        raise ResourceLimitError(f"pmf_dp_float: n={n} exceeds cap {cap}", cap=cap)
    return _pmf_dp_float_cached(n)


def moments(pmf: ExactPmf) -> MomentReport:
    """Exact mean and variance of the PMF next to their closed forms.

    The closed forms are computed independently of the PMF; compare them via
    ``report.checks_passed`` or ``report.verify()``.
    """
    probs = pmf.probs
    # common-denominator sums avoid normalizing after every addition
    den = math.lcm(*(int(p.denominator) for p in probs))
    nums = [int(p.numerator) * (den // int(p.denominator)) for p in probs]
    s1 = sum(u * c for u, c in enumerate(nums))
    s2 = sum(u * u * c for u, c in enumerate(nums))
    mean = mpq(s1, den)
    variance = mpq(s2, den) - mean * mean
    return MomentReport(
        n=pmf.n,
        mean=mean,
        variance=variance,
        harmonic=harmonic(pmf.n),
        formula_variance=harmonic_variance(pmf.n),
    )
