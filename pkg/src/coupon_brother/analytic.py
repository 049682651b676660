"""Floating-point evaluation of the integral forms of ``G_N(s)`` and of the
characteristic function of ``U_N / ln N``.

Two integral representations are used::

    G_N(s) = s N      int_0^inf {1 - [1 + (1-s)x] e^-x}^(N-1) e^-x dx
    G_N(s) = s (1-s)  int_0^inf {1 - [1 + (1-s)x] e^-x}^N / [s + (1-s)x]^2 dx

The second is the default. Its integrand decays only like ``1/x**2``, but
past the point where ``N |1 + (1-s)x| e^-x`` is negligible the braced power
equals 1 to working precision and the remainder integrates in closed form
(``1 / (s + (1-s)X)``). The first form is used when ``|1 - s| < 1e-8``,
where the second degenerates.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from . import exact
from .errors import ResourceLimitError
from .quadrature import QuadratureResult, check_tol, integrate

TOL_REAL = 1e-10
TOL_COMPLEX = 1e-8
NEAR_ONE = 1e-8
RAY_CLEARANCE = 0.25
POISSON_MAX_L = 30


class CfMethod(enum.Enum):
    INTEGRAL = "integral"
    FROM_PMF = "pmf"


@dataclass(frozen=True)
class CfSample:
    t: float
    value: complex
    method: CfMethod
    error_estimate: float


@dataclass(frozen=True)
class ProofDecomposition:
    n: int
    t: float
    epsilon: float
    i1: complex
    i2: complex
    i3: complex
    reconstructed_cf: complex
    direct_cf: complex
    i3_limit: complex
    error_estimate: float

    @property
    def residual(self) -> float:
        return abs(self.reconstructed_cf - self.direct_cf)


def _finite_complex(z, name: str) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {z!r}")
    return z


def default_tol(s: complex) -> float:
    return TOL_REAL if complex(s).imag == 0 else TOL_COMPLEX


def log1p_complex(w: np.ndarray) -> np.ndarray:
    """``log(1 + w)`` for complex arrays, accurate when ``|w|`` is tiny."""
    w = np.asarray(w, dtype=complex)
    wr, wi = w.real, w.imag
    # |1+w|^2 - 1 = 2 wr + wr^2 + wi^2, so the real part keeps full relative precision
    with np.errstate(divide="ignore"):
        re = 0.5 * np.log1p(2.0 * wr + wr * wr + wi * wi)
    im = np.arctan2(wi, 1.0 + wr)
    return re + 1j * im


def brace_power(w: np.ndarray, power: int) -> np.ndarray:
    """``(1 - w)**power`` for complex ``w``, stable for large ``power``.

    Uses ``exp(power * log1p(-w))`` while ``|w| < 1``; elsewhere falls back
    to integer powering by repeated squaring.
    """
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    small = np.abs(w) < 1.0
    out[small] = np.exp(power * log1p_complex(-w[small]))
    if not np.all(small):
        base = 1.0 - w[~small]
        out[~small] = _int_power(base, power)
    return out


def _int_power(base: np.ndarray, power: int) -> np.ndarray:
    result = np.ones_like(base)
    while power:
        if power & 1:
            result = result * base
        base = base * base
        power >>= 1
    return result


def _tail_start(n: int, a: float, eta: float, x0: float = 0.0) -> float:
    """Smallest doubling point X >= max(x0, 1) with ``n (1 + a X) e^-X <= eta``."""
    x = max(x0, 1.0, math.log(max(n, 2)))
    while n * (1.0 + a * x) * math.exp(-x) > eta:
        x *= 2.0
    return x


def _ray_distance(s: complex, c: complex, x: float) -> float:
    """Distance from 0 to the ray ``{s + c y : y >= x}``."""
    y = max(x, -(s * c.conjugate()).real / (abs(c) ** 2))
    return abs(s + c * y)


def _check_n(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


def pgf_integral(
    n: int, s: complex, tol: float | None = None, max_evals: int | None = None
) -> QuadratureResult:
    """``G_N(s)`` from its integral representation, to absolute error ``tol``.

    The ``1/x**2`` form has a double pole wherever ``s + (1-s)x`` vanishes
    for some ``x >= 0`` (real ``s`` outside ``[0, 1]``) and degenerates as
    ``s -> 1``; in those regions, and wherever the path passes close to
    the pole, the ``e^-x`` form is used instead.
    """
    n = _check_n(n)
    s = _finite_complex(s, "s")
    tol = check_tol(default_tol(s) if tol is None else tol)
    if abs(1 - s) < NEAR_ONE or _ray_distance(s, 1 - s, 0.0) < RAY_CLEARANCE * min(1.0, abs(s)):
        return _pgf_integral_a9(n, s, tol, max_evals)
    return _pgf_integral_a10(n, s, tol, max_evals)


def _pgf_integral_a9(n, s, tol, max_evals):
    c = 1 - s

    def f(x):
        w = (1.0 + c * x) * np.exp(-x)
        return s * n * brace_power(w, n - 1) * np.exp(-x)

    if s == 0:
        return QuadratureResult(0j, 0.0, 1)
    # past X, n |w| <= 1/2 and |w| decreases, so |brace|^(n-1) <= e^(1/2)
    x_max = _tail_start(n, abs(c), 0.5)
    while abs(s) * n * math.exp(0.5 - x_max) > tol / 2:
        x_max *= 2.0
    breaks = (math.log(n),) if n > 2 else ()
    return integrate(f, 0.0, x_max, tol / 2, max_evals, breakpoints=breaks)


def _pgf_integral_a10(n, s, tol, max_evals):
    c = 1 - s

    def f(x):
        w = (1.0 + c * x) * np.exp(-x)
        return s * c * brace_power(w, n) / (s + c * x) ** 2

    x_max, tail_err = _a10_cutoff(n, s, c, tol / 4)
    # s (1-s) int_X^inf dx / (s + (1-s) x)^2
    tail = s / (s + c * x_max)
    head = integrate(f, 0.0, x_max, tol / 2, max_evals, breakpoints=_a10_breaks(n))
    return QuadratureResult(head.value + tail, head.abs_error_estimate + tail_err, head.evaluations)


def _a10_breaks(n: int) -> tuple:
    if n <= 2:
        return ()
    ln = math.log(n)
    return (0.5 * ln, ln, 1.5 * ln)


def _a10_cutoff(n: int, s: complex, c: complex, target: float):
    """Cutoff X and a bound on the error of replacing the brace power by 1 past X.

    For ``x >= X`` with ``n |w| <= 1/2`` (``w = (1 + c x) e^-x``),
    ``|(1-w)^n - 1| <= 2 n |w|``; integrating against ``|s c| / |s + c x|^2``
    gives ``2 n |s c| (1 + |c| (X+1)) e^-X / d^2`` with ``d`` the distance
    from 0 to the ray ``s + c x, x >= X``.
    """
    a = abs(c)
    x = _tail_start(n, a, 0.5)
    for _ in range(64):
        d = _ray_distance(s, c, x)
        if d > 0:
            err = 2 * n * abs(s * c) * (1 + a * (x + 1)) * math.exp(-x) / d**2
            if err <= target:
                return x, err
        x *= 2.0
    raise ResourceLimitError("could not place a tail cutoff for the PGF integrand")


def cf(
    n: int,
    t: float,
    tol: float | None = None,
    method: CfMethod | str = CfMethod.INTEGRAL,
    max_evals: int | None = None,
) -> CfSample:
    """Characteristic function of ``U_N / ln N`` at ``t``."""
    n = _check_n(n)
    method = CfMethod(method)
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    if t == 0:
        return CfSample(0.0, 1 + 0j, method, 0.0)
    if n < 2:
        raise ValueError("U_N / ln N is undefined for n = 1 (ln 1 = 0)")
    s = cmath.exp(1j * t / math.log(n))
    if method is CfMethod.INTEGRAL:
        res = pgf_integral(n, s, TOL_COMPLEX if tol is None else tol, max_evals)
        return CfSample(t, res.value, method, res.abs_error_estimate)
    return cf_from_pmf(n, [t])[0]


def cf_from_pmf(n: int, ts) -> list[CfSample]:
    """``sum_u P(U=u) exp(i t u / ln n)`` on a grid, from the float-DP PMF."""
    n = _check_n(n)
    if n < 2:
        raise ValueError("U_N / ln N is undefined for n = 1 (ln 1 = 0)")
    probs = exact.pmf_dp_float(n)
    u = np.arange(n + 1)
    ts = np.asarray(ts, dtype=float)
    vals = np.exp(1j * np.outer(ts, u) / math.log(n)) @ probs
    # rounding in the DP and in the sum, both O(n eps)
    err = 8.0 * (n + 1) * np.finfo(float).eps
    return [
        CfSample(float(t), 1 + 0j if t == 0 else complex(v), CfMethod.FROM_PMF, 0.0 if t == 0 else err)
        for t, v in zip(ts, vals)
    ]


def proof_decomposition(
    n: int, t: float, epsilon: float, tol: float | None = None, max_evals: int | None = None
) -> ProofDecomposition:
    """Split the rescaled characteristic-function integral at ``1 - eps`` and ``1 + eps``.

    With ``x = xi ln N`` the integrand is
    ``{1 - [1 + xi c] N^-xi}^N / [s + xi c]^2``, ``s = e^{it/ln N}``,
    ``c = (1 - s) ln N``, and ``phi_N(t) = s (1 - s) ln N (I1 + I2 + I3)``.
    """
    n = _check_n(n)
    if n < 2:
        raise ValueError("proof_decomposition needs n >= 2")
    t = float(t)
    if t == 0 or not math.isfinite(t):
        raise ValueError("t must be finite and nonzero (the I3 limit divides by it)")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    tol = check_tol(TOL_COMPLEX if tol is None else tol)

    ln = math.log(n)
    s = cmath.exp(1j * t / ln)
    c = (1 - s) * ln
    prefactor = s * (1 - s) * ln
    piece_tol = tol / (4 * max(abs(prefactor), 1e-300))

    def h(xi):
        w = (1.0 + c * xi) * np.exp(-xi * ln)
        return brace_power(w, n) / (s + c * xi) ** 2

    lo, hi = 1 - epsilon, 1 + epsilon
    i1 = integrate(h, 0.0, lo, piece_tol, max_evals)
    i2 = integrate(h, lo, hi, piece_tol, max_evals)
    # past X (in x units) the brace power is 1 up to the bounded error
    x_cut, tail_err = _a10_cutoff(n, s, 1 - s, piece_tol / 2 * abs(prefactor))
    xi_cut = max(hi, x_cut / ln)
    i3_head = integrate(h, hi, xi_cut, piece_tol / 2, max_evals)
    i3_tail = 1 / (c * (s + c * xi_cut))
    i3 = i3_head.value + i3_tail
    err = abs(prefactor) * (
        i1.abs_error_estimate + i2.abs_error_estimate + i3_head.abs_error_estimate
    ) + tail_err

    reconstructed = prefactor * (i1.value + i2.value + i3)
    if n <= exact.DP_FLOAT_CAP:
        direct = cf(n, t, method=CfMethod.FROM_PMF)
    else:
        direct = cf(n, t, tol, CfMethod.INTEGRAL, max_evals)
    i3_limit = -(1 / (1j * t)) / (1 - 1j * t * (1 + epsilon))
    return ProofDecomposition(
        n=n,
        t=t,
        epsilon=float(epsilon),
        i1=complex(i1.value),
        i2=complex(i2.value),
        i3=complex(i3),
        reconstructed_cf=complex(reconstructed),
        direct_cf=direct.value,
        i3_limit=complex(i3_limit),
        error_estimate=float(err + direct.error_estimate),
    )


def poisson_partial_sum(L: int, x: complex) -> complex:
    """Left side ``sum_{l<L} x^l / l!`` by direct summation."""
    x = complex(x)
    term, total = 1 + 0j, 0j
    for l in range(L):
        total += term
        term *= x / (l + 1)
    return total


def poisson_erlang_check(L: int, x: complex, tol: float = 1e-10, max_evals: int | None = None) -> QuadratureResult:
    """Quadrature value of ``1/(L-1)! int_0^inf (x + xi)^(L-1) e^-xi dxi``.

    Compare against :func:`poisson_partial_sum`; the two agree for every
    complex ``x``.
    """
    if isinstance(L, bool) or int(L) != L or not 1 <= L <= POISSON_MAX_L:
        raise ValueError(f"L must be an integer in [1, {POISSON_MAX_L}], got {L!r}")
    L = int(L)
    x = _finite_complex(x, "x")
    tol = check_tol(tol)
    norm = math.factorial(L - 1)

    def f(xi):
        return (x + xi) ** (L - 1) * np.exp(-xi) / norm

    # |x + xi| <= |x| + xi, so the tail is at most e^|x| Q(L, X + |x|)
    r = abs(x)
    x_max = float(L + r + 10)
    while math.exp(r) * gammaincc(L, x_max + r) > tol / 2:
        x_max *= 2.0
    tail_bound = float(math.exp(r) * gammaincc(L, x_max + r))
    head = integrate(f, 0.0, x_max, tol / 2, max_evals, initial_panels=16)
    return QuadratureResult(head.value, head.abs_error_estimate + tail_bound, head.evaluations)
