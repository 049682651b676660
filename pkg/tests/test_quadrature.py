import math

import numpy as np
import pytest

from coupon_brother import quadrature
from coupon_brother.errors import QuadratureBudgetError
from coupon_brother.quadrature import QuadratureResult, integrate


def test_gauss_nodes_match_legendre():
    x, w = np.polynomial.legendre.leggauss(7)
    gauss = quadrature.GAUSS_WEIGHTS != 0
    np.testing.assert_allclose(np.sort(quadrature.NODES[gauss]), x, atol=1e-15)
    np.testing.assert_allclose(quadrature.GAUSS_WEIGHTS[gauss], w, atol=1e-15)
    assert quadrature.KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("degree", range(0, 23))
def test_kronrod_exact_for_polynomials(degree):
    k = np.sum(quadrature.KRONROD_WEIGHTS * quadrature.NODES**degree)
    exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
    assert k == pytest.approx(exact, abs=1e-14)


def test_integrate_smooth_complex():
    res = integrate(lambda x: np.exp(1j * x), 0.0, math.pi, 1e-12)
    assert abs(res.value - 2j) < 1e-12
    assert res.abs_error_estimate <= 1e-12
    assert res.evaluations >= 15


def test_integrate_peaked():
    f = lambda x: 1.0 / (1e-4 + x**2)
    res = integrate(f, -1.0, 1.0, 1e-9)
    assert abs(res.value - 2 * math.atan(1e2) / 1e-2) < 1e-8


def test_reversed_limits_and_empty():
    fwd = integrate(np.cos, 0.0, 1.0, 1e-12)
    back = integrate(np.cos, 1.0, 0.0, 1e-12)
    assert back.value == pytest.approx(-fwd.value, abs=1e-13)
    assert integrate(np.cos, 2.0, 2.0, 1e-12).value == 0


def test_budget_error_carries_best_estimate():
    with pytest.raises(QuadratureBudgetError) as info:
        integrate(lambda x: np.sqrt(np.abs(x - 0.3137)), 0.0, 1.0, 1e-14, max_evals=200)
    best = info.value.best
    assert isinstance(best, QuadratureResult)
    assert best.evaluations <= 200
    assert abs(best.value - (0.3137**1.5 + 0.6863**1.5) / 1.5) < 1e-3


def test_env_budget(monkeypatch):
    monkeypatch.setenv(quadrature.MAX_EVALS_ENV, "150")
    assert quadrature.default_max_evals() == 150
    with pytest.raises(QuadratureBudgetError):
        integrate(lambda x: np.sqrt(np.abs(x - 0.3137)), 0.0, 1.0, 1e-14)


def test_rejects_non_finite_integrand():
    with pytest.raises(FloatingPointError), np.errstate(divide="ignore"):
        integrate(lambda x: 1.0 / (x - x), 0.0, 1.0, 1e-8)


def test_result_invariants():
    with pytest.raises(ValueError):
        QuadratureResult(0j, -1.0, 1)
    with pytest.raises(ValueError):
        QuadratureResult(0j, 0.0, 0)
