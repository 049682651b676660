import math

import numpy as np
import pytest
from scipy import stats

from coupon_brother.errors import ResourceLimitError
from coupon_brother.exact import harmonic, harmonic_variance, pmf_dp
from coupon_brother.montecarlo import SimBatch, SimConfig, run_batch, simulate_once, uniform_stream


def test_single_type_is_forced():
    for i in range(50):
        assert simulate_once(1, 123, i) == (1, 1)


def test_simulate_once_bounds():
    for i in range(2000):
        u, t = simulate_once(17, 9, i)
        assert 1 <= u <= 17
        assert t >= 17


def test_simulate_once_deterministic():
    assert simulate_once(50, 2024, 7) == simulate_once(50, 2024, 7)
    assert simulate_once(50, 2024, 7) != simulate_once(50, 2024, 8) or simulate_once(50, 2024, 9) != simulate_once(
        50, 2024, 10
    )


def test_n2_binomial():
    reps = 40_000
    b = run_batch(SimConfig(2, reps, seed=11))
    p_hat = b.counts[2] / reps
    # P(U=2) = 1/2; 4 sigma binomial band
    assert abs(p_hat - 0.5) < 4 * math.sqrt(0.25 / reps)


@pytest.mark.parametrize("n, workers", [(2, 8), (37, 3), (100, 8)])
def test_worker_count_invariance(n, workers):
    a = run_batch(SimConfig(n, 20_000, seed=42, workers=1, record_t=True))
    b = run_batch(SimConfig(n, 20_000, seed=42, workers=workers, record_t=True))
    assert np.array_equal(a.counts, b.counts)
    assert (a.u_mean, a.u_m2, a.t_sum, a.t_sumsq) == (b.u_mean, b.u_m2, b.t_sum, b.t_sumsq)


def test_seed_changes_output():
    a = run_batch(SimConfig(30, 5000, seed=1))
    b = run_batch(SimConfig(30, 5000, seed=2))
    assert not np.array_equal(a.counts, b.counts)


def test_histogram_invariants():
    b = run_batch(SimConfig(25, 3001, seed=5))
    assert b.counts.sum() == 3001
    assert b.counts[0] == 0
    assert set(b.histogram()) <= set(range(1, 26))
    assert sum(b.histogram().values()) == 3001


def test_streaming_moments_match_histogram():
    b = run_batch(SimConfig(60, 12_345, seed=77, workers=4))
    samples = b.samples()
    assert b.mean == pytest.approx(samples.mean(), rel=1e-12)
    assert b.variance == pytest.approx(samples.var(ddof=1), rel=1e-9)


def test_t_accumulators():
    b = run_batch(SimConfig(20, 20_000, seed=3, record_t=True))
    # E[T_n] = n H_n
    expected = 20 * float(harmonic(20))
    sd_t = math.sqrt(b.t_sumsq / b.u_count - b.t_mean**2)
    assert abs(b.t_mean - expected) < 5 * sd_t / math.sqrt(b.u_count)
    assert run_batch(SimConfig(20, 10, seed=3)).t_sum is None


def test_moments_n100():
    reps = 100_000
    b = run_batch(SimConfig(100, reps, seed=42, workers=2))
    h = float(harmonic(100))
    assert abs(b.mean - h) < 4 * b.mean_standard_error
    v = float(harmonic_variance(100))
    assert abs(b.variance - v) < 4 * b.variance_standard_error()


def test_empirical_pmf_close_to_exact():
    n, reps = 30, 200_000
    b = run_batch(SimConfig(n, reps, seed=8))
    exact = np.array([float(p) for p in pmf_dp(n).probs])
    tv = 0.5 * np.abs(b.empirical_pmf() - exact).sum()
    assert tv < 0.01


@pytest.mark.slow
def test_total_variation_n100_million_reps():
    n, reps = 100, 1_000_000
    b = run_batch(SimConfig(n, reps, seed=2718, workers=4))
    exact = np.array([float(p) for p in pmf_dp(n).probs])
    tv = 0.5 * np.abs(b.empirical_pmf() - exact).sum()
    assert tv < 0.01


@pytest.mark.parametrize("n", [3, 7, 100, 1000])
def test_uniform_stream_chi_square(n):
    size = 200 * n
    draws = np.concatenate([uniform_stream(99, i, n, size // 4) for i in range(4)])
    assert draws.min() >= 0 and draws.max() < n
    counts = np.bincount(draws, minlength=n)
    _, p = stats.chisquare(counts)
    assert p > 1e-4


def test_uniform_stream_large_n_in_range():
    n = 2**32 - 5
    draws = uniform_stream(1, 0, n, 10_000)
    assert draws.min() >= 0 and draws.max() < n
    # top bit of a uniform draw on ~[0, 2^32) is a fair coin
    top = (draws >= 2**31).mean()
    assert abs(top - 0.5) < 4 * 0.5 / math.sqrt(10_000)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(0, 10, 1)
    with pytest.raises(ValueError):
        SimConfig(5, 0, 1)
    with pytest.raises(ValueError):
        SimConfig(5, 10, -1)
    with pytest.raises(ValueError):
        SimConfig(5, 10, 1, workers=0)


def test_draw_budget_checked_before_running():
    with pytest.raises(ResourceLimitError):
        run_batch(SimConfig(10**6, 10**6, seed=1))
    with pytest.raises(ResourceLimitError):
        run_batch(SimConfig(100, 1000, seed=1), max_draws=1000)


def test_batch_rejects_bad_histogram():
    cfg = SimConfig(3, 4, seed=1)
    with pytest.raises(ValueError):
        SimBatch(cfg, np.array([0, 1, 1, 1]), 4, 2.0, 1.0)
    with pytest.raises(ValueError):
        SimBatch(cfg, np.array([1, 1, 1, 1]), 4, 2.0, 1.0)
