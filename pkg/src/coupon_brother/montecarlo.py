"""Monte Carlo simulation of the collector and her brother.

Replication ``i`` of a batch draws from its own counter-based stream: the
``j``-th 64-bit word is ``mix64(key_i + (j+1) * GAMMA)`` with
``key_i = mix64(seed ^ mix64(i + GAMMA))`` and ``mix64`` the SplitMix64
finalizer. A replication's draws therefore depend only on ``(seed, i)``.

Batches are cut into fixed-size chunks of replications. Workers pick up
chunks in any order, but chunk results are merged in chunk order, so every
field of a :class:`SimBatch` is bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ResourceLimitError

CHUNK = 1024
MAX_N = 2**32 - 1
DEFAULT_MAX_DRAWS = 5 * 10**10

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK32 = np.uint64(0xFFFFFFFF)


@numba.njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True, inline="always")
def _stream_key(seed, index):
    return _mix64(np.uint64(seed) ^ _mix64(np.uint64(index) + _GAMMA))


@numba.njit(cache=True, inline="always")
def _bounded(key, ctr, n):
    """Uniform integer in [0, n) for n < 2**32 by multiply-shift with rejection.

    Returns (value, next counter).
    """
    n64 = np.uint64(n)
    # (2**32 - n) mod n, the count of low products that must be rejected
    threshold = (np.uint64(0x100000000) - n64) % n64
    while True:
        ctr += np.uint64(1)
        r = _mix64(key + ctr * _GAMMA) >> np.uint64(32)
        m = r * n64
        if (m & _MASK32) >= threshold:
            return np.int64(m >> np.uint64(32)), ctr


@numba.njit(cache=True, nogil=True)
def _simulate(n, key, state):
    """One replication; ``state`` is a zeroed uint8 scratch array of length n.

    state[k] = 0: nobody owns k; 1: the collector only; 2: both.
    """
    g = 0
    b = 0
    t = 0
    ctr = np.uint64(0)
    while g < n:
        k, ctr = _bounded(key, ctr, n)
        t += 1
        s = state[k]
        if s == 0:
            state[k] = 1
            g += 1
        elif s == 1:
            state[k] = 2
            b += 1
    return n - b, t


@numba.njit(cache=True, nogil=True)
def _run_chunk(n, seed, start, stop, record_t):
    counts = np.zeros(n + 1, dtype=np.int64)
    state = np.zeros(n, dtype=np.uint8)
    count = 0
    mean = 0.0
    m2 = 0.0
    t_sum = 0
    t_sumsq = 0.0
    for i in range(start, stop):
        state[:] = 0
        u, t = _simulate(n, _stream_key(seed, i), state)
        counts[u] += 1
        count += 1
        delta = u - mean
        mean += delta / count
        m2 += delta * (u - mean)
        if record_t:
            t_sum += t
            t_sumsq += float(t) * float(t)
    return counts, count, mean, m2, t_sum, t_sumsq


@numba.njit(cache=True)
def _simulate_one(n, seed, index):
    return _simulate(n, _stream_key(seed, index), np.zeros(n, dtype=np.uint8))


@numba.njit(cache=True)
def _uniform_stream(seed, index, n, size):
    out = np.empty(size, dtype=np.int64)
    key = _stream_key(seed, index)
    ctr = np.uint64(0)
    for j in range(size):
        out[j], ctr = _bounded(key, ctr, n)
    return out


def _check_n(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or not 1 <= n <= MAX_N:
        raise ValueError(f"n must be an integer in [1, 2**32 - 1], got {n!r}")
    return int(n)


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def uniform_stream(seed: int, index: int, n: int, size: int) -> np.ndarray:
    """The first ``size`` type draws of replication ``index``, in ``[0, n)``."""
    return _uniform_stream(np.uint64(_check_seed(seed)), np.uint64(index), _check_n(n), int(size))


def simulate_once(n: int, seed: int, index: int = 0) -> tuple[int, int]:
    """Run replication ``index`` of stream ``seed``; returns ``(u, t)``.

    ``u`` is the number of types the brother lacks when the collector
    completes her set (``1 <= u <= n``) and ``t`` the number of draws it took.
    """
    n = _check_n(n)
    u, t = _simulate_one(n, np.uint64(_check_seed(seed)), np.uint64(index))
    return int(u), int(t)


@dataclass(frozen=True)
class SimConfig:
    n: int
    reps: int
    seed: int
    workers: int = 1
    record_t: bool = False

    def __post_init__(self):
        _check_n(self.n)
        _check_seed(self.seed)
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def expected_draws(self) -> float:
        """Approximate total draws, ``reps * n * H_n``."""
        n = self.n
        h = math.log(n) + 0.5772156649015329 + 1 / (2 * n)
        return self.reps * n * h


@dataclass(frozen=True, eq=False)
class SimBatch:
    """Merged output of :func:`run_batch`.

    ``counts[u]`` is the number of replications that ended with ``U = u``;
    ``u_mean`` and ``u_m2`` are streaming (Welford) accumulators, ``u_m2``
    being the sum of squared deviations from the mean.
    """

    config: SimConfig
    counts: np.ndarray
    u_count: int
    u_mean: float
    u_m2: float
    t_sum: int | None = None
    t_sumsq: float | None = None

    def __post_init__(self):
        if int(self.counts.sum()) != self.config.reps or self.u_count != self.config.reps:
            raise ValueError("histogram total does not match reps")
        if self.counts[0] != 0:
            raise ValueError("U = 0 recorded; the simulator is broken")

    @property
    def mean(self) -> float:
        return self.u_mean

    @property
    def variance(self) -> float:
        """Unbiased sample variance of U."""
        if self.u_count < 2:
            return 0.0
        return self.u_m2 / (self.u_count - 1)

    @property
    def mean_standard_error(self) -> float:
        return math.sqrt(self.variance / self.u_count)

    def variance_standard_error(self) -> float:
        """Large-sample SE of the sample variance from the empirical 4th central moment."""
        u = np.arange(self.counts.size)
        w = self.counts / self.u_count
        mu = float(u @ w)
        m4 = float(((u - mu) ** 4) @ w)
        var = float(((u - mu) ** 2) @ w)
        return math.sqrt(max(m4 - var * var, 0.0) / self.u_count)

    def empirical_pmf(self) -> np.ndarray:
        return self.counts / self.u_count

    def histogram(self) -> dict[int, int]:
        """Sparse ``{u: count}`` for the nonzero bins."""
        nz = np.flatnonzero(self.counts)
        return {int(u): int(self.counts[u]) for u in nz}

    @property
    def t_mean(self) -> float | None:
        return None if self.t_sum is None else self.t_sum / self.u_count

    def samples(self) -> np.ndarray:
        """Expand the histogram into a sorted array of U values."""
        return np.repeat(np.arange(self.counts.size), self.counts)


def _merge_moments(a, b):
    """Chan et al. pairwise merge of (count, mean, M2)."""
    na, ma, m2a = a
    nb, mb, m2b = b
    if na == 0:
        return b
    if nb == 0:
        return a
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, m2a + m2b + delta * delta * na * nb / n


def _tree_merge(parts):
    while len(parts) > 1:
        nxt = [_merge_moments(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def run_batch(config: SimConfig, max_draws: float = DEFAULT_MAX_DRAWS) -> SimBatch:
    """Run ``config.reps`` independent replications on ``config.workers`` threads."""
    need = config.expected_draws()
    if need > max_draws:
        raise ResourceLimitError(
            f"about {need:.3g} draws needed for n={config.n}, reps={config.reps}; "
            f"budget is {max_draws:.3g}",
            cap=max_draws,
        )
    n = config.n
    seed = np.uint64(config.seed)
    bounds = [(lo, min(lo + CHUNK, config.reps)) for lo in range(0, config.reps, CHUNK)]

    def work(lo_hi):
        lo, hi = lo_hi
        return _run_chunk(n, seed, lo, hi, config.record_t)

    counts = np.zeros(n + 1, dtype=np.int64)
    moments = []
    t_sum = 0
    t_sumsq_parts = []
    if config.workers == 1:
        results = map(work, bounds)
        pool = None
    else:
        pool = ThreadPoolExecutor(max_workers=config.workers)
        results = pool.map(work, bounds)
    try:
        for c, cnt, mean, m2, ts, tss in results:
            counts += c
            moments.append((cnt, mean, m2))
            t_sum += int(ts)
            t_sumsq_parts.append(tss)
    finally:
        if pool is not None:
            pool.shutdown()
    count, mean, m2 = _tree_merge(moments)
    return SimBatch(
        config=config,
        counts=counts,
        u_count=int(count),
        u_mean=float(mean),
        u_m2=float(m2),
        t_sum=t_sum if config.record_t else None,
        t_sumsq=math.fsum(t_sumsq_parts) if config.record_t else None,
    )
