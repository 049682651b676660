"""Exact law, moments, characteristic function and simulation of U_N, the
number of empty slots in the younger brother's album when the main coupon
collector completes her set."""

from .analytic import (
    CfMethod,
    CfSample,
    ProofDecomposition,
    cf,
    cf_from_pmf,
    pgf_integral,
    poisson_erlang_check,
    poisson_partial_sum,
    proof_decomposition,
)
from .convergence import ConvergenceRow, Source, ks_exp1, ks_exp1_pmf, ks_exp1_samples, sweep
from .errors import ConsistencyError, CouponBrotherError, QuadratureBudgetError, ResourceLimitError
from .exact import (
    ExactPmf,
    MomentReport,
    harmonic,
    harmonic_variance,
    moments,
    pgf_foata,
    pmf_dp,
    pmf_dp_float,
    pmf_from_pgf,
)
from .montecarlo import SimBatch, SimConfig, run_batch, simulate_once
from .polynomial import Basis, ShiftedPoly
from .quadrature import QuadratureResult, integrate

__version__ = "0.1.0"
