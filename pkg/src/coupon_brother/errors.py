"""Exception hierarchy shared by every module.

Bad arguments raise plain ``ValueError``; the classes below cover the
failures a caller may want to handle separately (and that the CLI maps to
exit codes).
"""

from __future__ import annotations


class CouponBrotherError(Exception):
    """Base class for library-specific failures."""


class ResourceLimitError(CouponBrotherError):
    """A request exceeds a configured size or work cap."""

    def __init__(self, message: str, cap: float | int | None = None):
        super().__init__(message)
        self.cap = cap


class ConsistencyError(CouponBrotherError):
    """An internal identity failed; indicates a bug rather than bad input."""


class QuadratureBudgetError(CouponBrotherError):
    """Adaptive quadrature ran out of evaluations before meeting its tolerance.

    ``best`` carries the estimate reached when the budget ran out.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
