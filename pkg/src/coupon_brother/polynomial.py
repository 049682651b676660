"""Exact rational polynomials stored in the monomial basis of ``s`` or ``s - 1``."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from gmpy2 import mpq

ZERO = mpq(0)


class Basis(enum.Enum):
    POWERS_OF_S = "s"
    POWERS_OF_S_MINUS_1 = "s-1"


def _trim(coeffs: Iterable) -> tuple:
    out = [mpq(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class ShiftedPoly:
    """Polynomial ``sum_k coeffs[k] * B(s)**k`` where ``B(s)`` is ``s`` or ``s - 1``.

    Coefficients are ``gmpy2.mpq`` and trailing zeros are stripped, so the
    zero polynomial has an empty coefficient tuple.
    """

    basis: Basis
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, basis: Basis = Basis.POWERS_OF_S) -> "ShiftedPoly":
        return cls(basis, tuple(coeffs))

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def to_powers_of_s(self) -> "ShiftedPoly":
        if self.basis is Basis.POWERS_OF_S:
            return self
        # (s-1)^m = sum_j C(m, j) (-1)^(m-j) s^j
        out = [ZERO] * len(self.coeffs)
        for m, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for j in range(m + 1):
                term = c * comb(m, j)
                out[j] += term if (m - j) % 2 == 0 else -term
        return ShiftedPoly(Basis.POWERS_OF_S, tuple(out))

    def to_powers_of_s_minus_1(self) -> "ShiftedPoly":
        if self.basis is Basis.POWERS_OF_S_MINUS_1:
            return self
        # s^j = ((s-1) + 1)^j = sum_m C(j, m) (s-1)^m
        out = [ZERO] * len(self.coeffs)
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for m in range(j + 1):
                out[m] += c * comb(j, m)
        return ShiftedPoly(Basis.POWERS_OF_S_MINUS_1, tuple(out))

    def times_s(self) -> "ShiftedPoly":
        """Multiply by ``s`` without leaving the current basis."""
        if self.basis is Basis.POWERS_OF_S:
            return ShiftedPoly(self.basis, (ZERO,) + self.coeffs)
        # s * (s-1)^m = (s-1)^(m+1) + (s-1)^m
        out = list(self.coeffs) + [ZERO]
        for m in range(len(self.coeffs)):
            out[m + 1] += self.coeffs[m]
        return ShiftedPoly(self.basis, tuple(out))

    def evaluate_exact(self, s) -> mpq:
        """Horner evaluation at a rational point, exactly."""
        x = mpq(s)
        if self.basis is Basis.POWERS_OF_S_MINUS_1:
            x -= 1
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __call__(self, s: complex | float) -> complex:
        """Floating-point Horner evaluation in the powers-of-``s`` basis.

        For a probability generating function the coefficients are
        nonnegative and sum to one, so this is well conditioned on the
        closed unit disk.
        """
        coeffs = self.to_powers_of_s().coeffs
        acc = 0j
        for c in reversed(coeffs):
            acc = acc * s + float(c)
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShiftedPoly):
            return NotImplemented
        if self.basis is other.basis:
            return self.coeffs == other.coeffs
        return self.to_powers_of_s().coeffs == other.to_powers_of_s().coeffs

    def __hash__(self) -> int:
        return hash(self.to_powers_of_s().coeffs)
