"""Exact derivatives of tanh of arbitrary order, and certified bounds on them.

The m-th derivative of tanh is a polynomial in tanh(x) with rational
coefficients built from Stirling numbers of the second kind, so given a good
tanh(x) every higher derivative is exact up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .errors import CapacityError

DEFAULT_MAX_ORDER = 30


def _stirling2_table(max_order: int) -> tuple[tuple[int, ...], ...]:
    # rows m = 0..max_order, entries k = 0..m, exact integers
    rows = [(1,)]
    for m in range(1, max_order + 1):
        prev = rows[-1]
        row = [0] * (m + 1)
        for k in range(1, m + 1):
            left = prev[k - 1]
            mid = prev[k] if k < m else 0
            row[k] = k * mid + left
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class DerivativeTable:
    """Immutable table of Stirling numbers backing tanh derivative evaluation."""

    max_order: int
    stirling2: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, max_order: int = DEFAULT_MAX_ORDER) -> "DerivativeTable":
        if max_order < 1:
            raise ValueError("max_order must be >= 1")
        if max_order > DEFAULT_MAX_ORDER:
            raise CapacityError(
                f"derivative table capped at order {DEFAULT_MAX_ORDER}, got {max_order}"
            )
        return cls(max_order=max_order, stirling2=_stirling2_table(max_order))

    def stirling(self, m: int, k: int) -> int:
        return self.stirling2[m][k]


_DEFAULT_TABLE = DerivativeTable.build()


@lru_cache(maxsize=None)
def _poly_coeffs(m: int) -> tuple[Fraction, ...]:
    """Coefficients c_k = (-2)^m * k!/2^k * {m brace k}, exact."""
    if m > _DEFAULT_TABLE.max_order:
        raise CapacityError(f"order {m} exceeds table capacity {_DEFAULT_TABLE.max_order}")
    sign = Fraction((-2) ** m)
    return tuple(
        sign * Fraction(math.factorial(k), 2**k) * _DEFAULT_TABLE.stirling(m, k)
        for k in range(m + 1)
    )


def tanh_derivative(m: int, x, table: DerivativeTable | None = None):
    """m-th derivative of tanh at x; x may be a float, ndarray or mpmath mpf.

    Uses the closed form sigma^(m) = (-2)^m (sigma+1) sum_k k!/2^k {m k} (sigma-1)^k,
    which is exact given tanh(x).
    """
    table = table or _DEFAULT_TABLE
    if m < 0:
        raise ValueError("derivative order must be >= 0")
    if m > table.max_order:
        raise CapacityError(f"order {m} exceeds table capacity {table.max_order}")
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        s = mpmath.tanh(x)
        if m == 0:
            return s
        u = s - 1
        acc = mpmath.mpf(0)
        for c in reversed(_poly_coeffs(m)):
            acc = acc * u + mpmath.mpf(c.numerator) / c.denominator
        return acc * (s + 1)
    s = np.tanh(x)
    if m == 0:
        return s
    u = s - 1.0
    acc = np.zeros_like(np.asarray(s, dtype=float))
    for c in reversed(_poly_coeffs(m)):
        acc = acc * u + float(c)
    out = acc * (s + 1.0)
    return out if isinstance(x, np.ndarray) else float(out)


def tanh_derivative_at_zero(m: int) -> Fraction:
    """Exact rational value of the m-th derivative of tanh at 0."""
    if m == 0:
        return Fraction(0)
    acc = Fraction(0)
    for c in reversed(_poly_coeffs(m)):
        acc = acc * -1 + c
    return acc  # (sigma+1) = 1 at x = 0


def derivative_upper_bound(m: int, x):
    """Certified envelope (2m)^(m+1) min(e^(-2x), e^(2x)) for |tanh^(m)|."""
    if m < 1:
        raise ValueError("bound defined for m >= 1")
    return (2 * m) ** (m + 1) * np.exp(-2.0 * np.abs(x))


def odd_derivative_at_zero_lower_bound(n: int, table: DerivativeTable | None = None) -> bool:
    """Check |tanh^(2n-1)(0)| >= 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return abs(tanh_derivative_at_zero(2 * n - 1)) >= 1


_SCAN_STEP = 1e-3
_SAFETY_PAD = 0.1


@lru_cache(maxsize=None)
def decay_threshold(k: int) -> float:
    """Smallest certified R such that |tanh^(m)| is non-increasing on [R, inf)
    for every 1 <= m <= k.

    Certified by a grid scan on [0, 4+k] with step 1e-3; tanh derivatives decay
    exponentially past their last extremum, so the finite window suffices.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    xs = np.arange(0.0, 4.0 + k + _SCAN_STEP, _SCAN_STEP)
    r = 0.0
    for m in range(1, k + 1):
        vals = np.abs(tanh_derivative(m, xs))
        rising = np.nonzero(np.diff(vals) > 0)[0]
        if rising.size:
            r = max(r, xs[rising[-1] + 1])
    return float(r + _SAFETY_PAD)
