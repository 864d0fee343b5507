"""Vectorized double-double arithmetic (roughly 32 significant digits).

Each value is a pair of float64 arrays (hi, lo) with hi + lo the represented
number and |lo| <= ulp(hi)/2. Products use Dekker splitting, so no FMA is
required. This is the cheap middle tier between float64 and mpmath for
evaluating networks whose weights cancel catastrophically.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1

UNIT_ROUNDOFF = 2.0**-104


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a, b):
    s = a + b
    err = b - (s - a)
    return s, err


def _two_prod(a, b):
    p = a * b
    t = _SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


class DD:
    """A double-double number (or array of them)."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo=None):
        self.hi = np.asarray(hi, dtype=float)
        self.lo = np.zeros_like(self.hi) if lo is None else np.asarray(lo, dtype=float)

    @classmethod
    def from_fraction(cls, f: Fraction) -> "DD":
        hi = float(f)
        lo = float(f - Fraction(hi)) if math.isfinite(hi) else 0.0
        return cls(hi, lo)

    @property
    def shape(self):
        return self.hi.shape

    def __getitem__(self, idx):
        return DD(self.hi[idx], self.lo[idx])

    def to_float(self):
        return self.hi + self.lo

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __add__(self, other):
        if not isinstance(other, DD):
            other = DD(other)
        s1, s2 = _two_sum(self.hi, other.hi)
        t1, t2 = _two_sum(self.lo, other.lo)
        s2 = s2 + t1
        s1, s2 = _quick_two_sum(s1, s2)
        s2 = s2 + t2
        s1, s2 = _quick_two_sum(s1, s2)
        return DD(s1, s2)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, DD):
            other = DD(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, DD):
            other = DD(other)
        p1, p2 = _two_prod(self.hi, other.hi)
        p2 = p2 + (self.hi * other.lo + self.lo * other.hi)
        p1, p2 = _quick_two_sum(p1, p2)
        return DD(p1, p2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, DD):
            other = DD(other)
        q1 = self.hi / other.hi
        r = self - other * DD(q1)
        q2 = r.hi / other.hi
        r = r - other * DD(q2)
        q3 = r.hi / other.hi
        s1, s2 = _quick_two_sum(q1, q2)
        return DD(s1, s2) + DD(q3)

    def __rtruediv__(self, other):
        return DD(other) / self

    def abs(self):
        s = np.where(self.hi < 0, -1.0, 1.0)
        return DD(self.hi * s, self.lo * s)


_LN2 = DD.from_fraction(Fraction(0x0B17217F7D1CF79ABC9E3B39803F2F6AF, 2**128))
_INV_FACT = [DD.from_fraction(Fraction(1, math.factorial(i))) for i in range(27)]


def dd_exp(x: DD) -> DD:
    """exp for double-double input, accurate to ~1e-31 relative."""
    hi = np.clip(x.hi, -745.0, 709.0)
    x = DD(hi, np.where(x.hi == hi, x.lo, 0.0))
    k = np.round(hi / math.log(2.0))
    r = x - _LN2 * DD(k)
    acc = DD(np.zeros_like(hi))
    for inv in reversed(_INV_FACT):
        acc = acc * r + inv
    ki = k.astype(np.int64)
    return DD(np.ldexp(acc.hi, ki), np.ldexp(acc.lo, ki))


def dd_tanh(x: DD) -> DD:
    """tanh for double-double input via exp(-2|x|), sign-symmetric.

    Below 2^-10 the exp route only achieves absolute accuracy (the
    subtraction 1 - e cancels), so a short odd Taylor series is used there;
    its truncation error is below 2^-128 relative."""
    s = np.where(x.hi < 0, -1.0, 1.0)
    a = DD(x.hi * s, x.lo * s)
    e = dd_exp(a * DD(-2.0))
    t = (DD(1.0) - e) / (DD(1.0) + e)
    x2 = a * a
    p = DD(21844.0) / DD(6081075.0)
    for num, den in ((-1382.0, 155925.0), (62.0, 2835.0), (-17.0, 315.0),
                     (2.0, 15.0), (-1.0, 3.0), (1.0, 1.0)):
        p = p * x2 + DD(num) / DD(den)
    ts = p * a
    small = a.hi < 2.0**-10
    hi = np.where(small, ts.hi, t.hi)
    lo = np.where(small, ts.lo, t.lo)
    return DD(hi * s, lo * s)
