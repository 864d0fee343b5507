"""Evaluation backends: float64, double-double, and mpmath at chosen bits.

A backend lifts float64 grids and exact rational weights into its own scalar
type and provides tanh and tanh derivatives on it. Network evaluation and jet
propagation are written once against this interface.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction

import mpmath
import numpy as np

from . import dd as _dd
from . import tanh_calculus
from .errors import ContractViolation


class DoubleBackend:
    name = "double"
    unit_roundoff = 2.0**-53

    def context(self):
        return contextlib.nullcontext()

    def lift(self, x):
        return np.asarray(x, dtype=float)

    def lift_fraction(self, f: Fraction):
        return float(f)

    def lift_weights(self, w_float, w_exact=None):
        return np.asarray(w_float, dtype=float)

    def zeros(self, shape):
        return np.zeros(shape)

    def tanh(self, v):
        return np.tanh(v)

    def tanh_derivative(self, m, v):
        return tanh_calculus.tanh_derivative(m, v)

    def to_float(self, v):
        return np.asarray(v, dtype=float)


class DDBackend:
    name = "dd"
    unit_roundoff = _dd.UNIT_ROUNDOFF

    def context(self):
        return contextlib.nullcontext()

    def lift(self, x):
        return _dd.DD(np.asarray(x, dtype=float))

    def lift_fraction(self, f: Fraction):
        return _dd.DD.from_fraction(f)

    def lift_weights(self, w_float, w_exact=None):
        if w_exact is None:
            return _dd.DD(np.asarray(w_float, dtype=float))
        flat = [_dd.DD.from_fraction(f) for f in np.asarray(w_exact, dtype=object).ravel()]
        hi = np.array([v.hi for v in flat], dtype=float).reshape(np.shape(w_exact))
        lo = np.array([v.lo for v in flat], dtype=float).reshape(np.shape(w_exact))
        return _dd.DD(hi, lo)

    def zeros(self, shape):
        return _dd.DD(np.zeros(shape))

    def tanh(self, v):
        return _dd.dd_tanh(v)

    def tanh_derivative(self, m, v):
        if m == 0:
            return _dd.dd_tanh(v)
        s = _dd.dd_tanh(v)
        u = s - 1.0
        acc = _dd.DD(np.zeros(v.shape))
        for c in reversed(tanh_calculus._poly_coeffs(m)):
            acc = acc * u + _dd.DD.from_fraction(c)
        return acc * (s + 1.0)

    def to_float(self, v):
        return v.to_float()


class MPBackend:
    def __init__(self, bits: int = 256):
        if bits < 53:
            raise ContractViolation("mp backend needs at least 53 bits")
        self.bits = bits
        self.name = f"mp{bits}"
        self.unit_roundoff = 2.0 ** (1 - bits)
        self._tanh_u = np.frompyfunc(mpmath.tanh, 1, 1)

    def context(self):
        return mpmath.workprec(self.bits)

    def lift(self, x):
        with mpmath.workprec(self.bits):
            conv = np.frompyfunc(mpmath.mpf, 1, 1)
            return conv(np.asarray(x, dtype=float))

    def lift_fraction(self, f: Fraction):
        with mpmath.workprec(self.bits):
            return mpmath.mpf(f.numerator) / f.denominator

    def lift_weights(self, w_float, w_exact=None):
        src = w_exact if w_exact is not None else np.asarray(w_float, dtype=float)
        with mpmath.workprec(self.bits):
            flat = np.asarray(src, dtype=object).ravel()
            out = np.array(
                [mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else mpmath.mpf(v) for v in flat],
                dtype=object,
            )
        return out.reshape(np.shape(src))

    def zeros(self, shape):
        with mpmath.workprec(self.bits):
            z = mpmath.mpf(0)
        return np.full(shape, z, dtype=object)

    def tanh(self, v):
        with mpmath.workprec(self.bits):
            return self._tanh_u(v)

    def tanh_derivative(self, m, v):
        with mpmath.workprec(self.bits):
            s = self._tanh_u(v)
            if m == 0:
                return s
            u = s - 1
            acc = np.zeros(np.shape(v), dtype=object)
            for c in reversed(tanh_calculus._poly_coeffs(m)):
                acc = acc * u + (mpmath.mpf(c.numerator) / c.denominator)
            return acc * (s + 1)

    def to_float(self, v):
        return np.asarray(v, dtype=float)


def get_backend(name: str):
    """Resolve "double", "dd", "mp" or "mp:BITS" / "high:BITS"."""
    if name == "double":
        return DoubleBackend()
    if name == "dd":
        return DDBackend()
    if name in ("mp", "high"):
        return MPBackend(256)
    for prefix in ("mp:", "high:"):
        if name.startswith(prefix):
            return MPBackend(int(name[len(prefix):]))
    raise ContractViolation(f"unknown precision mode {name!r}")
