"""Built-in target functions with analytic derivative oracles.

Each entry supplies evaluate, arbitrary partial derivatives, declared
Sobolev-seminorm upper bounds on [0,1]^d, and, where meaningful, the
(Q, R) analyticity envelope |f|_{W^{s,inf}} <= Q R^(-s) s!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractViolation


@dataclass(frozen=True)
class TargetFunction:
    label: str
    d: int
    _evaluate: Callable
    _partial: Callable
    _seminorm: Callable
    Q: float | None = None
    R: float | None = None
    params: dict = field(default_factory=dict)

    def evaluate(self, x) -> np.ndarray:
        return self._evaluate(np.atleast_2d(np.asarray(x, dtype=float)))

    def partial(self, beta, x) -> np.ndarray:
        beta = tuple(beta)
        if len(beta) != self.d:
            raise ContractViolation(f"beta has length {len(beta)}, d = {self.d}")
        return self._partial(beta, np.atleast_2d(np.asarray(x, dtype=float)))

    def seminorm(self, m: int) -> float:
        return float(self._seminorm(m))

    @property
    def sup_norm(self) -> float:
        return self.seminorm(0)


def _sin_family(a: float, phase: float, label: str) -> TargetFunction:
    def ev(x):
        return np.sin(a * x[0] + phase)

    def pa(beta, x):
        m = beta[0]
        return a**m * np.sin(a * x[0] + phase + m * math.pi / 2)

    return TargetFunction(label=label, d=1, _evaluate=ev, _partial=pa,
                          _seminorm=lambda m: min(1.0, a**m) if m == 0 else a**m,
                          Q=1.0, R=1.0 / a, params={"a": a})


def _exp_a(a: float) -> TargetFunction:
    top = math.exp(max(a, 0.0))

    def ev(x):
        return np.exp(a * x[0])

    def pa(beta, x):
        return a ** beta[0] * np.exp(a * x[0])

    return TargetFunction(label="exp_a", d=1, _evaluate=ev, _partial=pa,
                          _seminorm=lambda m: abs(a) ** m * top,
                          Q=top, R=1.0 / abs(a), params={"a": a})


def _poly(coeffs) -> TargetFunction:
    coeffs = tuple(float(c) for c in coeffs)  # c0 + c1 x + ...

    def ev(x):
        return np.polynomial.polynomial.polyval(x[0], coeffs)

    def pa(beta, x):
        der = np.polynomial.polynomial.polyder(coeffs, beta[0]) if beta[0] else coeffs
        return np.polynomial.polynomial.polyval(x[0], der) * np.ones_like(x[0])

    def semi(m):
        # sum_i |c_i| i!/(i-m)! dominates |p^(m)| on [0,1]
        return sum(abs(c) * math.perm(i, m) for i, c in enumerate(coeffs) if i >= m)

    return TargetFunction(label="poly", d=1, _evaluate=ev, _partial=pa,
                          _seminorm=semi, params={"coeffs": coeffs})


def _sympy_entry(label: str, expr_str: str) -> TargetFunction:
    import sympy

    xs = sympy.Symbol("x")
    expr = sympy.sympify(expr_str)
    fns: dict[int, Callable] = {}

    def deriv(m):
        if m not in fns:
            fns[m] = sympy.lambdify(xs, sympy.diff(expr, xs, m), "numpy")
        return fns[m]

    def ev(x):
        return np.asarray(deriv(0)(x[0]), dtype=float)

    def pa(beta, x):
        return np.asarray(deriv(beta[0])(x[0]), dtype=float) * np.ones_like(x[0])

    def semi(m):
        grid = np.linspace(0.0, 1.0, 4001)
        return 1.05 * float(np.max(np.abs(deriv(m)(grid))))  # padded grid scan

    return TargetFunction(label=label, d=1, _evaluate=ev, _partial=pa, _seminorm=semi)


def _product_sines(d: int, a: float) -> TargetFunction:
    def ev(x):
        out = np.ones_like(x[0])
        for i in range(d):
            out = out * np.sin(a * x[i])
        return out

    def pa(beta, x):
        out = np.ones_like(x[0])
        for i in range(d):
            out = out * a ** beta[i] * np.sin(a * x[i] + beta[i] * math.pi / 2)
        return out

    return TargetFunction(label="product_sines", d=d, _evaluate=ev, _partial=pa,
                          _seminorm=lambda m: a**m if m else 1.0,
                          Q=1.0, R=1.0 / a, params={"a": a, "d": d})


def make(label: str, **params) -> TargetFunction:
    """Catalog constructor; labels: sin_a, cos_a, exp_a, poly, runge,
    gaussian, product_sines."""
    if label == "sin_a":
        return _sin_family(float(params.get("a", 2 * math.pi)), 0.0, "sin_a")
    if label == "cos_a":
        return _sin_family(float(params.get("a", 2 * math.pi)), math.pi / 2, "cos_a")
    if label == "exp_a":
        return _exp_a(float(params.get("a", 1.0)))
    if label == "poly":
        return _poly(params["coeffs"])
    if label == "runge":
        return _sympy_entry("runge", "1/(1 + 25*x**2)")
    if label == "gaussian":
        return _sympy_entry("gaussian", "exp(-x**2)")
    if label == "product_sines":
        return _product_sines(int(params.get("d", 2)), float(params.get("a", math.pi)))
    raise ContractViolation(f"unknown catalog label {label!r}")


CATALOG_LABELS = ("sin_a", "cos_a", "exp_a", "poly", "runge", "gaussian",
                  "product_sines")
