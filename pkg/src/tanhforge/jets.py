"""Truncated multivariate Taylor (jet) propagation through tanh networks.

A jet stores one Taylor coefficient D^beta/beta! per multi-index |beta| <= k.
Affine layers act linearly on jets; tanh composes with its own truncated
series, with derivative values from tanh_calculus. This yields all network
partials exactly up to rounding, with no finite differencing.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .combinatorics import enumerate_up_to
from .errors import CapacityError, ContractViolation
from .precision import get_backend

JET_ORDER_CAP = 4
JET_DIM_CAP = 4


@lru_cache(maxsize=None)
def _tables(d: int, k: int):
    idxs = tuple(mi.entries for mi in enumerate_up_to(k, d))
    pos = {e: i for i, e in enumerate(idxs)}
    mul = []
    for ia, a in enumerate(idxs):
        for ib, b in enumerate(idxs):
            s = tuple(x + y for x, y in zip(a, b))
            if sum(s) <= k:
                mul.append((pos[s], ia, ib))
    return idxs, pos, tuple(mul)


class Jet:
    """Coefficients over all multi-indices of degree <= k in d variables."""

    __slots__ = ("d", "k", "coeffs")

    def __init__(self, d: int, k: int, coeffs: list):
        self.d = d
        self.k = k
        self.coeffs = coeffs


def _jet_mul(a: Jet, b: Jet, zero_like) -> Jet:
    _, _, mul = _tables(a.d, a.k)
    out = [None] * len(a.coeffs)
    for r, ia, ib in mul:
        term = a.coeffs[ia] * b.coeffs[ib]
        out[r] = term if out[r] is None else out[r] + term
    return Jet(a.d, a.k, [zero_like() if c is None else c for c in out])


def _jet_tanh(j: Jet, backend) -> Jet:
    a0 = j.coeffs[0]
    shape = np.shape(a0.hi) if hasattr(a0, "hi") else np.shape(a0)

    def zero_like():
        return backend.zeros(shape)

    u = Jet(j.d, j.k, [zero_like()] + list(j.coeffs[1:]))
    res = Jet(j.d, j.k, [zero_like() for _ in j.coeffs])
    res.coeffs[0] = backend.tanh_derivative(j.k, a0) * backend.lift_fraction(
        Fraction(1, math.factorial(j.k)))
    for m in range(j.k - 1, -1, -1):
        res = _jet_mul(res, u, zero_like)
        res.coeffs[0] = res.coeffs[0] + backend.tanh_derivative(m, a0) * backend.lift_fraction(
            Fraction(1, math.factorial(m)))
    return res


def _affine_coeff(backend, layer, c, with_bias: bool):
    if backend.name == "double":
        out = layer.W @ c
        return out + layer.b[:, None] if with_bias else out
    Wl = backend.lift_weights(layer.W, layer.W_exact)
    npts = c.shape[1]
    if with_bias:
        bl = backend.lift_weights(layer.b, layer.b_exact)
        acc = bl[:, None] + backend.zeros((layer.out_dim, npts))
    else:
        acc = backend.zeros((layer.out_dim, npts))
    for jcol in range(layer.in_dim):
        if not np.any(layer.W[:, jcol]):
            continue
        acc = acc + Wl[:, jcol, None] * c[jcol]
    return acc


def evaluate_jet(net, x, k: int, precision: str = "double") -> dict:
    """All partials D^beta(net)(x) for |beta| <= k.

    x: shape (d, npts). Returns {beta tuple: float64 array (out_dim, npts)}
    of derivative values (coefficients already multiplied by beta!)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1) if net.in_dim == 1 else x.reshape(-1, 1)
    d = net.in_dim
    if k > JET_ORDER_CAP:
        raise CapacityError(f"jet order {k} exceeds cap {JET_ORDER_CAP}")
    if d > JET_DIM_CAP:
        raise CapacityError(f"jet dimension {d} exceeds cap {JET_DIM_CAP}")
    if x.shape[0] != d:
        raise ContractViolation(f"input dim {x.shape[0]} != {d}")
    backend = get_backend(precision)
    idxs, pos, _ = _tables(d, k)
    npts = x.shape[1]
    out = {}
    with backend.context():
        coeffs = []
        for e in idxs:
            if sum(e) == 0:
                coeffs.append(backend.lift(x))
            elif sum(e) == 1:
                seed = np.zeros((d, npts))
                seed[e.index(1)] = 1.0
                coeffs.append(backend.lift(seed))
            else:
                coeffs.append(backend.zeros((d, npts)))
        jet = Jet(d, k, coeffs)
        for li, layer in enumerate(net.layers):
            jet = Jet(d, k, [
                _affine_coeff(backend, layer, c, with_bias=(i == 0))
                for i, c in enumerate(jet.coeffs)
            ])
            if li < len(net.layers) - 1:
                jet = _jet_tanh(jet, backend)
        for e, c in zip(idxs, jet.coeffs):
            fact = 1
            for comp in e:
                fact *= math.factorial(comp)
            out[e] = backend.to_float(c) * fact
    return out
