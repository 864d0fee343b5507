"""Approximate partition of unity from shifted tanh ramps.

rho_j^N is a half-difference of two sigmoidal ramps with inflections at the
cell boundaries (j-1)/N and j/N; the boundary bumps keep one ramp and a
constant so that sum_j rho_j == 1 identically. Cube weights Phi are products
of per-axis bumps. Certification samples values and derivatives on cell grids
against the closed-form closeness/decay bounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ContractViolation, InternalConsistencyError
from .netgraph import Layer, TanhNetwork
from .tanh_calculus import decay_threshold, tanh_derivative


@dataclass(frozen=True)
class PartitionSpec:
    d: int
    N: int
    k: int
    eps: float
    R: float
    alpha: float


def select_alpha(N: int, k: int, eps: float, R: float | None = None) -> float:
    """Slope parameter making every bump 'sharp enough': 1 - sigma(alpha/N)
    <= eps and alpha^m |sigma^(m)(alpha/N)| <= eps for 1 <= m <= k."""
    if not 0 < eps < 0.25:
        raise ContractViolation(f"eps must lie in (0, 1/4), got {eps}")
    if k < 0:
        raise ContractViolation("k must be >= 0")
    if R is None:
        R = decay_threshold(max(k, 1))
    # the pad keeps the post-hoc checks from failing to roundoff: the log
    # term is the exact inversion of its condition, and near eps ~ 1e-15 the
    # double-precision 1 - tanh carries an ulp-of-1 error, so a whole-unit
    # margin (factor e^-1 on the tail) is needed rather than an epsilon pad
    if k == 0:
        alpha = N * max(R, 0.5 * math.log(2.0 / eps - 1.0) + 0.5)
    else:
        alpha = N * max(R, math.log(
            (2.0 * k) ** (k + 1) * (N * k) ** k / (math.e**k * eps)) + 0.5)
    x = alpha / N
    if 1.0 - math.tanh(x) > eps:
        raise InternalConsistencyError("alpha check failed: 1 - sigma(alpha/N) > eps")
    for m in range(1, k + 1):
        if alpha**m * abs(tanh_derivative(m, x)) > eps:
            raise InternalConsistencyError(f"alpha check failed at derivative order {m}")
    return alpha


def make_spec(d: int, N: int, k: int, eps: float, R: float | None = None) -> PartitionSpec:
    if R is None:
        R = decay_threshold(max(k, 1))
    return PartitionSpec(d=d, N=N, k=k, eps=eps, R=R,
                         alpha=select_alpha(N, k, eps, R))


def bump_value(j: int, spec: PartitionSpec, y, order: int = 0):
    """rho_j^N(y) or its order-th derivative, evaluated analytically."""
    N, a = spec.N, spec.alpha
    y = np.asarray(y, dtype=float)

    def ramp(c, m):
        return a**m * tanh_derivative(m, a * (y - c / N)) if m else np.tanh(a * (y - c / N))

    m = order
    if j == 1:
        out = -0.5 * ramp(1, m)
        if m == 0:
            out = out + 0.5
        return out
    if j == spec.N:
        out = 0.5 * ramp(N - 1, m)
        if m == 0:
            out = out + 0.5
        return out
    return 0.5 * (ramp(j - 1, m) - ramp(j, m))


def build_bump(j: int, spec: PartitionSpec) -> TanhNetwork:
    """Network form of rho_j^N: 1 hidden neuron at the boundary, else 2.

    Weights carry exact rationals built from the float alpha, so the
    inflection points sit exactly at the cell boundaries."""
    if not 1 <= j <= spec.N:
        raise ContractViolation(f"j must be in 1..{spec.N}")
    a = Fraction(spec.alpha)
    N = spec.N
    if j == 1:
        W1, b1 = [[a]], [-a * Fraction(1, N)]
        W2, b2 = [[Fraction(-1, 2)]], [Fraction(1, 2)]
    elif j == N:
        W1, b1 = [[a]], [-a * Fraction(N - 1, N)]
        W2, b2 = [[Fraction(1, 2)]], [Fraction(1, 2)]
    else:
        W1 = [[a], [a]]
        b1 = [-a * Fraction(j - 1, N), -a * Fraction(j, N)]
        W2 = [[Fraction(1, 2), Fraction(-1, 2)]]
        b2 = [Fraction(0)]
    return TanhNetwork(
        layers=(Layer.from_exact(W1, b1), Layer.from_exact(W2, b2)),
        meta={"builder": "bump", "j": j, "N": N, "alpha": spec.alpha},
    )


def ideal_cube_weight(j, spec: PartitionSpec, x) -> np.ndarray:
    """Phi_j(x) = prod_i rho_{j_i}(x_i); x has shape (d, npts)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.ones(x.shape[1])
    for i, ji in enumerate(j):
        out = out * bump_value(ji, spec, x[i])
    return out


def cube_weight_derivative(j, spec: PartitionSpec, x, beta) -> np.ndarray:
    """D^beta Phi_j(x), separable product of per-axis derivatives."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.ones(x.shape[1])
    for i, (ji, bi) in enumerate(zip(j, beta)):
        out = out * bump_value(ji, spec, x[i], order=bi)
    return out


_CELL_POINTS = {1: 256, 2: 48, 3: 12}


def cell_grid(j, spec: PartitionSpec, points_per_axis: int | None = None) -> np.ndarray:
    """Dense grid on the cell I_j = prod [(j_i-1)/N, j_i/N], shape (d, npts)."""
    n = points_per_axis or _CELL_POINTS.get(spec.d, 8)
    axes = [np.linspace((ji - 1) / spec.N, ji / spec.N, n) for ji in j]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.vstack([m.ravel() for m in mesh])


def _betas_up_to(d: int, k: int):
    for beta in itertools.product(range(k + 1), repeat=d):
        if sum(beta) <= k:
            yield beta


def _neighbors(j, N, d):
    for v in itertools.product((-1, 0, 1), repeat=d):
        jj = tuple(ji + vi for ji, vi in zip(j, v))
        if all(1 <= c <= N for c in jj):
            yield jj


def certify_close(spec: PartitionSpec, j) -> float:
    """Max W^{k,inf}-sampled deviation of the near-neighbor Phi sum from 1 on
    I_j; raises the certified bound into meta via the caller. Returns margin
    = bound - deviation (>= 0 means pass)."""
    if spec.eps >= 0.25:
        raise ContractViolation("eps must be < 1/4")
    x = cell_grid(j, spec)
    near = list(_neighbors(j, spec.N, spec.d))
    deviation = 0.0
    for beta in _betas_up_to(spec.d, spec.k):
        acc = np.zeros(x.shape[1])
        for jj in near:
            acc = acc + cube_weight_derivative(jj, spec, x, beta)
        if sum(beta) == 0:
            acc = acc - 1.0
        deviation = max(deviation, float(np.max(np.abs(acc))))
    bound = 2.0 ** (spec.d * spec.k) * spec.d * spec.eps
    return bound - deviation


def certify_far(spec: PartitionSpec, j, v) -> float:
    """W^{k,inf}-sampled size of the far bump Phi_{j+v} on I_j versus the
    decay bound. Returns margin = bound - norm."""
    if max(abs(c) for c in v) < 2:
        raise ContractViolation("offset must have sup-norm >= 2")
    jj = tuple(ji + vi for ji, vi in zip(j, v))
    if not all(1 <= c <= spec.N for c in jj):
        raise ContractViolation(f"{jj} outside the index cube")
    x = cell_grid(j, spec)
    norm = 0.0
    for beta in _betas_up_to(spec.d, spec.k):
        vals = cube_weight_derivative(jj, spec, x, beta)
        norm = max(norm, float(np.max(np.abs(vals))))
    bound = max(1.0, (2.0 * spec.k) ** (2 * spec.k) * spec.alpha**spec.k) * spec.eps
    return bound - norm


def figure_rows(spec: PartitionSpec, npts: int = 1001):
    """Per-point table (y, rho_1..rho_N, near_sum, far_sum) for d=1."""
    if spec.d != 1:
        raise ContractViolation("table is for d = 1")
    ys = np.linspace(0.0, 1.0, npts)
    rhos = np.vstack([bump_value(j, spec, ys) for j in range(1, spec.N + 1)])
    cell = np.clip(np.ceil(ys * spec.N).astype(int), 1, spec.N)
    near = np.zeros(npts)
    for j in range(1, spec.N + 1):
        mask = np.abs(cell - j) <= 1
        near[mask] += rhos[j - 1][mask]
    far = rhos.sum(axis=0) - near
    return ys, rhos, near, far
