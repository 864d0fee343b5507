"""Shallow tanh networks computing monomials to a requested Sobolev tolerance.

Univariate powers come from central finite-difference stencils applied to tanh
at 0, folded in half via oddness. Even powers are recovered by an output-layer
recursion over two shifted stencils. Multivariate monomials combine powers of
linear forms through the inverse of the Dyson matrix.

All structural weights are exact rationals (the step h is a power of two), so
high-precision evaluation is not polluted by float64 weight rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import MultiIndex, enumerate_indices, multinomial
from .errors import ContractViolation, NumericalConditioningError
from .netgraph import Layer, TanhNetwork, compose, parallelize
from .tanh_calculus import tanh_derivative_at_zero

_MIN_H_EXP_TIMES_P = -990  # keep h**p comfortably inside float64 range


def stencil_coefficients(p: int) -> list[int]:
    """Alternating binomial coefficients (-1)^i C(p,i) of the p-th difference."""
    return [(-1) ** i * math.comb(p, i) for i in range(p + 1)]


def katsuura_sum(p: int, l: int) -> Fraction:
    """Exact value of sum_i (-1)^i C(p,i) (p/2 - i)^l; equals p! iff l = p
    (for l <= p+1)."""
    acc = Fraction(0)
    for i, c in enumerate(stencil_coefficients(p)):
        acc += c * (Fraction(p, 2) - i) ** l
    return acc


@dataclass(frozen=True)
class StencilPlan:
    p: int
    h: Fraction
    M: float
    k: int
    eps: float
    bound_constant: float
    guaranteed: float
    warning: bool


def step_for_tolerance(p: int, M: float, k: int, eps: float) -> StencilPlan:
    """Power-of-two step h with ((2(p+2)pM)^(p+3) + (2pk)^(k+1)) h^2 <= eps,
    h < 2/(pM) and h < 1."""
    if eps <= 0:
        raise ContractViolation("eps must be > 0")
    B = (2.0 * (p + 2) * p * M) ** (p + 3) + (2.0 * p * k) ** (k + 1)
    # exponent in log domain so that extreme eps or B cannot under/overflow
    log2_B = math.log2(B) if math.isfinite(B) else \
        (p + 3) * math.log2(2.0 * (p + 2) * p * max(M, 1e-300))
    log2_ideal = 0.5 * (math.log2(eps) - log2_B)
    log2_cap = min(log2_ideal,
                   math.log2(0.999 * 2.0 / (p * max(M, 1e-300))),
                   math.log2(0.999))
    exp = math.floor(log2_cap)
    warning = False
    if exp * p < _MIN_H_EXP_TIMES_P:
        exp = _MIN_H_EXP_TIMES_P // p
        warning = True
    h = Fraction(1, 2 ** (-exp)) if exp < 0 else Fraction(2**exp)
    guaranteed = B * float(h) ** 2
    return StencilPlan(p=p, h=h, M=M, k=k, eps=eps, bound_constant=B,
                       guaranteed=guaranteed, warning=warning or guaranteed > eps)


def _folded_stencil(p: int, h: Fraction) -> dict[int, Fraction]:
    """Output weights of the odd-folded p-th stencil, normalized to isolate y^p.

    Keys are odd integers m2 = p - 2i (twice the node multiplier); the neuron
    is sigma((m2/2) h y) and the weight is 2 (-1)^i C(p,i) / (sigma^(p)(0) h^p)."""
    norm = tanh_derivative_at_zero(p) * h**p
    out = {}
    for i in range((p + 1) // 2):
        out[p - 2 * i] = Fraction(2 * (-1) ** i * math.comb(p, i)) / norm
    return out


def build_odd_monomials(s: int, M: float, k: int, eps: float) -> TanhNetwork:
    """One hidden layer of (s+1)/2 neurons; output row (p+1)/2 approximates
    y^p on [-M, M] for each odd p <= s, to W^{k,inf} error eps."""
    if s < 1 or s % 2 == 0:
        raise ContractViolation(f"s must be odd and >= 1, got {s}")
    plan = step_for_tolerance(s, M, k, eps)
    h = plan.h
    nh = (s + 1) // 2
    # neuron j computes sigma(((s - 2j)/2) h y)
    W1 = [[Fraction(s - 2 * j, 2) * h] for j in range(nh)]
    b1 = [Fraction(0)] * nh
    W2 = [[Fraction(0)] * nh for _ in range(nh)]
    for p in range(1, s + 1, 2):
        row = W2[(p - 1) // 2]
        for m2, w in _folded_stencil(p, h).items():
            row[(s - m2) // 2] = w
    b2 = [Fraction(0)] * nh
    return TanhNetwork(
        layers=(Layer.from_exact(W1, b1), Layer.from_exact(W2, b2)),
        meta={"builder": "odd_monomials", "s": s, "M": M, "k": k, "eps": eps,
              "h": str(h), "guaranteed": plan.guaranteed,
              "cancellation_warning": plan.warning},
    )


def _internal_eps_all(s: int, eps: float) -> float:
    return eps / (math.sqrt(math.e) * (2.0 * math.e * s) ** (s / 2.0))


def _all_monomial_rows(s: int, h: Fraction):
    """Rows over the 3-group hidden layer (groups beta = 0, +1/s, -1/s) and
    biases realizing y^p for p = 1..s via the even-power recursion."""
    alpha = Fraction(1, s)
    nh = (s + 1) // 2
    width = 3 * nh

    def slot(group: int, m2: int) -> int:
        return group * nh + (s - m2) // 2

    rows: dict[int, tuple[list[Fraction], Fraction]] = {}
    for p in range(1, s + 1, 2):
        row = [Fraction(0)] * width
        for m2, w in _folded_stencil(p, h).items():
            row[slot(0, m2)] = w
        rows[p] = (row, Fraction(0))
    for p in range(2, s + 1, 2):
        n = p // 2
        q = 2 * n + 1
        row = [Fraction(0)] * width
        for m2, w in _folded_stencil(q, h).items():
            row[slot(1, m2)] += w
            row[slot(2, m2)] -= w
        bias = Fraction(-2) * alpha**q
        for kk in range(1, n):
            c = Fraction(2 * math.comb(q, 2 * kk)) * alpha ** (2 * (n - kk) + 1)
            sub_row, sub_bias = rows[2 * kk]
            row = [r - c * sr for r, sr in zip(row, sub_row)]
            bias -= c * sub_bias
        denom = 2 * alpha * q
        rows[p] = ([r / denom for r in row], bias / denom)
    return rows, alpha


def build_all_monomials(s: int, M: float, k: int, eps: float) -> TanhNetwork:
    """One hidden layer of 3(s+1)/2 neurons; output p approximates y^p on
    [-M, M] for every 1 <= p <= s, to W^{k,inf} error eps."""
    if s < 1 or s % 2 == 0:
        raise ContractViolation(f"s must be odd and >= 1, got {s}")
    eps_in = _internal_eps_all(s, eps)
    plan = step_for_tolerance(s, M + 1.0, k, eps_in)
    h = plan.h
    nh = (s + 1) // 2
    alpha = Fraction(1, s)
    betas = [Fraction(0), alpha, -alpha]
    W1, b1 = [], []
    for beta in betas:
        for j in range(nh):
            m = Fraction(s - 2 * j, 2) * h
            W1.append([m])
            b1.append(m * beta)
    rows, _ = _all_monomial_rows(s, h)
    W2 = [rows[p][0] for p in range(1, s + 1)]
    b2 = [rows[p][1] for p in range(1, s + 1)]
    return TanhNetwork(
        layers=(Layer.from_exact(W1, b1), Layer.from_exact(W2, b2)),
        meta={"builder": "all_monomials", "s": s, "M": M, "k": k, "eps": eps,
              "eps_internal": eps_in, "h": str(h), "guaranteed": plan.guaranteed,
              "cancellation_warning": plan.warning},
    )


def dyson_matrix(n: int, q: int) -> np.ndarray:
    """Exact rational matrix D[a,b] = multinomial(n,b) a^b / n^n over P_{n,q}."""
    P = enumerate_indices(n, q)
    size = len(P)
    D = np.empty((size, size), dtype=object)
    nn = Fraction(n) ** n
    for ia, a in enumerate(P):
        for ib, b in enumerate(P):
            prod = Fraction(1)
            for ai, bi in zip(a, b):
                prod *= Fraction(ai) ** bi  # 0**0 == 1
            D[ia, ib] = multinomial(n, b) * prod / nn
    return D


def _exact_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting over Fractions, AX = B."""
    n = A.shape[0]
    A = A.copy()
    X = B.copy()
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r, col]))
        if A[piv, col] == 0:
            raise NumericalConditioningError("singular Dyson matrix")
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            X[[col, piv]] = X[[piv, col]]
        for r in range(col + 1, n):
            f = A[r, col] / A[col, col]
            if f:
                A[r, col:] = A[r, col:] - f * A[col, col:]
                X[r] = X[r] - f * X[col]
    for col in range(n - 1, -1, -1):
        X[col] = (X[col] - sum(A[col, j] * X[j] for j in range(col + 1, n))) / A[col, col]
    return X


def dyson_inverse(n: int, q: int) -> np.ndarray:
    D = dyson_matrix(n, q)
    size = D.shape[0]
    eye = np.empty((size, size), dtype=object)
    for i in range(size):
        for j in range(size):
            eye[i, j] = Fraction(1 if i == j else 0)
    return _exact_solve(D, eye)


def dyson_inverse_norm(n: int, q: int) -> float:
    inv = dyson_inverse(n, q)
    return float(max(sum(abs(v) for v in row) for row in inv))


def dyson_norm_bound(n: int, q: int) -> float:
    size = math.comb(n + q - 1, n)
    return float(math.factorial(n) ** 3 * size**2 * 2**n)


def _affine_net(W_rows, b_rows) -> TanhNetwork:
    return TanhNetwork(layers=(Layer.from_exact(W_rows, b_rows),), meta={})


def build_multivariate_monomials(n: int, q: int, M: float, k: int,
                                 eps: float) -> TanhNetwork:
    """One hidden layer of 3*ceil((n+1)/2)*|P_{n,q}| neurons whose output
    iota(beta) approximates omega^beta on [-M, M]^q, W^{k,inf} error <= eps."""
    if n < 1 or q < 1:
        raise ContractViolation("need n >= 1 and q >= 1")
    P = enumerate_indices(n, q)
    size = len(P)
    s_odd = n if n % 2 == 1 else n + 1
    Dinv = dyson_inverse(n, q)
    dinv_norm = float(max(sum(abs(v) for v in row) for row in Dinv))
    faa = 16.0 * (math.e**2 * k**4 * q**2) ** k * max(1.0, M) ** k
    eps_uni = eps / (dinv_norm * faa)
    psi = build_all_monomials(s_odd, M, k, eps_uni)
    # per-alpha subnet: psi composed with the linear form h_alpha
    subs = []
    for a in P:
        h_row = [[Fraction(ai, n) for ai in a]]
        subs.append(compose(_affine_net(h_row, [Fraction(0)]), psi))
    par = subs[0]
    for sub in subs[1:]:
        par = parallelize(par, sub)
    # fan the q inputs out to every subnet
    fan_W = [[Fraction(1 if j == i % q else 0) for j in range(q)]
             for i in range(q * size)]
    fanned = compose(_affine_net(fan_W, [Fraction(0)] * (q * size)), par)
    # output: select power-n row of each subnet, multiply by D^{-1}
    out_W = [[Fraction(0)] * (s_odd * size) for _ in range(size)]
    for ib in range(size):
        for ia in range(size):
            out_W[ib][ia * s_odd + (n - 1)] = Dinv[ib, ia]
    net = compose(fanned, _affine_net(out_W, [Fraction(0)] * size))
    cond = float(np.linalg.cond(np.array(
        [[float(v) for v in row] for row in dyson_matrix(n, q)])))
    meta = {"builder": "multivariate_monomials", "n": n, "q": q, "M": M,
            "k": k, "eps": eps, "eps_uni": eps_uni,
            "dinv_norm": dinv_norm, "dinv_norm_bound": dyson_norm_bound(n, q),
            "dyson_cond": cond,
            "cancellation_warning": psi.meta["cancellation_warning"]}
    return TanhNetwork(layers=net.layers, meta=meta)


def monomial_output_index(s: int, d: int, beta) -> int:
    """Output row of build_monomials_with_constant(s, d, ...) computing x^beta."""
    beta = tuple(beta)
    P = enumerate_indices(s, d + 1)
    return P.position(MultiIndex((s - sum(beta),) + beta))


def build_monomials_with_constant(s: int, d: int, M: float, k: int,
                                  eps: float) -> TanhNetwork:
    """All d-variate monomials of total degree <= s at once, via the embedding
    omega = (1, x); output index given by monomial_output_index."""
    inner = build_multivariate_monomials(s, d + 1, max(1.0, M), k, eps)
    embed_W = [[Fraction(0)] * d] + [[Fraction(1 if j == i else 0) for j in range(d)]
                                     for i in range(d)]
    embed_b = [Fraction(1)] + [Fraction(0)] * d
    net = compose(_affine_net(embed_W, embed_b), inner)
    meta = dict(inner.meta)
    meta.update({"builder": "monomials_with_constant", "s": s, "d": d})
    return TanhNetwork(layers=net.layers, meta=meta)
