"""Two-hidden-layer assembly: local Taylor polynomials on a cell grid,
multiplied by partition bumps through an approximate product network.

f_hat(x) = sum over cells j of prod_hat(q_j(x), rho_{j_1}(x_1), ...,
rho_{j_d}(x_d)). All N^d polynomial outputs share one monomial bank; each
axis contributes N - 1 bump neurons; the product hidden layer is replicated
per cell. Junction affine maps are merged exactly over rationals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import enumerate_up_to
from .errors import CapacityError, ContractViolation
from .monomial_builder import build_all_monomials, build_monomials_with_constant, \
    monomial_output_index
from .netgraph import Layer, TanhNetwork, _exact_to_float
from .partition_builder import make_spec
from .product_builder import build_pairwise_product, build_product_shallow

_CELL_CAP = 100_000
_C_FLOOR = 1e-9  # stands in for C when all Taylor remainders vanish


@dataclass(frozen=True)
class BuildPlan:
    d: int
    s: int
    k: int
    N: int
    delta: float
    C_const: float
    eps: float
    eta: float
    h_mult: float
    alpha: float
    M_prod: float
    norm_k: float
    f_label: str


def taylor_polynomial(f, center, s: int) -> dict:
    """Degree s-1 Taylor coefficients of f at center, re-expanded from the
    shifted basis (x - c)^alpha to exact rational coefficients over the
    global monomials x^gamma."""
    d = f.d
    center = tuple(Fraction(c) for c in center)
    x0 = np.array([[float(c)] for c in center])
    out: dict[tuple, Fraction] = {}
    for alpha in enumerate_up_to(s - 1, d):
        a = Fraction(float(f.partial(alpha.entries, x0)[0])) / alpha.factorial()
        if a == 0:
            continue
        for gamma in itertools.product(*(range(ai + 1) for ai in alpha)):
            c = a
            for ai, gi, ci in zip(alpha, gamma, center):
                c *= math.comb(ai, gi) * (-ci) ** (ai - gi)
            if c:
                out[gamma] = out.get(gamma, Fraction(0)) + c
    return out


def _sobolev_c(d: int, k: int, s: int, seminorm_s: float) -> float:
    return max((1.5 * d) ** (s - l) / math.factorial(s - l)
               for l in range(k + 1)) * seminorm_s


def plan(f, d: int, s: int, k: int, N: int, delta: float) -> BuildPlan:
    """Tolerance schedule for the two-hidden-layer construction."""
    if d != f.d:
        raise ContractViolation(f"function dimension {f.d} != {d}")
    if N <= 1.5 * d:
        raise ContractViolation(f"need N > N_0(d) = {1.5 * d}")
    if not 0 < delta < 5 / 6:
        raise ContractViolation(f"delta must lie in (0, 5/6), got {delta}")
    if k >= s:
        raise ContractViolation("need k < s")
    C = _sobolev_c(d, k, s, f.seminorm(s))
    Ct = max(C, _C_FLOOR)
    norm_k = max(f.seminorm(m) for m in range(k + 1))
    kk = float(k**k) if k else 1.0
    eps = delta**2 * min(1.0, Ct) / (
        N ** (2 * s + 2 * d + k) * kk * 2.0 ** ((k + 1) * d) * d * max(1.0, norm_k))
    eta = delta * Ct / (6.0 * N**s)
    if norm_k > 0:
        eta = min(eta, norm_k)
    spec = make_spec(d, N, k, eps)
    M_prod = float(math.ceil(max(1.0, f.seminorm(0) + Ct / N ** (s - k) + eta)))
    ck = 1.0 if k == 0 else 16.0 * (math.e**2 * k**4) ** k
    h_mult = 2.0**k * delta * Ct / (
        3.0 * N ** (d + s - k) * ck * (d + 1.0) ** d * d ** (2 * k)
        * (2.0 * norm_k + Ct + (2.0 * spec.alpha * k) ** (k + 1) if k else 1.0) ** k)
    return BuildPlan(d=d, s=s, k=k, N=N, delta=delta, C_const=C, eps=eps,
                     eta=eta, h_mult=h_mult, alpha=spec.alpha, M_prod=M_prod,
                     norm_k=norm_k, f_label=f.label)


def _odd_cover(m: int) -> int:
    m = max(1, m)
    return m if m % 2 == 1 else m + 1


def _cells(N: int, d: int):
    return itertools.product(range(1, N + 1), repeat=d)


def _cell_center(j, N: int):
    return tuple(Fraction(2 * ji - 1, 2 * N) for ji in j)


def predicted_widths(d: int, s: int, N: int) -> tuple[int, int]:
    """Exact hidden widths the assembly will realize."""
    if d == 1:
        return 3 * ((_odd_cover(s - 1) + 1) // 2) + (N - 1), 6 * N
    bank = 3 * ((_odd_cover(s - 1) + 1) // 2) * math.comb(s - 1 + d, s - 1)
    prod = 3 * math.ceil((d + 2) / 2) * math.comb(2 * d + 1, d + 1)
    return bank + d * (N - 1), prod * N**d


def _exact_layer(We, be) -> Layer:
    We = np.asarray(We, dtype=object)
    be = np.asarray(be, dtype=object)
    return Layer(W=_exact_to_float(We), b=_exact_to_float(be), W_exact=We, b_exact=be)


def assemble(f, bp: BuildPlan) -> TanhNetwork:
    """Build the two-hidden-layer approximation described by the plan."""
    d, s, k, N = bp.d, bp.s, bp.k, bp.N
    if N**d > _CELL_CAP:
        raise CapacityError(f"{N**d} product nodes exceed cap {_CELL_CAP}")
    coeffs = {j: taylor_polynomial(f, _cell_center(j, N), s) for j in _cells(N, d)}
    sum_abs = max((float(sum(abs(c) for a, c in g.items() if sum(a) > 0))
                   for g in coeffs.values()), default=0.0)
    eps_bank = bp.eta / max(1.0, sum_abs)
    if d == 1:
        bank = build_all_monomials(_odd_cover(s - 1), 1.0, k, eps_bank)

        def row_of(alpha):
            return alpha[0] - 1
    else:
        bank = build_monomials_with_constant(s - 1, d, 1.0, k, eps_bank)

        def row_of(alpha):
            return monomial_output_index(s - 1, d, alpha)
    prod = build_pairwise_product(bp.M_prod, k, bp.h_mult) if d == 1 \
        else build_product_shallow(d + 1, bp.M_prod, k, bp.h_mult)
    Hm = bank.layers[0].out_dim
    H1 = Hm + d * (N - 1)
    Hp = prod.layers[0].out_dim
    a = Fraction(bp.alpha)

    # first hidden layer: monomial bank neurons then d*(N-1) bump neurons
    zero = Fraction(0)
    A1_W = np.full((H1, d), zero, dtype=object)
    A1_b = np.full(H1, zero, dtype=object)
    A1_W[:Hm] = bank.layers[0].W_exact
    A1_b[:Hm] = bank.layers[0].b_exact
    for i in range(d):
        for t in range(1, N):
            r = Hm + i * (N - 1) + (t - 1)
            A1_W[r, i] = a
            A1_b[r] = -a * Fraction(t, N)

    M2W, M2b = bank.layers[1].W_exact, bank.layers[1].b_exact
    P1W, P1b = prod.layers[0].W_exact, prod.layers[0].b_exact
    P2W, P2b = prod.layers[1].W_exact, prod.layers[1].b_exact
    half = Fraction(1, 2)

    A2_W = np.full((N**d * Hp, H1), zero, dtype=object)
    A2_b = np.full(N**d * Hp, zero, dtype=object)
    A3_W = np.full((1, N**d * Hp), zero, dtype=object)
    A3_b = np.array([zero], dtype=object)
    for ci, j in enumerate(_cells(N, d)):
        U = np.full((d + 1, H1), zero, dtype=object)
        ub = np.full(d + 1, zero, dtype=object)
        for alpha, g in coeffs[j].items():
            if sum(alpha) == 0:
                ub[0] += g
            else:
                r = row_of(alpha)
                U[0, :Hm] += g * M2W[r]
                ub[0] += g * M2b[r]
        for i, ji in enumerate(j):
            col = Hm + i * (N - 1)
            if ji == 1:
                U[i + 1, col] = -half
                ub[i + 1] = half
            elif ji == N:
                U[i + 1, col + N - 2] = half
                ub[i + 1] = half
            else:
                U[i + 1, col + ji - 2] = half
                U[i + 1, col + ji - 1] = -half
        lo = ci * Hp
        A2_W[lo:lo + Hp] = np.dot(P1W, U)
        A2_b[lo:lo + Hp] = np.dot(P1W, ub) + P1b
        A3_W[0, lo:lo + Hp] = P2W[0]
        A3_b[0] += P2b[0]

    guaranteed_linf = (1 + bp.delta) * bp.C_const / N**s
    guaranteed = guaranteed_linf
    if k >= 1:
        beta = k**3 * 2.0**d * math.sqrt(d) * max(1.0, math.sqrt(bp.norm_k)) / (
            bp.delta * min(1.0, math.sqrt(max(bp.C_const, _C_FLOOR))))
        guaranteed = 3.0**d * (1 + bp.delta) * (2.0 * (k + 1)) ** (3 * k) \
            * max(bp.alpha / N, math.log(beta * N ** (s + d + 2))) ** k \
            * bp.C_const / N ** (s - k)
    warn = bool(bank.meta.get("cancellation_warning")
                or prod.meta.get("cancellation_warning"))
    meta = {
        "builder": "two_layer_assembly", "f": bp.f_label,
        "d": d, "s": s, "k": k, "N": N, "delta": bp.delta,
        "C_const": bp.C_const, "eps": bp.eps, "eta": bp.eta,
        "eps_bank": eps_bank, "h_mult": bp.h_mult, "alpha": bp.alpha,
        "M_prod": bp.M_prod,
        "widths_predicted": predicted_widths(d, s, N),
        "guaranteed": guaranteed, "guaranteed_linf": guaranteed_linf,
        "cancellation_warning": warn,
    }
    net = TanhNetwork(layers=(_exact_layer(A1_W, A1_b), _exact_layer(A2_W, A2_b),
                              _exact_layer(A3_W, A3_b)), meta=meta)
    if net.layer_dims[1:3] != meta["widths_predicted"]:
        raise ContractViolation("built widths disagree with prediction")
    return net


def assemble_shallow_analytic(f, s: int, delta: float) -> TanhNetwork:
    """One hidden layer: a single Taylor polynomial of degree s-1 at the
    domain center, for functions with a declared analytic envelope
    |f|_{W^{m,inf}} <= Q R^(-m) m!."""
    if f.Q is None or f.R is None:
        raise ContractViolation(f"{f.label} declares no (Q, R) envelope")
    d = f.d
    if f.R <= d / 2:
        raise ContractViolation(f"need R > d/2, got R = {f.R}")
    if not 0 < delta < 5 / 6:
        raise ContractViolation(f"delta must lie in (0, 5/6), got {delta}")
    center = (Fraction(1, 2),) * d
    g = taylor_polynomial(f, center, s)
    sum_abs = float(sum(abs(c) for a, c in g.items() if sum(a) > 0))
    envelope = f.Q * (d / (2.0 * f.R)) ** s
    eps_mono = delta * envelope / max(1.0, sum_abs)
    if d == 1:
        bank = build_all_monomials(_odd_cover(s - 1), 1.0, 0, eps_mono)

        def row_of(alpha):
            return alpha[0] - 1
    else:
        bank = build_monomials_with_constant(s - 1, d, 1.0, 0, eps_mono)

        def row_of(alpha):
            return monomial_output_index(s - 1, d, alpha)
    Hm = bank.layers[0].out_dim
    M2W, M2b = bank.layers[1].W_exact, bank.layers[1].b_exact
    row = np.full((1, Hm), Fraction(0), dtype=object)
    bias = np.array([Fraction(0)], dtype=object)
    for alpha, c in g.items():
        if sum(alpha) == 0:
            bias[0] += c
        else:
            r = row_of(alpha)
            row[0] += c * M2W[r]
            bias[0] += c * M2b[r]
    meta = {
        "builder": "shallow_analytic", "f": f.label, "d": d, "s": s,
        "delta": delta, "Q": f.Q, "R": f.R, "eps_mono": eps_mono,
        "widths_predicted": (Hm,),
        "guaranteed": (1 + delta) * envelope,
        "cancellation_warning": bool(bank.meta.get("cancellation_warning")),
    }
    return TanhNetwork(layers=(bank.layers[0], _exact_layer(row, bias)), meta=meta)
