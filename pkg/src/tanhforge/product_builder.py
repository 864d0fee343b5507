"""Tanh networks multiplying 2 or d numbers, shallow and as a binary tree.

The pairwise product uses xy = ((x+y)/2)^2 - ((x-y)/2)^2 with each square
realized by a second central difference of tanh at 1/2. The shallow d-ary
product is the (1,...,1) output of the multivariate monomial net; the deep
one is a log-depth tree of pairwise nodes.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .combinatorics import MultiIndex, enumerate_indices
from .errors import ContractViolation
from .monomial_builder import build_multivariate_monomials, build_odd_monomials, \
    step_for_tolerance
from .netgraph import Layer, TanhNetwork, compose, parallelize
from .tanh_calculus import tanh_derivative

_X0 = Fraction(1, 2)
_SIGMA2_AT_HALF = tanh_derivative(2, 0.5)  # about -0.7268


def _square_error_bound(h: float, M: float, k: int) -> float:
    """Certified W^{k,inf} error of the second-difference square on |z| <= M.

    Sums the even tail of the stencil's Taylor expansion using the envelope
    |sigma^(m)| <= (2m)^(m+1); returns inf if the tail does not visibly decay."""
    Mk = max(M, 1.0)
    total = 0.0
    prev = math.inf
    for m in range(4, 31, 2):
        term = (2.0 * m) ** (m + 1) * h ** (m - 2) * Mk**m / math.factorial(m - k)
        if term > prev / 4.0:
            return math.inf  # tail must decay geometrically
        total += term
        prev = term
    return 2.0 * (total + prev) / abs(_SIGMA2_AT_HALF)


def _square_step(M: float, k: int, eps: float) -> Fraction:
    exp = -1
    while exp > -520:
        h = 2.0**exp
        if _square_error_bound(h, M, k) <= eps:
            return Fraction(1, 2 ** (-exp))
        exp -= 1
    raise ContractViolation(f"no representable step meets eps={eps}")


def build_pairwise_product(M: float, k: int, eps: float) -> TanhNetwork:
    """Inputs (x, y) in [-M, M]^2, one hidden layer of 6 neurons, output
    within eps of xy in W^{k,inf}."""
    if eps <= 0:
        raise ContractViolation("eps must be > 0")
    h = _square_step(M, k, eps / 4.0)
    hh = h / 2  # the squares act on z = (x +/- y)/2
    # xy = z1^2 - z2^2 with z1 = (x+y)/2, z2 = (x-y)/2; each square is a
    # second central difference of sigma at 1/2. Neurons ordered so that the
    # two members of each symmetric pair sit next to each other.
    W1 = [
        [hh, hh], [-hh, -hh],          # sigma(1/2 +/- h z1)
        [hh, -hh], [-hh, hh],          # sigma(1/2 +/- h z2)
        [Fraction(0), Fraction(0)], [Fraction(0), Fraction(0)],  # sigma(1/2)
    ]
    b1 = [_X0] * 6
    c = 1.0 / (_SIGMA2_AT_HALF * float(h) ** 2)
    ce = Fraction(c)
    # constant-neuron contributions of the two squares cancel exactly
    W2 = [[ce, ce, -ce, -ce, -2 * ce, 2 * ce]]
    b2 = [Fraction(0)]
    return TanhNetwork(
        layers=(Layer.from_exact(W1, b1), Layer.from_exact(W2, b2)),
        meta={"builder": "pairwise_product", "M": M, "k": k, "eps": eps,
              "h": str(h), "guaranteed": eps,
              "cancellation_warning": abs(c) * 2.0**-53 * 8 > eps / 10},
    )


def build_product_shallow(d: int, M: float, k: int, eps: float) -> TanhNetwork:
    """One hidden layer of 3*ceil((d+1)/2)*|P_{d,d}| neurons approximating
    x_1 * ... * x_d on [-M, M]^d."""
    if d < 2:
        raise ContractViolation("need d >= 2")
    inner = build_multivariate_monomials(d, d, M, k, eps)
    P = enumerate_indices(d, d)
    pos = P.position(MultiIndex((1,) * d))
    sel = [[Fraction(1 if i == pos else 0) for i in range(len(P))]]
    selector = TanhNetwork(layers=(Layer.from_exact(sel, [Fraction(0)]),), meta={})
    net = compose(inner, selector)
    meta = dict(inner.meta)
    meta.update({"builder": "product_shallow", "d": d})
    return TanhNetwork(layers=net.layers, meta=meta)


def _leibniz_amp(k: int) -> float:
    return 2.0**k


def _compose_amp(k: int, inner_norm: float) -> float:
    # Faa di Bruno style amplification of a node tolerance by its inputs
    if k == 0:
        return 1.0
    return 16.0 * (math.e**2 * k**4 * 2 * 4) ** k * max(inner_norm, 1.0) ** k


def _deep_schedule(d: int, M: float, k: int, eps: float):
    """Split eps across tree levels; returns (eps_node, per-level input bounds)."""
    depth = math.ceil(math.log2(d))
    eps_node = eps
    for _ in range(300):
        bounds = [max(M, 1.0)]
        err = 0.0
        ok = True
        for _level in range(depth):
            b = bounds[-1]
            norm_in = b + err
            err = _compose_amp(k, norm_in) * eps_node + _leibniz_amp(k) * 2.0 * norm_in * err
            bounds.append(b * b + err)
            if not math.isfinite(err):
                ok = False
                break
        if ok and err <= eps:
            return eps_node, bounds, err
        eps_node /= 2.0
    raise ContractViolation("could not schedule deep product tolerances")


def build_product_deep(d: int, M: float, k: int, eps: float) -> TanhNetwork:
    """ceil(log2 d) hidden layers, width <= 3d, output within eps of the
    product of the d inputs on [-M, M]^d."""
    if d < 2:
        raise ContractViolation("need d >= 2")
    eps_node, bounds, guaranteed = _deep_schedule(d, M, k, eps)
    depth = math.ceil(math.log2(d))
    net = None
    count = d
    for level in range(depth):
        b = bounds[level]
        nodes = []
        i = 0
        while i + 1 < count:
            nodes.append(build_pairwise_product(b, k, eps_node))
            i += 2
        if i < count:  # odd one passes through a 1-neuron identity
            nodes.append(build_odd_monomials(1, b, k, eps_node))
        level_net = nodes[0]
        for other in nodes[1:]:
            level_net = parallelize(level_net, other)
        net = level_net if net is None else compose(net, level_net)
        count = (count + 1) // 2
    meta = {"builder": "product_deep", "d": d, "M": M, "k": k, "eps": eps,
            "eps_node": eps_node, "guaranteed": guaranteed,
            "depth": depth,
            "cancellation_warning": False}
    return TanhNetwork(layers=net.layers, meta=meta)
