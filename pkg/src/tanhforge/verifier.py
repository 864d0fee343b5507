"""Empirical Sobolev-error measurement, precision-mode selection, rate
fitting, and the deterministic certification ledger."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import enumerate_indices
from .errors import BoundViolation, ContractViolation, NumericalConditioningError
from .jets import evaluate_jet
from .netgraph import cancellation_floor

_AXIS_POINTS = {1: 10_000, 2: 100, 3: 30}
_MAX_MP_BITS = 6000


def axis_points(n: int) -> np.ndarray:
    """n points of [0, 1]: half uniform, half clustered toward both edges,
    where partition transitions are sharpest. Includes 0 and 1."""
    n_uni = n // 2
    n_cheb = n - n_uni
    uni = np.linspace(0.0, 1.0, max(n_uni, 2))[:n_uni]
    cheb = 0.5 * (1.0 - np.cos(np.pi * np.linspace(0.0, 1.0, n_cheb)))
    return np.sort(np.concatenate([uni, cheb]))


def default_grid(d: int, n_axis: int | None = None, cells: int | None = None) -> np.ndarray:
    """Verification grid of shape (d, npts); 10^4 points for d = 1 and 2,
    30^3 for d = 3. With cells = N, the cell boundaries j/N are included."""
    if d not in _AXIS_POINTS and n_axis is None:
        raise ContractViolation(f"no default grid for d = {d}")
    n = n_axis or _AXIS_POINTS[d]
    ax = axis_points(n)
    if cells:
        ax = np.sort(np.concatenate([ax, np.arange(1, cells) / cells]))
    if d == 1:
        return ax.reshape(1, -1)
    mesh = np.meshgrid(*([ax] * d), indexing="ij")
    return np.vstack([m.ravel() for m in mesh])


def select_precision(net, domain_bound: float, target: float) -> tuple[str, float]:
    """Cheapest backend whose cancellation floor sits below target / 10."""
    if target <= 0:
        raise ContractViolation("target must be > 0")
    for mode, u in (("double", 2.0**-53), ("dd", 2.0**-104)):
        floor = cancellation_floor(net, domain_bound, u)
        if floor <= target / 10:
            return mode, floor
    bits = 113
    while bits <= _MAX_MP_BITS:
        floor = cancellation_floor(net, domain_bound, 2.0 ** (1 - bits))
        if floor <= target / 10:
            return f"mp:{bits}", floor
        bits += 30
    raise NumericalConditioningError(
        f"no precision up to {_MAX_MP_BITS} bits reaches floor {target / 10}")


@dataclass(frozen=True)
class ErrorReport:
    k: int
    grid_points: int
    seminorm_errors: dict
    empirical: float
    guaranteed: float | None
    slack: float | None
    precision: str
    floor: float
    cancellation_warning: bool
    violation: bool

    def rows(self):
        for m in sorted(self.seminorm_errors):
            yield m, self.seminorm_errors[m]


def _chunks(x: np.ndarray, width: int):
    step = max(1, 200_000 // max(width, 1))
    for lo in range(0, x.shape[1], step):
        yield x[:, lo:lo + step]


def sobolev_error(net, f, k: int, grid: np.ndarray | None = None,
                  precision: str | None = None, check: bool = True) -> ErrorReport:
    """Max grid error per derivative order m <= k between f's oracle and the
    network (jet-differentiated for m >= 1)."""
    d = f.d
    if grid is None:
        grid = default_grid(d, cells=net.meta.get("N"))
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    guaranteed = net.meta.get("guaranteed")
    floor = 0.0
    if precision is None:
        target = guaranteed or net.meta.get("eps") or 1e-10
        precision, floor = select_precision(net, 1.0, target)
    else:
        u = {"double": 2.0**-53, "dd": 2.0**-104}.get(precision)
        if u is None and precision.startswith(("mp:", "high:")):
            u = 2.0 ** (1 - int(precision.split(":")[1]))
        floor = cancellation_floor(net, 1.0, u) if u else 0.0
    width = max(net.layer_dims)
    errs: dict[int, float] = {m: 0.0 for m in range(k + 1)}
    for x in _chunks(grid, width):
        if k == 0:
            yh = net.evaluate(x, precision)
            dev = np.abs(yh[0] - f.evaluate(x))
            errs[0] = max(errs[0], float(np.max(dev)))
        else:
            jets = evaluate_jet(net, x, k, precision)
            for beta, val in jets.items():
                m = sum(beta)
                dev = np.abs(val[0] - f.partial(beta, x))
                errs[m] = max(errs[m], float(np.max(dev)))
    empirical = max(errs.values())
    warning = bool(net.meta.get("cancellation_warning"))
    violation = guaranteed is not None and empirical > guaranteed and not warning
    report = ErrorReport(k=k, grid_points=grid.shape[1], seminorm_errors=errs,
                         empirical=empirical, guaranteed=guaranteed,
                         slack=(guaranteed / empirical) if guaranteed and empirical > 0 else None,
                         precision=precision, floor=floor,
                         cancellation_warning=warning, violation=violation)
    if check and violation:
        raise BoundViolation(
            f"empirical {empirical:.3e} exceeds guaranteed {guaranteed:.3e} "
            f"with no cancellation warning", report)
    return report


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    max_residual: float
    algebraic: bool

    def __float__(self):
        return self.slope


def rate_fit(points) -> RateFit:
    """Least-squares slope of log(error) against log(N)."""
    points = list(points)
    if len(points) < 3:
        raise ContractViolation("need at least 3 (N, error) points")
    if any(e <= 0 for _, e in points):
        raise ContractViolation("errors must be > 0")
    lx = np.log([n for n, _ in points])
    ly = np.log([e for _, e in points])
    slope, intercept = np.polyfit(lx, ly, 1)
    res = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return RateFit(slope=float(slope), intercept=float(intercept),
                   max_residual=res, algebraic=res < 0.5)


@dataclass(frozen=True)
class LedgerRow:
    check: str
    params: str
    margin: float

    @property
    def passed(self) -> bool:
        return self.margin >= 0.0


def lemma_suite(tweak=None) -> list[LedgerRow]:
    """Desk-scale certification of every constructive piece; one row per
    (check, parameters), margin >= 0 means pass. `tweak`, if given, maps each
    built network to a (possibly corrupted) replacement before measurement."""
    from . import monomial_builder as mb, partition_builder as pb, product_builder as prb
    from .tanh_calculus import derivative_upper_bound, tanh_derivative

    tweak = tweak or (lambda net: net)
    rows: list[LedgerRow] = []
    xs = np.linspace(-3.0, 3.0, 301)
    for m in range(1, 7):
        dev = np.max(np.abs(tanh_derivative(m, xs)) - derivative_upper_bound(m, np.abs(xs)))
        rows.append(LedgerRow("derivative-envelope", f"m={m}", float(-dev)))
    for p in range(1, 8):
        worst = 0.0
        for l in range(p + 2):
            want = math.factorial(p) if l == p else 0
            worst = max(worst, abs(float(mb.katsuura_sum(p, l) - want)))
        rows.append(LedgerRow("stencil-identity", f"p={p}", 1e-9 - worst))

    ys = np.linspace(-1.0, 1.0, 201).reshape(1, -1)
    for s in (3, 5):
        net = tweak(mb.build_odd_monomials(s, 1.0, 0, 1e-2))
        mode, _ = select_precision(net, 1.0, 1e-2)
        out = net.evaluate(ys, mode)
        worst = max(float(np.max(np.abs(out[(p - 1) // 2] - ys[0] ** p)))
                    for p in range(1, s + 1, 2))
        rows.append(LedgerRow("odd-monomials", f"s={s}", 1e-2 - worst))
    net = tweak(mb.build_all_monomials(3, 1.0, 0, 1e-2))
    mode, _ = select_precision(net, 1.0, 1e-2)
    out = net.evaluate(ys, mode)
    worst = max(float(np.max(np.abs(out[p - 1] - ys[0] ** p))) for p in range(1, 4))
    rows.append(LedgerRow("all-monomials", "s=3", 1e-2 - worst))

    for n, q in ((2, 2), (3, 2), (2, 3)):
        margin = mb.dyson_norm_bound(n, q) - mb.dyson_inverse_norm(n, q)
        rows.append(LedgerRow("dyson-inverse-norm", f"n={n},q={q}", margin))
    net = tweak(mb.build_multivariate_monomials(2, 2, 1.0, 0, 1e-2))
    mode, _ = select_precision(net, 1.0, 1e-2)
    ax = np.linspace(-1.0, 1.0, 21)
    X = np.meshgrid(ax, ax, indexing="ij")
    g2 = np.vstack([m.ravel() for m in X])
    out = net.evaluate(g2, mode)
    P = enumerate_indices(2, 2)
    worst = max(float(np.max(np.abs(out[i] - g2[0] ** a[0] * g2[1] ** a[1])))
                for i, a in enumerate(P))
    rows.append(LedgerRow("multivariate-monomials", "n=2,q=2", 1e-2 - worst))

    net = tweak(prb.build_pairwise_product(1.0, 0, 1e-2))
    mode, _ = select_precision(net, 1.0, 1e-2)
    out = net.evaluate(g2, mode)
    worst = float(np.max(np.abs(out[0] - g2[0] * g2[1])))
    rows.append(LedgerRow("pairwise-product", "M=1", 1e-2 - worst))
    net = tweak(prb.build_product_deep(4, 1.0, 0, 1e-2))
    mode, _ = select_precision(net, 1.0, 1e-2)
    ax4 = np.linspace(-1.0, 1.0, 7)
    X = np.meshgrid(*([ax4] * 4), indexing="ij")
    g4 = np.vstack([m.ravel() for m in X])
    out = net.evaluate(g4, mode)
    worst = float(np.max(np.abs(out[0] - np.prod(g4, axis=0))))
    rows.append(LedgerRow("deep-product", "d=4", 1e-2 - worst))

    for d, N, k in itertools.product((1, 2), (7,), (0, 1)):
        spec = pb.make_spec(d, N, k, 1e-2)
        j = (max(1, N // 2),) * d
        rows.append(LedgerRow("partition-close", f"d={d},N={N},k={k}",
                              pb.certify_close(spec, j)))
        v = (2,) + (0,) * (d - 1)
        rows.append(LedgerRow("partition-far", f"d={d},N={N},k={k}",
                              pb.certify_far(spec, j, v)))
    return rows


def ledger_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check", "params", "margin", "passed"])
    for r in rows:
        writer.writerow([r.check, r.params, repr(r.margin), int(r.passed)])
    return buf.getvalue()
