"""Closed-form width and error formulas, independent of any built network."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ContractViolation

def _pcard(n: int, d: int) -> int:
    return math.comb(n + d - 1, n)


def theorem_widths(d: int, s: int, N: int) -> tuple[int, int]:
    """Hidden-layer width bounds of the two-hidden-layer construction; the
    d = 1 case uses its simplified formulas."""
    if min(d, s, N) < 1:
        raise ContractViolation("d, s, N must all be >= 1")
    if d == 1:
        return 3 * math.ceil(s / 2) + N - 1, 6 * N
    w1 = 3 * math.ceil(s / 2) * _pcard(s - 1, d + 1) + d * (N - 1)
    w2 = 3 * math.ceil((d + 2) / 2) * _pcard(d + 1, d + 1) * N**d
    return w1, w2


def sobolev_constant(d: int, k: int, s: int, seminorm_s: float,
                     path: str = "Cs") -> float:
    """C(d,k,s,f); path "Cs" uses the Taylor constant with N0 = 3d/2, path
    "Wsinf" the Bramble-Hilbert constant with N0 = 5d^2."""
    if k >= s:
        raise ContractViolation("need k < s")
    if path == "Cs":
        return max((3.0 * d / 2) ** (s - l) / math.factorial(s - l)
                   for l in range(k + 1)) * seminorm_s
    if path == "Wsinf":
        return max(math.pi**0.25 * math.sqrt(s) * (5.0 * d**2) ** (s - l)
                   / math.factorial(s - l - 1) for l in range(k + 1)) * seminorm_s
    raise ContractViolation(f"unknown path {path!r}")


def n_zero(d: int, path: str = "Cs") -> float:
    return 3.0 * d / 2 if path == "Cs" else 5.0 * d**2


def lipschitz_bound(d: int, L: float, N: int) -> dict:
    """Sup-norm bound 7 d^2 L / N for Lipschitz targets, with its widths."""
    if N <= 5 * d**2:
        raise ContractViolation(f"need N > 5d^2 = {5 * d**2}")
    if d == 1:
        widths = (N - 1, 6 * N)
    else:
        widths = (d * (N - 1), 3 * math.ceil((d + 1) / 2) * _pcard(d, d) * N**d)
    return {"bound": 7.0 * d**2 * L / N, "widths": widths}


def analytic_bounds(d: int, Q: float, R: float, s: int, N: int,
                    delta: float) -> dict:
    """Two-hidden-layer bound and, when R > d/2, the one-hidden-layer (N=1)
    bound for (Q,R)-analytic targets."""
    if N <= 3 * d / 2:
        raise ContractViolation(f"need N > 3d/2 = {1.5 * d}")
    two = (1 + delta) * Q * (3.0 * d / (2 * R * N)) ** s
    shallow = (1 + delta) * Q * (d / (2.0 * R)) ** s if R > d / 2 else None
    return {"two_layer": two, "shallow": shallow}


def exp_rate_bound(d: int, k: int, Q: float, delta: float, calN: int,
                   alpha: float = 1.0, gamma: float = 0.5, R: float = 1.0) -> dict:
    """Exponential-in-calN^(1/(d+1)) convergence shape. The constant in the
    W^{k,inf} form is not explicit; it is reported with c = 1 ("shape-only")."""
    if calN < 1:
        raise ContractViolation("calN must be >= 1")
    root = calN ** (1.0 / (d + 1))
    decay = math.exp(-alpha * root * math.log(calN))
    return {
        "wk_bound_shape_only": calN ** (k / (d + 1)) * decay,
        "l_inf_bound": (1 + delta) * Q * decay,
        "l_inf_bound_simplified": (1 + delta) * Q / calN**alpha,
        "s_substitution": k + alpha / (1 - gamma) * (d + 1) * root,
        "N_substitution": 3.0 * d / (2 * R) * root,
        "c": 1.0, "alpha": alpha, "gamma": gamma,
    }


def entire_function_width(d: int, C: float, calN: int) -> dict:
    """Width of the one-hidden-layer net achieving error exp(-calN) for
    entire targets with |f|_{W^{s,inf}} <= C^s."""
    if calN < 0:
        raise ContractViolation("calN must be >= 0")
    if d == 1:
        width = 3 * math.ceil(calN / 2)
    else:
        a = calN + math.ceil(5 * C * d)
        width = 3 * math.ceil(a / 2) * math.comb(a + d, a)
    return {"width": width, "error_bound": math.exp(-calN)}


@dataclass(frozen=True)
class WidthChoice:
    tolerance: float
    s: int
    N: int
    width: int
    variant: str


def _width_two_layer(s: int, N: int) -> int:
    return max(3 * math.ceil(s / 2) + N - 1, 6 * N)


def min_width_search(a: float, eps_targets, s_max: int = 200,
                     n_max: int = 10_000) -> list[WidthChoice]:
    """For f(x) = sin(ax) on [0,1] (so |f|_{W^{s,inf}} <= a^s), the smallest
    hidden width achieving each tolerance, plus the N = 1 variant."""
    if a <= 0:
        raise ContractViolation("a must be > 0")
    out = []
    for eps in eps_targets:
        best = None
        for s in range(1, s_max + 1):
            # smallest admissible N for this s: (3a/(2N))^s / s! < eps
            log_target = (math.log(eps) + math.lgamma(s + 1)) / s
            n_min = math.floor(1.5 * a * math.exp(-log_target)) + 1
            if n_min > n_max:
                continue
            w = _width_two_layer(s, n_min)
            if best is None or w < best.width:
                best = WidthChoice(eps, s, n_min, w, "two_layer")
        out.append(best if best is not None
                   else WidthChoice(eps, -1, -1, -1, "infeasible"))
        shallow = None
        for s in range(1, s_max + 1):
            if (a / 2.0) ** s / math.factorial(s) < eps:
                shallow = WidthChoice(eps, s, 1, 3 * math.ceil(s / 2), "shallow")
                break
        out.append(shallow if shallow is not None
                   else WidthChoice(eps, -1, 1, -1, "infeasible"))
    return out


def faadibruno_bound(n: int, m: int, d: int, g_norm: float, f_norms) -> float:
    """Composition-norm amplification 16 (e^2 n^4 m d^2)^n g max_i f_i^n."""
    if g_norm < 0 or any(f < 0 for f in f_norms):
        raise ContractViolation("norms must be >= 0")
    fmax = max(f_norms, default=0.0)
    return 16.0 * (math.e**2 * n**4 * m * d**2) ** n * g_norm * fmax**n
