import math

import pytest

from tanhforge.bound_calculator import (
    WidthChoice,
    analytic_bounds,
    entire_function_width,
    exp_rate_bound,
    faadibruno_bound,
    lipschitz_bound,
    min_width_search,
    n_zero,
    sobolev_constant,
    theorem_widths,
)
from tanhforge.errors import ContractViolation


def test_theorem_widths_one_dim():
    assert theorem_widths(1, 4, 8) == (13, 48)


def test_theorem_widths_general_formula():
    d, s, N = 2, 3, 4
    w1, w2 = theorem_widths(d, s, N)
    assert w1 == 3 * 2 * math.comb(s - 1 + d, s - 1) + d * (N - 1)
    assert w2 == 3 * 2 * math.comb(d + 1 + d, d + 1) * N**d


def test_theorem_widths_rejects_bad_args():
    with pytest.raises(ContractViolation):
        theorem_widths(0, 3, 4)


def test_sobolev_constant_taylor_path():
    # d=1, k=0, s=2, |f|_2 = 1: max over l=0 of (3/2)^2/2! = 1.125
    assert sobolev_constant(1, 0, 2, 1.0) == pytest.approx(1.125)


def test_sobolev_constant_wsinf_larger_pivot():
    c_cs = sobolev_constant(2, 1, 3, 1.0, path="Cs")
    c_ws = sobolev_constant(2, 1, 3, 1.0, path="Wsinf")
    assert c_ws > c_cs > 0


def test_sobolev_constant_requires_k_below_s():
    with pytest.raises(ContractViolation):
        sobolev_constant(1, 2, 2, 1.0)


def test_n_zero_paths():
    assert n_zero(2) == 3.0
    assert n_zero(2, "Wsinf") == 20.0


def test_lipschitz_bound():
    out = lipschitz_bound(1, 2.0, 10)
    assert out["bound"] == pytest.approx(1.4)
    assert out["widths"] == (9, 60)
    with pytest.raises(ContractViolation):
        lipschitz_bound(2, 1.0, 20)


def test_analytic_bounds_shallow_requires_large_radius():
    out = analytic_bounds(1, 1.0, 1.0, 4, 4, 0.1)
    assert out["shallow"] == pytest.approx(1.1 * 0.5**4)
    assert out["two_layer"] == pytest.approx(1.1 * (3.0 / 8) ** 4)
    assert analytic_bounds(3, 1.0, 1.0, 4, 10, 0.1)["shallow"] is None


def test_exp_rate_bound_decreases():
    lo = exp_rate_bound(1, 0, 1.0, 0.1, 4)["l_inf_bound"]
    hi = exp_rate_bound(1, 0, 1.0, 0.1, 16)["l_inf_bound"]
    assert hi < lo


def test_entire_function_width_one_dim():
    out = entire_function_width(1, 1.0, 9)
    assert out["width"] == 15
    assert out["error_bound"] == pytest.approx(math.exp(-9))


def brute_force_min_width(a, eps, s_max=60, n_max=2000):
    best = None
    for s in range(1, s_max + 1):
        for N in range(1, n_max + 1):
            if (1.5 * a / N) ** s / math.factorial(s) < eps:
                w = max(3 * math.ceil(s / 2) + N - 1, 6 * N)
                if best is None or w < best[0]:
                    best = (w, s, N)
                break
    return best


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6])
def test_min_width_matches_brute_force(eps):
    a = 2 * math.pi
    rows = min_width_search(a, [eps])
    two = [r for r in rows if r.variant == "two_layer"][0]
    w, s, N = brute_force_min_width(a, eps)
    assert two.width == w


def test_min_width_shallow_row_meets_tolerance():
    rows = min_width_search(2 * math.pi, [1e-6])
    sh = [r for r in rows if r.variant == "shallow"][0]
    assert (math.pi) ** sh.s / math.factorial(sh.s) < 1e-6
    assert sh.width == 3 * math.ceil(sh.s / 2)


def test_min_width_flags_infeasible():
    rows = min_width_search(1e6, [1e-300], s_max=3, n_max=5)
    assert all(r.variant == "infeasible" and r.width == -1 for r in rows)


def test_min_width_rejects_bad_frequency():
    with pytest.raises(ContractViolation):
        min_width_search(0.0, [1e-3])


def test_faadibruno_bound_monotone_in_order():
    lo = faadibruno_bound(1, 2, 2, 1.0, [1.0])
    hi = faadibruno_bound(2, 2, 2, 1.0, [1.0])
    assert 0 < lo < hi
    with pytest.raises(ContractViolation):
        faadibruno_bound(1, 2, 2, -1.0, [1.0])
