import math
from fractions import Fraction

import numpy as np
import pytest

from tanhforge.assembler import (
    assemble,
    assemble_shallow_analytic,
    plan,
    predicted_widths,
    taylor_polynomial,
)
from tanhforge.errors import CapacityError, ContractViolation
from tanhforge.function_catalog import make
from tanhforge.verifier import select_precision, sobolev_error


def test_taylor_of_constant():
    f = make("poly", coeffs=(3.5,))
    g = taylor_polynomial(f, (Fraction(1, 2),), 3)
    assert g == {(0,): Fraction(3.5)}


def test_taylor_of_sin_at_origin():
    f = make("sin_a", a=1.0)
    g = taylor_polynomial(f, (Fraction(0),), 4)
    assert g[(1,)] == 1
    assert g[(3,)] == Fraction(-1, 6)
    assert (0,) not in g
    # the even orders go through sin(x + m pi/2), so they carry float noise
    assert abs(float(g.get((2,), 0))) < 1e-15


def test_taylor_reexpansion_reproduces_polynomial():
    # f = 1 - 2x + 0.5 x^2, expanded about 1/4, must come back exactly
    f = make("poly", coeffs=(1.0, -2.0, 0.5))
    g = taylor_polynomial(f, (Fraction(1, 4),), 3)
    assert g[(0,)] == 1
    assert g[(1,)] == -2
    assert g[(2,)] == Fraction(1, 2)


def test_taylor_multivariate_cross_term():
    f = make("product_sines", d=2, a=math.pi)
    g = taylor_polynomial(f, (Fraction(0), Fraction(0)), 3)
    # sin(pi x) sin(pi y) = pi^2 xy + higher order
    assert float(g[(1, 1)]) == pytest.approx(math.pi**2, rel=1e-12)


def test_plan_constant_for_unit_seminorm():
    # d=1, k=0, s=2 with |f|_2 = 1 gives C = (3/2)^2/2! = 1.125
    f = make("poly", coeffs=(0.0, 0.0, 0.5))  # x^2/2 has second derivative 1
    bp = plan(f, 1, 2, 0, 4, 0.5)
    assert bp.C_const == pytest.approx(1.125)


def test_plan_tolerance_relations():
    f = make("sin_a")
    bp = plan(f, 1, 4, 1, 8, 0.5)
    assert bp.eta * 6 * bp.N**bp.s / (bp.delta * bp.C_const) <= 1 + 1e-12
    assert 0 < bp.eps < bp.eta
    assert bp.h_mult > 0
    assert bp.M_prod >= 1.0


def test_plan_rejects_out_of_range_delta():
    f = make("sin_a")
    with pytest.raises(ContractViolation):
        plan(f, 1, 4, 0, 4, 0.9)
    with pytest.raises(ContractViolation):
        plan(f, 1, 4, 0, 4, 0.0)


def test_plan_rejects_small_n_and_bad_k():
    f = make("sin_a")
    with pytest.raises(ContractViolation):
        plan(f, 1, 4, 0, 1, 0.5)
    with pytest.raises(ContractViolation):
        plan(f, 1, 4, 4, 4, 0.5)


def test_plan_rejects_dimension_mismatch():
    f = make("product_sines", d=2)
    with pytest.raises(ContractViolation):
        plan(f, 1, 4, 0, 4, 0.5)


def test_assemble_widths_match_prediction():
    f = make("sin_a")
    bp = plan(f, 1, 4, 0, 4, 0.5)
    net = assemble(f, bp)
    assert net.layer_dims == (1,) + predicted_widths(1, 4, 4) + (1,)
    assert net.layer_dims[1] == 3 * 2 + 3  # bank 3*ceil(3/2)=6, bumps N-1=3
    assert net.layer_dims[2] == 6 * 4


def test_assemble_empirical_below_guarantee():
    f = make("sin_a")
    bp = plan(f, 1, 4, 0, 8, 0.5)
    net = assemble(f, bp)
    report = sobolev_error(net, f, 0)
    assert report.empirical <= net.meta["guaranteed"]
    assert not report.violation


def test_assemble_capacity_cap():
    f = make("product_sines", d=2)
    bp = plan(f, 2, 3, 0, 4, 0.5)
    object.__setattr__(bp, "N", 400)
    with pytest.raises(CapacityError):
        assemble(f, bp)


def test_assemble_polynomial_target_near_exact():
    # degree-2 target with s=4: every Taylor remainder vanishes
    f = make("poly", coeffs=(0.25, -1.0, 0.75))
    bp = plan(f, 1, 4, 0, 4, 0.5)
    net = assemble(f, bp)
    xs = np.linspace(0.0, 1.0, 501).reshape(1, -1)
    mode, _ = select_precision(net, 1.0, 1e-10)
    err = np.max(np.abs(net.evaluate(xs, mode) - f.evaluate(xs)))
    assert err <= 1e-6


def test_shallow_analytic_meets_envelope():
    f = make("sin_a", a=1.0)
    net = assemble_shallow_analytic(f, 12, 0.5)
    assert net.n_hidden_layers == 1
    xs = np.linspace(0.0, 1.0, 2001).reshape(1, -1)
    mode, _ = select_precision(net, 1.0, net.meta["guaranteed"])
    err = np.max(np.abs(net.evaluate(xs, mode) - f.evaluate(xs)))
    assert err <= net.meta["guaranteed"]


def test_shallow_analytic_requires_envelope():
    f = make("poly", coeffs=(1.0, 1.0))
    with pytest.raises(ContractViolation):
        assemble_shallow_analytic(f, 6, 0.5)


def test_guaranteed_bound_decreases_with_n():
    f = make("sin_a")
    g = [assemble(f, plan(f, 1, 4, 0, N, 0.5)).meta["guaranteed"]
         for N in (4, 8)]
    assert g[1] < g[0]
