"""Acceptance gate: thirteen end-to-end criteria, each with a runtime budget
and a single printed pass/fail line."""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from tanhforge.assembler import assemble, assemble_shallow_analytic, plan, \
    predicted_widths
from tanhforge.combinatorics import enumerate_indices
from tanhforge.function_catalog import make
from tanhforge.jets import evaluate_jet
from tanhforge.monomial_builder import (
    build_all_monomials,
    build_multivariate_monomials,
    build_odd_monomials,
    dyson_inverse_norm,
    dyson_norm_bound,
    katsuura_sum,
)
from tanhforge.partition_builder import certify_close, certify_far, figure_rows, \
    make_spec
from tanhforge.product_builder import build_product_deep, build_product_shallow
from tanhforge.tanh_calculus import derivative_upper_bound, tanh_derivative
from tanhforge.verifier import ledger_csv, lemma_suite, rate_fit, \
    select_precision, sobolev_error


@contextmanager
def criterion(number: int, budget_s: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        status = "PASS" if ok and elapsed < budget_s else "FAIL"
        print(f"criterion-{number:02d}: {status} ({elapsed:.2f}s / budget {budget_s:.0f}s)")
    assert elapsed < budget_s, f"criterion {number} exceeded budget"


def fd_oracle(m, xs, h_exp=-25, prec=400):
    import mpmath

    h = mpmath.mpf(2) ** h_exp
    coef = [(-1) ** i * math.comb(m, i) for i in range(m + 1)]
    out = []
    with mpmath.workprec(prec):
        for x in xs:
            acc = mpmath.mpf(0)
            for i, c in enumerate(coef):
                acc += c * mpmath.tanh(mpmath.mpf(float(x)) + (m - 2 * i) * h / 2)
            out.append(float(acc / h**m))
    return np.array(out)


def test_criterion_01_tanh_calculus():
    with criterion(1, 1.0):
        xs = np.linspace(-3.0, 3.0, 601)
        for m in range(1, 9):
            closed = tanh_derivative(m, xs)
            scale = np.max(np.abs(closed))
            assert np.max(np.abs(closed - fd_oracle(m, xs))) / scale < 1e-6
            assert np.all(np.abs(closed) <= derivative_upper_bound(m, np.abs(xs))
                          * (1 + 1e-12))


def test_criterion_02_stencil_identity():
    with criterion(2, 1.0):
        for p in range(1, 10):
            for l in range(p + 2):
                want = math.factorial(p) if l == p else 0
                assert abs(float(katsuura_sum(p, l)) - want) < 1e-6


def test_criterion_03_odd_monomials():
    with criterion(3, 10.0):
        xs = np.linspace(-1.0, 1.0, 201).reshape(1, -1)
        for s in (3, 5, 7):
            for k in (0, 1):
                for eps in (1e-2, 1e-3):
                    net = build_odd_monomials(s, 1.0, k, eps)
                    assert net.layer_dims[1] == (s + 1) // 2
                    mode, _ = select_precision(net, 1.0, eps)
                    if k == 0:
                        out = {(0,): net.evaluate(xs, mode)}
                    else:
                        out = evaluate_jet(net, xs, 1, precision=mode)
                    for row, p in enumerate(range(1, s + 1, 2)):
                        assert np.max(np.abs(out[(0,)][row] - xs[0] ** p)) <= eps
                        if k == 1:
                            want = p * xs[0] ** (p - 1)
                            assert np.max(np.abs(out[(1,)][row] - want)) <= eps


def test_criterion_04_all_monomials():
    with criterion(4, 10.0):
        eps = 1e-2
        xs = np.linspace(-1.0, 1.0, 201).reshape(1, -1)
        for s in (3, 5):
            net = build_all_monomials(s, 1.0, 0, eps)
            assert net.layer_dims[1] == 3 * (s + 1) // 2
            mode, _ = select_precision(net, 1.0, eps)
            out = net.evaluate(xs, mode)
            for p in (2, 4):
                if p <= s:
                    assert np.max(np.abs(out[p - 1] - xs[0] ** p)) <= eps


def test_criterion_05_dyson_machinery():
    with criterion(5, 20.0):
        for n in range(1, 5):
            for q in range(1, 5):
                assert dyson_inverse_norm(n, q) <= dyson_norm_bound(n, q)
        eps = 1e-2
        net = build_multivariate_monomials(2, 2, 1.0, 0, eps)
        ax = np.linspace(-1.0, 1.0, 41)
        X = np.meshgrid(ax, ax, indexing="ij")
        pts = np.vstack([m.ravel() for m in X])
        mode, _ = select_precision(net, 1.0, eps)
        out = net.evaluate(pts, mode)
        for i, beta in enumerate(enumerate_indices(2, 2)):
            want = pts[0] ** beta[0] * pts[1] ** beta[1]
            assert np.max(np.abs(out[i] - want)) <= eps


def test_criterion_06_products():
    with criterion(6, 30.0):
        eps = 1e-2
        rng = np.random.default_rng(0)
        for d in (2, 3):
            net = build_product_shallow(d, 1.0, 0, eps)
            pts = rng.uniform(-1.0, 1.0, size=(d, 500))
            mode, _ = select_precision(net, 1.0, eps)
            out = net.evaluate(pts, mode)
            assert np.max(np.abs(out[0] - np.prod(pts, axis=0))) <= eps
        for d in (2, 4, 5):
            net = build_product_deep(d, 1.0, 0, eps)
            assert net.n_hidden_layers == math.ceil(math.log2(d))
            assert max(net.layer_dims[1:-1]) <= 3 * d
            pts = rng.uniform(-1.0, 1.0, size=(d, 500))
            mode, _ = select_precision(net, 1.0, eps)
            out = net.evaluate(pts, mode)
            assert np.max(np.abs(out[0] - np.prod(pts, axis=0))) <= eps


def test_criterion_07_partition():
    with criterion(7, 30.0):
        eps = 1e-2
        for d in (1, 2):
            for N in (7, 16):
                for k in (0, 1):
                    spec = make_spec(d, N, k, eps)
                    j = (N // 2,) * d
                    assert certify_close(spec, j) >= 0
                    assert certify_far(spec, j, (2,) + (0,) * (d - 1)) >= 0
        spec = make_spec(1, 7, 0, eps)
        _, _, near, _ = figure_rows(spec)
        assert np.min(near) >= 0.99


def test_criterion_08_end_to_end_d1():
    with criterion(8, 120.0):
        f = make("sin_a")
        errs = []
        for N in (4, 8, 16):
            bp = plan(f, 1, 3, 0, N, 0.5)
            net = assemble(f, bp)
            w1, w2 = net.layer_dims[1], net.layer_dims[2]
            assert (w1, w2) == predicted_widths(1, 3, N)
            assert w1 <= 3 * math.ceil(3 / 2) + N - 1 and w2 <= 6 * N
            report = sobolev_error(net, f, 0)
            bound = 1.5 * bp.C_const / N**3
            assert report.empirical <= bound
            errs.append((N, report.empirical))
        assert rate_fit(errs).slope <= -2.75


def test_criterion_09_end_to_end_d2():
    with criterion(9, 300.0):
        f = make("product_sines", d=2, a=math.pi)
        for N in (4, 8):
            bp = plan(f, 2, 2, 0, N, 0.5)
            net = assemble(f, bp)
            want_w2 = 3 * math.ceil(4 / 2) * len(enumerate_indices(3, 3)) * N**2
            assert net.layer_dims[2] == want_w2
            report = sobolev_error(net, f, 0)
            assert report.empirical <= net.meta["guaranteed"]


def test_criterion_10_analytic_shallow():
    with criterion(10, 30.0):
        f = make("exp_a", a=0.25)  # Q = e^{1/4}, R = 4
        xs = np.linspace(0.0, 1.0, 2001).reshape(1, -1)
        delta = 0.5
        errs = []
        for s in (3, 5, 7, 9):
            net = assemble_shallow_analytic(f, s, delta)
            envelope = (1 + delta) * f.Q * (1.0 / (2 * f.R)) ** s
            mode, _ = select_precision(net, 1.0, envelope)
            err = float(np.max(np.abs(net.evaluate(xs, mode)[0] - f.evaluate(xs))))
            assert err <= envelope
            errs.append(err)
        for lo, hi in zip(errs[1:], errs[:-1]):
            assert lo <= 0.5 * hi


def test_criterion_11_min_width_figure():
    from tanhforge.bound_calculator import min_width_search

    with criterion(11, 10.0):
        tols = [10.0**-t for t in range(1, 8)]
        for a in (2 * math.pi, 4 * math.pi, 8 * math.pi):
            rows = min_width_search(a, tols)
            two = [r for r in rows if r.variant == "two_layer"]
            for r in two:
                best = None
                log_tol = math.log(r.tolerance)
                for s in range(1, 201):
                    lg = math.lgamma(s + 1)
                    for N in range(1, 10_001):
                        if s * math.log(1.5 * a / N) - lg < log_tol:
                            w = max(3 * math.ceil(s / 2) + N - 1, 6 * N)
                            if best is None or w < best:
                                best = w
                            break
                assert r.width == best
            widths = [r.width for r in two]
            assert widths == sorted(widths)


def test_criterion_12_sparsity_monotone():
    with criterion(12, 60.0):
        f = make("sin_a")
        table = {}
        for s in (2, 3, 4):
            for N in (2, 4, 8):
                net = assemble(f, plan(f, 1, s, 0, N, 0.5))
                table[s, N] = net.sparsity()
                assert 0 < table[s, N] <= 1
        for N in (2, 4, 8):
            assert table[2, N] <= table[3, N] <= table[4, N]
        for s in (2, 3, 4):
            assert table[s, 2] >= table[s, 4] >= table[s, 8]


def test_criterion_13_ledger_deterministic():
    with criterion(13, 600.0):
        rows = lemma_suite()
        assert all(r.passed for r in rows)
        assert ledger_csv(rows) == ledger_csv(lemma_suite())
