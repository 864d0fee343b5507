import math

import numpy as np
import pytest

from tanhforge.assembler import assemble, plan
from tanhforge.errors import BoundViolation, ContractViolation
from tanhforge.function_catalog import make
from tanhforge.netgraph import Layer, TanhNetwork
from tanhforge.verifier import (
    axis_points,
    default_grid,
    ledger_csv,
    lemma_suite,
    rate_fit,
    select_precision,
    sobolev_error,
)


def test_axis_points_cover_unit_interval():
    pts = axis_points(50)
    assert pts[0] == 0.0 and pts[-1] == 1.0
    assert np.all(np.diff(pts) >= 0)
    assert len(pts) == 50


def test_default_grid_includes_cell_boundaries():
    g = default_grid(1, n_axis=64, cells=4)
    for b in (0.25, 0.5, 0.75):
        assert np.min(np.abs(g[0] - b)) == 0.0


def test_default_grid_shape_multidim():
    g = default_grid(2, n_axis=9)
    assert g.shape == (2, 81)
    assert np.min(g) >= 0.0 and np.max(g) <= 1.0


def test_select_precision_prefers_cheapest_sufficient():
    net = TanhNetwork(layers=(
        Layer(W=np.array([[1.0], [2.0]]), b=np.zeros(2)),
        Layer(W=np.array([[1.0, -1.0]]), b=np.zeros(1)),
    ))
    mode, floor = select_precision(net, 1.0, 1e-6)
    assert mode == "double"
    assert floor <= 1e-7


def test_select_precision_escalates_for_tight_targets():
    big = 1e12
    net = TanhNetwork(layers=(
        Layer(W=np.array([[big], [-big]]), b=np.zeros(2)),
        Layer(W=np.array([[big, big]]), b=np.zeros(1)),
    ))
    mode, _ = select_precision(net, 1.0, 1e-12)
    assert mode != "double"


def test_sobolev_error_exact_identity_net():
    # 6 tanh neurons realizing ~x on [0, 1] via a pairwise product with 1
    f = make("poly", coeffs=(0.0, 1.0))
    from tanhforge.product_builder import build_pairwise_product
    from tanhforge.netgraph import compose
    from fractions import Fraction

    pre = TanhNetwork(layers=(Layer.from_exact(
        [[Fraction(1)], [Fraction(0)]], [Fraction(0), Fraction(1)]),))
    net = compose(pre, build_pairwise_product(1.0, 0, 1e-9))
    report = sobolev_error(net, f, 0, precision="dd")
    assert report.empirical <= 1e-9
    assert report.k == 0 and not report.violation


def test_sobolev_error_orders_reported():
    f = make("sin_a")
    bp = plan(f, 1, 4, 1, 4, 0.5)
    net = assemble(f, bp)
    report = sobolev_error(net, f, 1)
    assert set(report.seminorm_errors) == {0, 1}
    assert report.empirical == max(report.seminorm_errors.values())
    assert report.guaranteed == net.meta["guaranteed"]
    assert report.slack is not None and report.slack >= 1.0


def test_sobolev_error_raises_on_violation():
    f = make("sin_a")
    bp = plan(f, 1, 4, 0, 4, 0.5)
    net = assemble(f, bp)
    net.meta["guaranteed"] = 1e-300  # force an unattainable promise
    grid = np.linspace(0.0, 1.0, 64).reshape(1, -1)
    with pytest.raises(BoundViolation) as e:
        sobolev_error(net, f, 0, grid=grid, precision="dd")
    assert e.value.report.violation


def test_sobolev_error_check_false_returns_report():
    f = make("sin_a")
    bp = plan(f, 1, 4, 0, 4, 0.5)
    net = assemble(f, bp)
    net.meta["guaranteed"] = 1e-300
    grid = np.linspace(0.0, 1.0, 64).reshape(1, -1)
    report = sobolev_error(net, f, 0, grid=grid, precision="dd", check=False)
    assert report.violation


def test_rate_fit_recovers_exact_power_law():
    pts = [(N, 7.0 * N**-3.0) for N in (2, 4, 8, 16)]
    fit = rate_fit(pts)
    assert fit.slope == pytest.approx(-3.0, abs=1e-12)
    assert fit.algebraic
    assert float(fit) == fit.slope


def test_rate_fit_flags_exponential_decay():
    pts = [(N, math.exp(-N)) for N in (2, 4, 8, 16)]
    fit = rate_fit(pts)
    assert not fit.algebraic


def test_rate_fit_rejections():
    with pytest.raises(ContractViolation):
        rate_fit([(2, 1.0), (4, 0.5)])
    with pytest.raises(ContractViolation):
        rate_fit([(2, 1.0), (4, 0.0), (8, 0.1)])


def test_lemma_suite_all_pass():
    rows = lemma_suite()
    assert len(rows) >= 25
    assert all(r.passed for r in rows)


def test_lemma_suite_deterministic():
    a = ledger_csv(lemma_suite())
    b = ledger_csv(lemma_suite())
    assert a == b


def test_lemma_suite_detects_corruption():
    def corrupt(net):
        layers = list(net.layers)
        W = layers[0].W.copy()
        W[0, 0] *= 1.5
        layers[0] = Layer(W=W, b=layers[0].b)
        return TanhNetwork(layers=tuple(layers), meta=dict(net.meta))

    rows = lemma_suite(tweak=corrupt)
    assert any(not r.passed for r in rows)


def test_ledger_csv_layout():
    import csv
    import io

    text = ledger_csv(lemma_suite())
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["check", "params", "margin", "passed"]
    assert all(len(row) == 4 for row in rows[1:])
    assert all(row[3] in ("0", "1") for row in rows[1:])
