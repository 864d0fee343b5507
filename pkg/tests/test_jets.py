import numpy as np
import pytest

from tanhforge.errors import CapacityError, ContractViolation
from tanhforge.jets import JET_DIM_CAP, JET_ORDER_CAP, evaluate_jet
from tanhforge.netgraph import Layer, TanhNetwork


def random_net(d, widths, seed):
    rng = np.random.default_rng(seed)
    dims = [d] + list(widths)
    layers = []
    for i in range(len(dims) - 1):
        layers.append(Layer(
            W=rng.normal(scale=0.7, size=(dims[i + 1], dims[i])),
            b=rng.normal(scale=0.3, size=dims[i + 1]),
        ))
    return TanhNetwork(layers=tuple(layers))


def richardson(f, x, axis, d, h=1e-3):
    """4th-order central difference along one input coordinate."""
    e = np.zeros((d, 1))
    e[axis] = 1.0
    return (-f(x + 2 * h * e) + 8 * f(x + h * e)
            - 8 * f(x - h * e) + f(x - 2 * h * e)) / (12 * h)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_first_partials_match_finite_differences(seed):
    d = 2
    net = random_net(d, [5, 3, 1], seed)
    x = np.array([[0.3], [-0.4]])
    jet = evaluate_jet(net, x, 1)
    for axis in range(d):
        beta = tuple(1 if i == axis else 0 for i in range(d))
        fd = richardson(net.evaluate, x, axis, d)
        assert jet[beta][0, 0] == pytest.approx(fd[0, 0], abs=1e-9)


def test_second_partials_match_finite_differences():
    net = random_net(1, [4, 1], 7)
    xs = np.linspace(-1, 1, 9).reshape(1, -1)
    jet = evaluate_jet(net, xs, 2)
    h = 1e-4
    fd = (net.evaluate(xs + h) - 2 * net.evaluate(xs) + net.evaluate(xs - h)) / h**2
    assert np.allclose(jet[(2,)], fd, atol=1e-6)


def test_third_derivative_of_plain_tanh():
    net = TanhNetwork(layers=(
        Layer(W=np.array([[1.0]]), b=np.zeros(1)),
        Layer(W=np.array([[1.0]]), b=np.zeros(1)),
    ))
    from tanhforge.tanh_calculus import tanh_derivative

    xs = np.linspace(-2, 2, 21).reshape(1, -1)
    jet = evaluate_jet(net, xs, 3)
    assert np.allclose(jet[(3,)], tanh_derivative(3, xs), atol=1e-12)


def test_zero_order_matches_evaluate():
    net = random_net(3, [6, 2], 11)
    x = np.random.default_rng(0).normal(size=(3, 5))
    jet = evaluate_jet(net, x, 0)
    assert np.allclose(jet[(0, 0, 0)], net.evaluate(x), atol=1e-14)


def test_mixed_partial_symmetric_construction():
    net = random_net(2, [4, 1], 3)
    x = np.array([[0.2], [0.1]])
    jet = evaluate_jet(net, x, 2)
    h = 1e-4
    ex, ey = np.array([[h], [0.0]]), np.array([[0.0], [h]])
    fd = (net.evaluate(x + ex + ey) - net.evaluate(x + ex - ey)
          - net.evaluate(x - ex + ey) + net.evaluate(x - ex - ey)) / (4 * h**2)
    assert jet[(1, 1)][0, 0] == pytest.approx(fd[0, 0], abs=1e-6)


def test_dd_backend_agrees_with_double():
    net = random_net(1, [5, 1], 13)
    xs = np.linspace(-1, 1, 7).reshape(1, -1)
    lo = evaluate_jet(net, xs, 2)
    hi = evaluate_jet(net, xs, 2, precision="dd")
    for beta in lo:
        assert np.allclose(lo[beta], hi[beta], atol=1e-12)


def test_order_cap():
    net = random_net(1, [2, 1], 0)
    with pytest.raises(CapacityError):
        evaluate_jet(net, np.zeros((1, 1)), JET_ORDER_CAP + 1)


def test_dim_cap():
    d = JET_DIM_CAP + 1
    net = random_net(d, [2, 1], 0)
    with pytest.raises(CapacityError):
        evaluate_jet(net, np.zeros((d, 1)), 1)


def test_dim_mismatch_rejected():
    net = random_net(2, [2, 1], 0)
    with pytest.raises(ContractViolation):
        evaluate_jet(net, np.zeros((3, 4)), 1)
