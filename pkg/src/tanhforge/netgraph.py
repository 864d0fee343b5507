"""Layered tanh networks: evaluation, combination, differentiation hooks,
serialization and parameter accounting.

Weights live in float64; layers may carry an exact rational sidecar that the
high-precision backends use instead, which matters when stencil weights are
huge and mutually cancelling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ContractViolation, ParseError
from .precision import DoubleBackend, get_backend

_DOUBLE = DoubleBackend()


def _to_exact_array(rows) -> np.ndarray:
    arr = np.empty(np.shape(rows), dtype=object)
    it = np.nditer(np.zeros(np.shape(rows)), flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        v = rows
        for i in idx:
            v = v[i]
        arr[idx] = v if isinstance(v, Fraction) else Fraction(v)
    return arr


def _exact_to_float(arr: np.ndarray) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in arr], dtype=float) if arr.ndim == 2 \
        else np.array([float(v) for v in arr], dtype=float)


@dataclass(frozen=True)
class Layer:
    """One affine map. W has shape (out, in); tanh applied by the network."""

    W: np.ndarray
    b: np.ndarray
    W_exact: np.ndarray | None = None
    b_exact: np.ndarray | None = None

    def __post_init__(self):
        if self.W.ndim != 2 or self.b.ndim != 1 or self.W.shape[0] != self.b.shape[0]:
            raise ContractViolation(f"bad layer shapes W{self.W.shape} b{self.b.shape}")
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b))):
            raise ContractViolation("non-finite weights")

    @classmethod
    def from_exact(cls, W_rows, b_rows) -> "Layer":
        We = _to_exact_array(W_rows)
        be = _to_exact_array(b_rows)
        return cls(W=_exact_to_float(We), b=_exact_to_float(be), W_exact=We, b_exact=be)

    @property
    def out_dim(self) -> int:
        return self.W.shape[0]

    @property
    def in_dim(self) -> int:
        return self.W.shape[1]

    def exact_or_float(self):
        return (self.W_exact if self.W_exact is not None else self.W,
                self.b_exact if self.b_exact is not None else self.b)


@dataclass(frozen=True)
class TanhNetwork:
    """Realization A_L o sigma o A_{L-1} o ... o sigma o A_1."""

    layers: tuple[Layer, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.layers) < 1:
            raise ContractViolation("need at least one affine layer")
        for a, bl in zip(self.layers, self.layers[1:]):
            if bl.in_dim != a.out_dim:
                raise ContractViolation(
                    f"layer chain mismatch: {a.out_dim} -> {bl.in_dim}")

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return (self.layers[0].in_dim,) + tuple(l.out_dim for l in self.layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def n_hidden_layers(self) -> int:
        return len(self.layers) - 1

    def evaluate(self, x, precision: str = "double") -> np.ndarray:
        """Forward pass. x: shape (d,), (d, npts) or scalar for d=1.

        Returns float64 of shape (out_dim,) or (out_dim, npts)."""
        x = np.asarray(x, dtype=float)
        scalar_in = False
        if x.ndim == 0:
            x = x.reshape(1, 1)
            scalar_in = True
        elif x.ndim == 1:
            x = x.reshape(-1, 1)
            scalar_in = True
        if x.shape[0] != self.in_dim:
            raise ContractViolation(f"input dim {x.shape[0]} != {self.in_dim}")
        backend = get_backend(precision)
        with backend.context():
            v = backend.lift(x)
            for li, layer in enumerate(self.layers):
                v = _apply_affine(backend, layer, v)
                if li < len(self.layers) - 1:
                    v = backend.tanh(v)
            out = backend.to_float(v)
        return out[:, 0] if scalar_in else out

    def sparsity(self) -> float:
        nz = total = 0
        for l in self.layers:
            nz += int(np.count_nonzero(l.W)) + int(np.count_nonzero(l.b))
            total += l.W.size + l.b.size
        return nz / total

    def max_abs_weight(self) -> float:
        return max(max(np.max(np.abs(l.W)), np.max(np.abs(l.b)) if l.b.size else 0.0)
                   for l in self.layers)


def _apply_affine(backend, layer: Layer, v):
    """v: backend value of shape (in_dim, npts) -> (out_dim, npts)."""
    npts = v.shape[1]
    if backend.name == "double":
        return layer.W @ v + layer.b[:, None]
    Wl = backend.lift_weights(layer.W, layer.W_exact)
    bl = backend.lift_weights(layer.b, layer.b_exact)
    acc = bl[:, None] + backend.zeros((layer.out_dim, npts))
    for j in range(layer.in_dim):
        if not np.any(layer.W[:, j]):
            continue
        acc = acc + Wl[:, j, None] * v[j]
    return acc


def identity_affine(d: int) -> TanhNetwork:
    return TanhNetwork(layers=(Layer(W=np.eye(d), b=np.zeros(d)),), meta={"builder": "identity"})


def parallelize(a: TanhNetwork, b: TanhNetwork) -> TanhNetwork:
    """Block-diagonal combination on split inputs; widths add per layer."""
    if len(a.layers) != len(b.layers):
        raise ContractViolation(
            f"parallelize needs equal depth, got {len(a.layers)} vs {len(b.layers)}")
    layers = []
    for la, lb in zip(a.layers, b.layers):
        W = np.zeros((la.out_dim + lb.out_dim, la.in_dim + lb.in_dim))
        W[: la.out_dim, : la.in_dim] = la.W
        W[la.out_dim:, la.in_dim:] = lb.W
        bias = np.concatenate([la.b, lb.b])
        We = be = None
        if la.W_exact is not None or lb.W_exact is not None:
            We = np.full(W.shape, Fraction(0), dtype=object)
            Wea, _ = la.exact_or_float()
            Web, _ = lb.exact_or_float()
            We[: la.out_dim, : la.in_dim] = _to_exact_array(Wea)
            We[la.out_dim:, la.in_dim:] = _to_exact_array(Web)
            _, bea = la.exact_or_float()
            _, beb = lb.exact_or_float()
            be = np.concatenate([_to_exact_array(bea), _to_exact_array(beb)])
        layers.append(Layer(W=W, b=bias, W_exact=We, b_exact=be))
    return TanhNetwork(layers=tuple(layers), meta={"builder": "parallelize"})


def _exact_dot(A, B):
    return np.dot(A, B)


def compose(inner: TanhNetwork, outer: TanhNetwork) -> TanhNetwork:
    """Realize outer o inner; junction affines merge, no activation inserted."""
    if inner.out_dim != outer.in_dim:
        raise ContractViolation(
            f"compose dim mismatch: inner out {inner.out_dim}, outer in {outer.in_dim}")
    last = inner.layers[-1]
    first = outer.layers[0]
    W = first.W @ last.W
    bias = first.W @ last.b + first.b
    We = be = None
    if last.W_exact is not None or first.W_exact is not None:
        Wl, bl = last.exact_or_float()
        Wf, bf = first.exact_or_float()
        Wl, bl = _to_exact_array(Wl), _to_exact_array(bl)
        Wf, bf = _to_exact_array(Wf), _to_exact_array(bf)
        We = _exact_dot(Wf, Wl)
        be = _exact_dot(Wf, bl) + bf
        W, bias = _exact_to_float(We), _exact_to_float(be)
    merged = Layer(W=W, b=bias, W_exact=We, b_exact=be)
    return TanhNetwork(
        layers=inner.layers[:-1] + (merged,) + outer.layers[1:],
        meta={"builder": "compose"},
    )


def cancellation_floor(net: TanhNetwork, domain_bound: float, unit_roundoff: float) -> float:
    """Worst-case rounding noise at the output for the given unit roundoff.

    Per-neuron forward propagation: amplitudes follow |sigma(z)| <=
    min(1, |z|), errors follow the 1-Lipschitz tanh with saturation cap 2.
    Roundoff injected per affine row is u times its cancellation-free scale
    |W| amp + |b|; no cancellation is assumed, which is the point. Keeping
    amplitude and error as vectors matters: large junction weights often act
    only on neurons with tiny preactivations."""
    u = unit_roundoff
    amp = np.full(net.in_dim, max(1.0, float(domain_bound)))
    err = np.zeros(net.in_dim)
    last = len(net.layers) - 1
    for i, l in enumerate(net.layers):
        aW = np.abs(l.W)
        pre_amp = aW @ amp + np.abs(l.b)
        err = aW @ err + u * pre_amp
        if i < last:
            amp = np.minimum(1.0, pre_amp)
            # tanh evaluation error is relative to the output magnitude
            err = np.minimum(err, 2.0) + u * amp
    return float(np.max(err))


def serialize(net: TanhNetwork) -> str:
    doc = {"dims": list(net.layer_dims), "layers": [], "meta": net.meta}
    for l in net.layers:
        entry = {"W": l.W.tolist(), "b": l.b.tolist()}
        if l.W_exact is not None:
            entry["W_exact"] = [[str(v) for v in row] for row in l.W_exact]
            entry["b_exact"] = [str(v) for v in l.b_exact]
        doc["layers"].append(entry)
    return json.dumps(doc)


def deserialize(text: str) -> TanhNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"document: invalid JSON ({e})") from e
    for key in ("dims", "layers"):
        if key not in doc:
            raise ParseError(f"{key}: missing")
    dims = doc["dims"]
    layers = []
    for i, entry in enumerate(doc["layers"]):
        path = f"layers[{i}]"
        for key in ("W", "b"):
            if key not in entry:
                raise ParseError(f"{path}.{key}: missing")
        W = np.asarray(entry["W"], dtype=float)
        b = np.asarray(entry["b"], dtype=float)
        if W.ndim != 2:
            raise ParseError(f"{path}.W: expected 2-d array")
        if W.shape != (dims[i + 1], dims[i]):
            raise ParseError(
                f"{path}.W: shape {W.shape} != declared dims ({dims[i+1]}, {dims[i]})")
        if b.shape != (dims[i + 1],):
            raise ParseError(f"{path}.b: shape {b.shape} != ({dims[i+1]},)")
        We = be = None
        if "W_exact" in entry:
            try:
                We = np.array(
                    [[Fraction(v) for v in row] for row in entry["W_exact"]], dtype=object)
                be = np.array([Fraction(v) for v in entry["b_exact"]], dtype=object)
            except (ValueError, KeyError) as e:
                raise ParseError(f"{path}.W_exact: {e}") from e
            if We.shape != W.shape:
                raise ParseError(f"{path}.W_exact: shape mismatch")
        layers.append(Layer(W=W, b=b, W_exact=We, b_exact=be))
    return TanhNetwork(layers=tuple(layers), meta=doc.get("meta", {}))
