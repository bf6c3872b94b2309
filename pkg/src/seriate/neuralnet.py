"""A small fully-connected network engine with hand-written backpropagation.

Only what the encoder/decoder model needs: dense layers, a handful of
elementwise activations, L2-regularised squared loss, Adam, and a central
finite-difference oracle for checking gradients.

Parameters of a group of networks are addressed by ``(network, layer, kind)``
keys, ``kind`` being ``"W"`` or ``"b"``; this is the flat view Adam works on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import BadShape, DimensionMismatch, SizeMismatch
from .prng import Rng, uniform

CHECKPOINT_FORMAT = "seriate-mlp"
CHECKPOINT_VERSION = 1


def _tanh_grad(z, a):
    return 1.0 - a * a


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _sigmoid_grad(z, a):
    return a * (1.0 - a)


def _relu_grad(z, a):
    return (z > 0).astype(z.dtype)


# label -> (activation, derivative given pre-activation z and output a)
ACTIVATIONS = {
    "tanh": (np.tanh, _tanh_grad),
    "sigmoid": (_sigmoid, _sigmoid_grad),
    "relu": (lambda z: np.maximum(z, 0.0), _relu_grad),
    "identity": (lambda z: z, lambda z, a: np.ones_like(z)),
}


@dataclass
class Mlp:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "tanh"
    output_activation: str = "identity"

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if len(self.layer_sizes) < 2 or min(self.layer_sizes) < 1:
            raise BadShape(f"invalid layer sizes {self.layer_sizes}")
        for label in (self.hidden_activation, self.output_activation):
            if label not in ACTIVATIONS:
                raise BadShape(f"unknown activation {label!r}")
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise BadShape("one weight matrix and one bias vector per layer required")
        for l, (W, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[l + 1], self.layer_sizes[l])
            if W.shape != expected or b.shape != (expected[0],):
                raise BadShape(f"layer {l}: weight {W.shape}, bias {b.shape}, expected {expected}")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def activation(self, layer: int) -> str:
        return self.output_activation if layer == self.n_layers - 1 else self.hidden_activation

    def copy(self) -> "Mlp":
        return Mlp(self.layer_sizes, [W.copy() for W in self.weights], [b.copy() for b in self.biases],
                   self.hidden_activation, self.output_activation)


def glorot_init(sizes: Sequence[int], rng: Rng, hidden_activation="tanh", output_activation="identity") -> Mlp:
    """Weights into layer l+1 ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero."""
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 2 or min(sizes) < 1:
        raise BadShape(f"invalid layer sizes {sizes}")
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        weights.append(uniform(rng, -bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(sizes, weights, biases, hidden_activation, output_activation)


def forward(net: Mlp, x):
    """Run ``net`` on one sample (1-D) or a batch (rows of a 2-D array).

    Returns the output and a cache of ``(layer input, pre-activation,
    activation)`` per layer for :func:`backward`.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    a = x[None, :] if single else x
    if a.ndim != 2 or a.shape[1] != net.layer_sizes[0]:
        raise DimensionMismatch(f"input width {x.shape[-1]} does not match {net.layer_sizes[0]}")
    cache = []
    for l, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ W.T + b
        out = ACTIVATIONS[net.activation(l)][0](z)
        cache.append((a, z, out))
        a = out
    return (a[0] if single else a), cache


def backward(net: Mlp, cache, grad_out):
    """Gradients of a scalar w.r.t. weights, biases and the batch input.

    ``grad_out`` is d(loss)/d(output) with the batch shape of the forward
    pass.
    """
    delta = np.asarray(grad_out, dtype=np.float64)
    if delta.ndim == 1:
        delta = delta[None, :]
    grad_W = [None] * net.n_layers
    grad_b = [None] * net.n_layers
    for l in reversed(range(net.n_layers)):
        a_in, z, a_out = cache[l]
        delta = delta * ACTIVATIONS[net.activation(l)][1](z, a_out)
        grad_W[l] = delta.T @ a_in
        grad_b[l] = delta.sum(axis=0)
        delta = delta @ net.weights[l]
    return grad_W, grad_b, delta


@dataclass
class LossReport:
    data_term: float
    reg_term: float
    total: float = field(init=False)

    def __post_init__(self):
        self.data_term = float(self.data_term)
        self.reg_term = float(self.reg_term)
        self.total = self.data_term + self.reg_term

    def as_dict(self):
        return {"data_term": self.data_term, "reg_term": self.reg_term, "total": self.total}


def parameters(nets: Sequence[Mlp]) -> dict:
    """Flat view ``{(network, layer, kind): array}``; arrays are shared, not copied."""
    params = {}
    for k, net in enumerate(nets):
        for l in range(net.n_layers):
            params[(k, l, "W")] = net.weights[l]
            params[(k, l, "b")] = net.biases[l]
    return params


def _as_nets(nets) -> tuple[Mlp, ...]:
    return (nets,) if isinstance(nets, Mlp) else tuple(nets)


def predict(nets, inputs):
    """Network output for a plain net (``inputs`` = X) or an encoder/decoder triple.

    For a triple ``(row_encoder, column_encoder, decoder)`` the inputs are
    ``(R, C)``, the row and column data vectors of each sample.
    """
    return _composite_forward(_as_nets(nets), inputs)[0]


def _composite_forward(nets, inputs):
    if len(nets) == 1:
        out, cache = forward(nets[0], np.atleast_2d(inputs))
        return out, (cache,)
    if len(nets) != 3:
        raise BadShape("expected one network or a (row, column, decoder) triple")
    row_enc, col_enc, dec = nets
    R, C = inputs
    g, cache_r = forward(row_enc, np.atleast_2d(R))
    h, cache_c = forward(col_enc, np.atleast_2d(C))
    if g.shape[0] != h.shape[0]:
        raise DimensionMismatch("row and column batches differ in length")
    out, cache_d = forward(dec, np.hstack([g, h]))
    return out, (cache_r, cache_c, cache_d)


def _composite_backward(nets, caches, grad_out):
    grads = {}
    if len(nets) == 1:
        gW, gb, _ = backward(nets[0], caches[0], grad_out)
        per_net = [(0, gW, gb)]
    else:
        row_enc, col_enc, dec = nets
        gW_d, gb_d, grad_in = backward(dec, caches[2], grad_out)
        split = row_enc.layer_sizes[-1]
        gW_r, gb_r, _ = backward(row_enc, caches[0], grad_in[:, :split])
        gW_c, gb_c, _ = backward(col_enc, caches[1], grad_in[:, split:])
        per_net = [(0, gW_r, gb_r), (1, gW_c, gb_c), (2, gW_d, gb_d)]
    for k, gW, gb in per_net:
        for l in range(len(gW)):
            grads[(k, l, "W")] = gW[l]
            grads[(k, l, "b")] = gb[l]
    return grads


def loss_value(nets, inputs, targets, lam: float) -> LossReport:
    nets = _as_nets(nets)
    out, _ = _composite_forward(nets, inputs)
    resid = np.asarray(targets, dtype=np.float64).reshape(out.shape) - out
    reg = sum(float(np.sum(a * a)) for a in parameters(nets).values())
    return LossReport(float(np.sum(resid * resid)) / out.shape[0], lam * reg)


def loss_and_gradients(nets, inputs, targets, lam: float):
    """L2-regularised mean squared error and its exact gradients.

    ``data_term = mean((target - prediction)^2)`` over the batch and
    ``reg_term = lam * sum of squares of every weight and bias``.
    Returns ``(LossReport, grads)`` with grads keyed like :func:`parameters`.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    nets = _as_nets(nets)
    out, caches = _composite_forward(nets, inputs)
    targets = np.asarray(targets, dtype=np.float64)
    if targets.size != out.shape[0] * out.shape[1]:
        raise DimensionMismatch(f"{targets.size} targets for {out.shape[0]} predictions")
    if out.shape[0] == 0:
        raise SizeMismatch("empty batch")
    resid = targets.reshape(out.shape) - out
    batch = out.shape[0]
    data = float(np.sum(resid * resid)) / batch
    grads = _composite_backward(nets, caches, -2.0 * resid / batch)
    params = parameters(nets)
    reg = 0.0
    for key, value in params.items():
        reg += float(np.sum(value * value))
        if lam:
            grads[key] = grads[key] + 2.0 * lam * value
    return LossReport(data, lam * reg), grads


def finite_difference_gradients(nets, inputs, targets, lam: float, h: float = 1e-5) -> dict:
    """Central differences ``(L(w+h) - L(w-h)) / 2h`` for every parameter."""
    if h <= 0:
        raise ValueError("step h must be positive")
    nets = _as_nets(nets)
    grads = {}
    for key, arr in parameters(nets).items():
        g = np.empty_like(arr)
        flat, gflat = arr.reshape(-1), g.reshape(-1)
        for idx in range(flat.size):
            saved = flat[idx]
            flat[idx] = saved + h
            up = loss_value(nets, inputs, targets, lam).total
            flat[idx] = saved - h
            down = loss_value(nets, inputs, targets, lam).total
            flat[idx] = saved
            gflat[idx] = (up - down) / (2.0 * h)
        grads[key] = g
    return grads


@dataclass
class AdamState:
    learning_rate: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: dict = field(default_factory=dict)
    second_moment: dict = field(default_factory=dict)

    @classmethod
    def fresh(cls, params: dict, **hyper) -> "AdamState":
        state = cls(**hyper)
        state.first_moment = {k: np.zeros_like(v) for k, v in params.items()}
        state.second_moment = {k: np.zeros_like(v) for k, v in params.items()}
        return state


def adam_step(params: dict, grads: dict, state: AdamState):
    """One bias-corrected Adam update, applied to ``params`` in place."""
    if state.first_moment.keys() != params.keys():
        if state.step_count == 0 and not state.first_moment:
            state.first_moment = {k: np.zeros_like(v) for k, v in params.items()}
            state.second_moment = {k: np.zeros_like(v) for k, v in params.items()}
        else:
            raise SizeMismatch("optimizer state does not match the parameter set")
    if grads.keys() != params.keys():
        raise SizeMismatch("gradient keys do not match the parameter set")
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1**t
    corr2 = 1.0 - b2**t
    for key, p in params.items():
        g = grads[key]
        if g.shape != p.shape:
            raise SizeMismatch(f"gradient shape {g.shape} != parameter shape {p.shape} for {key}")
        m = state.first_moment[key]
        v = state.second_moment[key]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= state.learning_rate * (m / corr1) / (np.sqrt(v / corr2) + state.epsilon)
    return params, state


def mlp_to_dict(net: Mlp) -> dict:
    return {
        "layer_sizes": list(net.layer_sizes),
        "hidden_activation": net.hidden_activation,
        "output_activation": net.output_activation,
        "weights": [W.ravel().tolist() for W in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }


def mlp_from_dict(d: dict) -> Mlp:
    sizes = tuple(d["layer_sizes"])
    weights = [np.array(w, dtype=np.float64).reshape(sizes[l + 1], sizes[l]) for l, w in enumerate(d["weights"])]
    biases = [np.array(b, dtype=np.float64).reshape(sizes[l + 1]) for l, b in enumerate(d["biases"])]
    return Mlp(sizes, weights, biases, d["hidden_activation"], d["output_activation"])


def save_checkpoint(path, networks: dict[str, Mlp]) -> None:
    """JSON checkpoint; floats are written with repr precision so reloads are bit-exact."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "networks": {name: mlp_to_dict(net) for name, net in networks.items()},
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_checkpoint(path) -> dict[str, Mlp]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != CHECKPOINT_FORMAT or doc.get("version") != CHECKPOINT_VERSION:
        raise BadShape(f"{path}: not a version {CHECKPOINT_VERSION} {CHECKPOINT_FORMAT} checkpoint")
    return {name: mlp_from_dict(d) for name, d in doc["networks"].items()}
