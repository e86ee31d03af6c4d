"""Dense network core: forward/backward, inverted dropout and Adam.

Networks are ReLU MLPs with a sigmoid output. Inputs may be a single vector
or a ``(batch, features)`` matrix; parameter gradients are summed over the
batch, so a mean loss must fold its ``1/batch`` into ``output_gradient``.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDims, ShapeMismatch, StaleCache


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """PCG64 stream keyed by ``(seed, label)``.

    Streams with different labels are statistically independent, so adding a
    new consumer never shifts the numbers another consumer sees.
    """
    key = zlib.crc32(label.encode("utf-8"))
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(key,))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class MlpParams:
    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    dropout_rates: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.layer_dims = [int(d) for d in self.layer_dims]
        n_layers = len(self.layer_dims) - 1
        if not self.dropout_rates:
            self.dropout_rates = [0.0] * (n_layers - 1)
        self.dropout_rates = [float(p) for p in self.dropout_rates]
        if len(self.weights) != n_layers or len(self.biases) != n_layers:
            raise ShapeMismatch("weights/biases do not match layer_dims")
        if len(self.dropout_rates) != n_layers - 1:
            raise ShapeMismatch("need one dropout rate per hidden layer")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            want = (self.layer_dims[k + 1], self.layer_dims[k])
            if w.shape != want or b.shape != (want[0],):
                raise ShapeMismatch(f"layer {k}: weight {w.shape} / bias {b.shape}, expected {want}")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def arrays(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]

    def with_arrays(self, arrays: list[np.ndarray]) -> "MlpParams":
        n = self.n_layers
        return MlpParams(list(self.layer_dims), list(arrays[:n]), list(arrays[n:]), list(self.dropout_rates))

    def copy(self) -> "MlpParams":
        return self.with_arrays([a.copy() for a in self.arrays()])

    def to_dict(self) -> dict:
        return {
            "layer_dims": self.layer_dims,
            "dropout_rates": self.dropout_rates,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MlpParams":
        return cls(
            d["layer_dims"],
            [np.array(w, dtype=float).reshape(len(w), -1) for w in d["weights"]],
            [np.array(b, dtype=float) for b in d["biases"]],
            d.get("dropout_rates", []),
        )


def init_mlp(layer_dims, dropout_rates=None, seed: int = 0) -> MlpParams:
    """Glorot-uniform weights, zero biases."""
    dims = list(layer_dims)
    if len(dims) < 2 or any(int(d) != d or d < 1 for d in dims):
        raise InvalidDims(f"InvalidDims: {dims}")
    if dropout_rates is None:
        dropout_rates = [0.0] * (len(dims) - 2)
    if any(not 0.0 <= p < 1.0 for p in dropout_rates):
        raise InvalidDims(f"dropout rates must be in [0, 1): {dropout_rates}")
    rng = rng_stream(seed, "init")
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(dims, weights, biases, list(dropout_rates))


_SIG_LO = np.finfo(float).tiny
_SIG_HI = 1.0 - np.finfo(float).epsneg


def sigmoid(z):
    """Logistic function kept strictly inside (0, 1) even when saturated."""
    # Split by sign so exp never overflows.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return np.clip(out, _SIG_LO, _SIG_HI)


@dataclass
class ForwardCache:
    layer_dims: tuple
    squeeze: bool
    inputs: list[np.ndarray]      # input to each affine layer
    pre: list[np.ndarray]         # pre-activations
    masks: list[np.ndarray | None]
    output: np.ndarray


def forward(params: MlpParams, x, mode: str = "eval", rng: np.random.Generator | None = None):
    """Return ``(output, cache)``.

    Hidden layers: affine, ReLU, then dropout in ``train`` mode (scaled by
    ``1/(1-p)``). Output layer: affine, sigmoid.
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    h = x[None, :] if squeeze else x
    if h.ndim != 2 or h.shape[1] != params.layer_dims[0]:
        raise ShapeMismatch(f"ShapeMismatch: input {x.shape}, network expects {params.layer_dims[0]} features")
    train = mode == "train"
    if train and rng is None and any(p > 0 for p in params.dropout_rates):
        raise ValueError("train mode with dropout needs an rng")

    inputs, pres, masks = [], [], []
    last = params.n_layers - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        inputs.append(h)
        z = h @ w.T + b
        pres.append(z)
        if k == last:
            h = sigmoid(z)
            masks.append(None)
            break
        h = np.maximum(z, 0.0)
        p = params.dropout_rates[k]
        if train and p > 0:
            mask = (rng.random(h.shape) >= p) / (1.0 - p)
            h = h * mask
            masks.append(mask)
        else:
            masks.append(None)
    cache = ForwardCache(tuple(params.layer_dims), squeeze, inputs, pres, masks, h)
    return (h[0] if squeeze else h), cache


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    input: np.ndarray

    def arrays(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]


def backward(params: MlpParams, cache: ForwardCache, output_gradient) -> Gradients:
    """Reverse-mode gradients of a scalar loss given ``dloss/doutput``."""
    if tuple(params.layer_dims) != cache.layer_dims:
        raise StaleCache("StaleCache: cache was produced by a network with different layer_dims")
    g = np.asarray(output_gradient, dtype=float)
    if cache.squeeze:
        g = g[None, :]
    if g.shape != cache.output.shape:
        raise ShapeMismatch(f"ShapeMismatch: output gradient {g.shape}, expected {cache.output.shape}")

    n = params.n_layers
    gw: list[np.ndarray] = [None] * n
    gb: list[np.ndarray] = [None] * n
    out = cache.output
    dz = g * out * (1.0 - out)
    for k in range(n - 1, -1, -1):
        gw[k] = dz.T @ cache.inputs[k]
        gb[k] = dz.sum(axis=0)
        dh = dz @ params.weights[k]
        if k == 0:
            break
        if cache.masks[k - 1] is not None:
            dh = dh * cache.masks[k - 1]
        dz = dh * (cache.pre[k - 1] > 0)
    return Gradients(gw, gb, dh[0] if cache.squeeze else dh)


@dataclass
class AdamState:
    step: int
    m: list[np.ndarray]
    v: list[np.ndarray]
    learning_rate: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def fresh(cls, params: MlpParams, learning_rate=2e-4, beta1=0.5, beta2=0.999, epsilon=1e-8) -> "AdamState":
        zeros = [np.zeros_like(a) for a in params.arrays()]
        return cls(0, zeros, [z.copy() for z in zeros], learning_rate, beta1, beta2, epsilon)


def adam_step(params: MlpParams, grads, state: AdamState) -> tuple[MlpParams, AdamState]:
    """One bias-corrected Adam update. Inputs are left untouched."""
    g_arrays = grads.arrays() if isinstance(grads, Gradients) else list(grads)
    p_arrays = params.arrays()
    if len(g_arrays) != len(p_arrays) or any(g.shape != p.shape for g, p in zip(g_arrays, p_arrays)):
        raise ShapeMismatch("ShapeMismatch: gradients do not match parameters")
    if len(state.m) != len(p_arrays) or any(m.shape != p.shape for m, p in zip(state.m, p_arrays)):
        raise ShapeMismatch("ShapeMismatch: Adam state does not match parameters")

    t = state.step + 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** t
    c2 = 1.0 - b2 ** t
    new_p, new_m, new_v = [], [], []
    for p, g, m, v in zip(p_arrays, g_arrays, state.m, state.v):
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        step = state.learning_rate * (m / c1) / (np.sqrt(v / c2) + state.epsilon)
        new_p.append(p - step)
        new_m.append(m)
        new_v.append(v)
    new_state = AdamState(t, new_m, new_v, state.learning_rate, b1, b2, state.epsilon)
    return params.with_arrays(new_p), new_state
