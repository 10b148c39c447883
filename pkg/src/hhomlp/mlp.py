"""Feedforward sigmoid MLP whose parameters live in one flat vector.

Flat layout, for layers ``l = 1..L`` with weight matrices of shape
``(fan_out, fan_in)``::

    [W_1.ravel(), W_2.ravel(), ..., W_L.ravel(), b_1, b_2, ..., b_L]

i.e. all weights first (row ``j`` of ``W_l`` holds the fan-in weights of
destination neuron ``j``), then all biases.  Every layer, the output layer
included, uses the logistic sigmoid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

__all__ = [
    "MlpTopology",
    "parameter_count",
    "encode_params",
    "decode_params",
    "neuron_sum",
    "sigmoid",
    "forward",
    "predict_class",
    "mse_fitness",
]


@dataclass(frozen=True)
class MlpTopology:
    input_size: int
    hidden_layers: tuple[int, ...] = (5, 5)
    output_size: int = 1

    def __post_init__(self):
        hidden = tuple(int(h) for h in self.hidden_layers)
        object.__setattr__(self, "hidden_layers", hidden)
        if self.input_size < 1 or self.output_size < 1:
            raise ValueError("input_size and output_size must be positive")
        if not hidden:
            raise ValueError("at least one hidden layer is required")
        if any(h < 1 for h in hidden):
            raise ValueError(f"hidden layer sizes must be positive, got {hidden}")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.input_size, *self.hidden_layers, self.output_size)

    @property
    def shapes(self) -> list[tuple[int, int]]:
        """``(fan_out, fan_in)`` per layer."""
        sizes = self.layer_sizes
        return [(sizes[i + 1], sizes[i]) for i in range(len(sizes) - 1)]

    def to_dict(self) -> dict:
        return {
            "input_size": self.input_size,
            "hidden_layers": list(self.hidden_layers),
            "output_size": self.output_size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MlpTopology":
        return cls(int(d["input_size"]), tuple(d["hidden_layers"]), int(d["output_size"]))


def parameter_count(topology: MlpTopology) -> int:
    return sum(fan_out * fan_in + fan_out for fan_out, fan_in in topology.shapes)


def decode_params(topology: MlpTopology, flat) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat vector into per-layer ``(W, b)`` views."""
    flat = np.asarray(flat, dtype=float)
    n = parameter_count(topology)
    if flat.shape != (n,):
        raise ValueError(f"expected {n} parameters for {topology.layer_sizes}, got shape {flat.shape}")
    weights = []
    offset = 0
    for fan_out, fan_in in topology.shapes:
        weights.append(flat[offset:offset + fan_out * fan_in].reshape(fan_out, fan_in))
        offset += fan_out * fan_in
    biases = []
    for fan_out, _ in topology.shapes:
        biases.append(flat[offset:offset + fan_out])
        offset += fan_out
    return list(zip(weights, biases))


def encode_params(layers) -> np.ndarray:
    """Inverse of :func:`decode_params`."""
    weights = [np.asarray(W, dtype=float).ravel() for W, _ in layers]
    biases = [np.asarray(b, dtype=float).ravel() for _, b in layers]
    return np.concatenate(weights + biases)


def neuron_sum(inputs, weights, bias: float) -> float:
    inputs = np.asarray(inputs, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if inputs.shape != weights.shape:
        raise ValueError(f"inputs {inputs.shape} and weights {weights.shape} differ in length")
    return float(np.dot(weights, inputs) + bias)


def sigmoid(x):
    # expit never overflows and stays > 0 down to x ~ -745
    return expit(x)


def forward(topology: MlpTopology, params, inputs) -> np.ndarray:
    """Network output for one input vector or a batch of rows.

    A 1-d ``inputs`` gives an output vector of length ``output_size``; a
    2-d ``(n, input_size)`` batch gives ``(n, output_size)``.
    """
    x = np.asarray(inputs, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != topology.input_size:
        raise ValueError(f"expected {topology.input_size} input features, got {x.shape[1]}")
    for W, b in decode_params(topology, params):
        x = sigmoid(x @ W.T + b)
    return x[0] if single else x


def predict_class(output, threshold: float = 0.5):
    """1 (intrusion) when the single network output is ``>= threshold``.

    Accepts a scalar, a length-1 output vector, or an ``(n, 1)`` batch
    (which yields an int array).
    """
    out = np.asarray(output, dtype=float)
    if out.ndim == 2:
        if out.shape[1] != 1:
            raise ValueError(f"binary decision needs a single output, got {out.shape[1]}")
        return (out[:, 0] >= threshold).astype(int)
    if out.ndim == 1 and out.size != 1:
        raise ValueError(f"binary decision needs a single output, got {out.size}")
    return int(out.reshape(()) >= threshold)


def mse_fitness(topology: MlpTopology, params, X, y) -> float:
    """Mean squared error between raw network outputs and 0/1 labels."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise ValueError("empty dataset")
    X = np.atleast_2d(X)
    y = np.asarray(y, dtype=float).reshape(len(X), -1)
    out = forward(topology, params, X)
    return float(np.mean((out - y) ** 2))
