"""Plain-numpy MLP: forward pass, backprop, and optimizer steps.

The network is a stack of linear layers with ReLU between them and a
softmax head (two-way softmax in the binary case). Gradients come from
hand-written reverse-mode accumulation and are validated against central
finite differences in the test suite. Updates are functional: ``step``
returns a new model and optimizer state, leaving its inputs untouched.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DivergenceError
from .synth import philox_rng

_STREAM_INIT = 0x77

# Cross-entropy clamps vanishing probabilities here instead of overflowing.
LOSS_CLAMP = 1e-12
ADAM_EPSILON = 1e-8


class SaturatedLossWarning(UserWarning):
    """Some p(label) underflowed the cross-entropy clamp."""


@dataclass(frozen=True)
class MlpModel:
    """Weights and biases of one MLP, hidden layers ReLU, output softmax."""

    layer_sizes: tuple[int, ...]
    weights: tuple[np.ndarray, ...]  # weights[i] has shape (sizes[i], sizes[i+1])
    biases: tuple[np.ndarray, ...]

    @property
    def num_classes(self) -> int:
        return self.layer_sizes[-1]

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    def parameter_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)


def init_mlp(layer_sizes: Sequence[int], seed: int = 0) -> MlpModel:
    """Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.

    ``layer_sizes`` runs input dim, hidden widths, class count; two entries
    give the zero-hidden-layer (multinomial logistic regression) shape.
    """
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2:
        raise ValueError("need at least input and output sizes")
    if any(s < 1 for s in sizes):
        raise ValueError("layer sizes must be positive")
    if sizes[-1] < 2:
        raise ValueError("output layer needs at least 2 classes")
    rng = philox_rng(seed, _STREAM_INIT)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_sizes=sizes, weights=tuple(weights), biases=tuple(biases))


def _forward_trace(model: MlpModel, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Probabilities plus the post-activation of every layer (for backprop)."""
    acts = [x]
    h = x
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        h = h @ w + b
        if i < last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    logits = acts[-1]
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    probs = e / e.sum(axis=1, keepdims=True)
    return probs, acts


def forward(model: MlpModel, x) -> np.ndarray:
    """Class probabilities for a batch (n, input_dim) or one input vector."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x.reshape(1, -1) if single else x
    if batch.ndim != 2 or batch.shape[1] != model.input_dim:
        raise ValueError(f"inputs must have dimension {model.input_dim}, got shape {x.shape}")
    probs, _ = _forward_trace(model, batch)
    return probs[0] if single else probs


def cross_entropy(probs: np.ndarray, y: np.ndarray) -> float:
    """Mean -log p(label); probabilities clamp at 1e-12 (with a warning)."""
    probs = np.asarray(probs, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if probs.ndim == 1:
        probs = probs.reshape(1, -1)
        y = y.reshape(1)
    if y.size and (y.min() < 0 or y.max() >= probs.shape[1]):
        raise ValueError("labels out of range for the probability matrix")
    p = probs[np.arange(len(y)), y]
    if np.any(p < LOSS_CLAMP):
        warnings.warn("cross-entropy saturated: clamping p(label) at 1e-12",
                      SaturatedLossWarning, stacklevel=2)
        p = np.maximum(p, LOSS_CLAMP)
    return float(np.mean(-np.log(p)))


@dataclass(frozen=True)
class Gradients:
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(g)) for g in self.weights) and all(
            np.all(np.isfinite(g)) for g in self.biases
        )


def loss_and_grad(model: MlpModel, x: np.ndarray, y: np.ndarray) -> tuple[float, Gradients]:
    """Batch cross-entropy and its gradient by reverse-mode accumulation."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    probs, acts = _forward_trace(model, x)
    loss = cross_entropy(probs, y)

    n = len(y)
    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n  # d(loss)/d(logits)

    grad_w: list[np.ndarray] = [None] * len(model.weights)  # type: ignore[list-item]
    grad_b: list[np.ndarray] = [None] * len(model.biases)  # type: ignore[list-item]
    for i in range(len(model.weights) - 1, -1, -1):
        grad_w[i] = acts[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (acts[i] > 0.0)
    return loss, Gradients(weights=tuple(grad_w), biases=tuple(grad_b))


@dataclass
class OptimizerState:
    """Momentum / Adam buffers; created zeroed by :func:`init_state`."""

    step_count: int = 0
    velocity_w: list[np.ndarray] = field(default_factory=list)
    velocity_b: list[np.ndarray] = field(default_factory=list)
    adam_m_w: list[np.ndarray] = field(default_factory=list)
    adam_v_w: list[np.ndarray] = field(default_factory=list)
    adam_m_b: list[np.ndarray] = field(default_factory=list)
    adam_v_b: list[np.ndarray] = field(default_factory=list)


def init_state(model: MlpModel) -> OptimizerState:
    def zeros_w():
        return [np.zeros_like(w) for w in model.weights]

    def zeros_b():
        return [np.zeros_like(b) for b in model.biases]

    return OptimizerState(
        step_count=0,
        velocity_w=zeros_w(),
        velocity_b=zeros_b(),
        adam_m_w=zeros_w(),
        adam_v_w=zeros_w(),
        adam_m_b=zeros_b(),
        adam_v_b=zeros_b(),
    )


def step(model: MlpModel, grads: Gradients, state: OptimizerState, *,
         optimizer: str, learning_rate: float, momentum: float = 0.9,
         weight_decay: float = 0.0) -> tuple[MlpModel, OptimizerState]:
    """One optimizer update; returns the new model and state.

    Weight decay is decoupled: parameters shrink by ``(1 - lr * wd)`` before
    the gradient update. ``optimizer`` is ``"sgd"`` (momentum buffer) or
    ``"adam"`` (bias-corrected moments, epsilon 1e-8).
    """
    if not grads.is_finite():
        raise DivergenceError("non-finite gradient; aborting run", step=state.step_count)
    if optimizer not in ("sgd", "adam"):
        raise ValueError(f"unknown optimizer {optimizer!r}")

    decay = 1.0 - learning_rate * weight_decay
    t = state.step_count + 1
    new_w = []
    new_b = []
    if optimizer == "sgd":
        for i, (w, gw) in enumerate(zip(model.weights, grads.weights)):
            state.velocity_w[i] = momentum * state.velocity_w[i] + gw
            new_w.append(w * decay - learning_rate * state.velocity_w[i])
        for i, (b, gb) in enumerate(zip(model.biases, grads.biases)):
            state.velocity_b[i] = momentum * state.velocity_b[i] + gb
            new_b.append(b * decay - learning_rate * state.velocity_b[i])
    else:
        b1, b2 = 0.9, 0.999
        corr1 = 1.0 - b1**t
        corr2 = 1.0 - b2**t
        for i, (w, gw) in enumerate(zip(model.weights, grads.weights)):
            state.adam_m_w[i] = b1 * state.adam_m_w[i] + (1 - b1) * gw
            state.adam_v_w[i] = b2 * state.adam_v_w[i] + (1 - b2) * gw**2
            update = (state.adam_m_w[i] / corr1) / (np.sqrt(state.adam_v_w[i] / corr2) + ADAM_EPSILON)
            new_w.append(w * decay - learning_rate * update)
        for i, (b, gb) in enumerate(zip(model.biases, grads.biases)):
            state.adam_m_b[i] = b1 * state.adam_m_b[i] + (1 - b1) * gb
            state.adam_v_b[i] = b2 * state.adam_v_b[i] + (1 - b2) * gb**2
            update = (state.adam_m_b[i] / corr1) / (np.sqrt(state.adam_v_b[i] / corr2) + ADAM_EPSILON)
            new_b.append(b * decay - learning_rate * update)

    state.step_count = t
    updated = MlpModel(model.layer_sizes, tuple(new_w), tuple(new_b))
    if not all(np.all(np.isfinite(w)) for w in updated.weights):
        raise DivergenceError("non-finite parameters after update; aborting run",
                              step=state.step_count)
    return updated, state
