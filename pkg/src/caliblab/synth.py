"""Synthetic classification tasks with a closed-form posterior.

Inputs are standard normal and the ground-truth posterior is softmax-linear:
``P(y | x) = softmax(W x / noise_scale)`` (a sigmoid in the binary case).
That keeps the Bayes predictor analytic, so it can serve as a
perfectly-calibrated oracle, while ``noise_scale > 0`` guarantees label
noise: a model that interpolates a finite sample must memorize noise and
opens a generalization gap.

All randomness flows through counter-based Philox streams keyed by
``(seed, stream)``, so sampling is reproducible bit for bit and independent
streams never collide.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .validation import readonly

DEFAULT_DIM = 20
DEFAULT_NOISE_SCALE = 2.0

# Philox stream ids; one per purpose so streams drawn from the same seed
# stay disjoint.
_STREAM_WEIGHTS = 0x57
_STREAM_INPUTS = 0x1A
_STREAM_LABELS = 0x2B

# Smallest spacing keeping binary posteriors strictly inside (0, 1) even
# when the logit saturates the sigmoid in float64.
_OPEN_EPS = 2.0**-53


def philox_rng(seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator for one (seed, stream) pair."""
    return np.random.Generator(np.random.Philox(key=np.array([seed & (2**64 - 1), stream], dtype=np.uint64)))


def derive_seed(seed: int, label: str) -> int:
    """Stable 63-bit sub-seed for a named purpose.

    Hash-based so that unrelated purposes derived from the same user seed
    can never collide the way additive offsets (seed, seed+1, ...) can.
    """
    digest = hashlib.blake2b(f"{seed}:{label}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


@dataclass(frozen=True)
class SyntheticTask:
    """Distribution parameters of one synthetic task.

    ``weight_matrix`` has shape (dim,) for binary tasks and (C, dim)
    otherwise. ``noise_scale`` divides the logits: larger values flatten the
    posterior toward uniform and raise the Bayes error.
    """

    dim: int
    num_classes: int
    weight_matrix: np.ndarray
    noise_scale: float
    seed: int

    def __post_init__(self):
        if self.dim < 1 or self.num_classes < 2:
            raise ValueError("need dim >= 1 and num_classes >= 2")
        if not self.noise_scale > 0:
            raise ValueError("noise_scale must be positive")
        w = np.asarray(self.weight_matrix, dtype=np.float64)
        expected = (self.dim,) if self.num_classes == 2 else (self.num_classes, self.dim)
        if w.shape != expected:
            raise ValueError(f"weight_matrix shape {w.shape} does not match {expected}")
        object.__setattr__(self, "weight_matrix", readonly(w))

    @property
    def is_binary(self) -> bool:
        return self.num_classes == 2


def make_task(dim: int = DEFAULT_DIM, num_classes: int = 2,
              noise_scale: float = DEFAULT_NOISE_SCALE, seed: int = 0) -> SyntheticTask:
    """Draw task weights from N(0, 1), deterministically per seed."""
    rng = philox_rng(seed, _STREAM_WEIGHTS)
    shape = (dim,) if num_classes == 2 else (num_classes, dim)
    return SyntheticTask(
        dim=dim,
        num_classes=num_classes,
        weight_matrix=rng.standard_normal(shape),
        noise_scale=noise_scale,
        seed=seed,
    )


def posterior(task: SyntheticTask, x) -> np.ndarray:
    """Ground-truth P(y | x); accepts one input vector or an (n, dim) batch.

    Returns shape (C,) for a single input, (n, C) for a batch. Binary
    posteriors are clamped to the open interval (0, 1) at the float64
    resolution limit so downstream confidence handling never sees a hard
    0 or 1 from the oracle.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x.reshape(1, -1) if single else x
    if batch.ndim != 2 or batch.shape[1] != task.dim:
        raise ValueError(f"inputs must have dimension {task.dim}, got shape {x.shape}")
    if task.is_binary:
        z = batch @ task.weight_matrix / task.noise_scale
        p1 = _sigmoid(z)
        p1 = np.clip(p1, _OPEN_EPS, 1.0 - _OPEN_EPS)
        probs = np.column_stack([1.0 - p1, p1])
    else:
        logits = batch @ task.weight_matrix.T / task.noise_scale
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        probs = e / e.sum(axis=1, keepdims=True)
    return probs[0] if single else probs


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def sample(task: SyntheticTask, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw n labeled inputs: x ~ N(0, I), y ~ posterior(x).

    Fully determined by (task, n, seed); repeated calls return identical
    arrays.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    x = philox_rng(seed, _STREAM_INPUTS).standard_normal((n, task.dim))
    y = _sample_labels(task, x, seed)
    return x, y


def _sample_labels(task: SyntheticTask, x: np.ndarray, seed: int) -> np.ndarray:
    probs = posterior(task, x)
    u = philox_rng(seed, _STREAM_LABELS).random(len(x))
    cum = np.cumsum(probs, axis=1)
    y = (u[:, None] >= cum).sum(axis=1)
    return np.minimum(y, task.num_classes - 1).astype(np.int64)


def bayes_predictions(task: SyntheticTask, x, y=None, seed: int = 0) -> Dataset:
    """Predictions of the Bayes-optimal model on the given inputs.

    Probabilities are the exact posterior, so the result is perfectly
    calibrated with respect to the task by construction. Labels may be
    passed in (e.g. from :func:`sample`); when omitted they are drawn from
    the posterior using ``seed``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != task.dim:
        raise ValueError(f"inputs must have shape (n, {task.dim}), got {x.shape}")
    probs = posterior(task, x)
    if y is None:
        y = _sample_labels(task, x, seed)
    if task.is_binary:
        return Dataset.from_binary(probs[:, 1], y)
    return Dataset(probs, y)


def sample_bayes_dataset(task: SyntheticTask, n: int, seed: int) -> Dataset:
    """Convenience: sample inputs and return the Bayes predictions on them."""
    x, y = sample(task, n, seed)
    return bayes_predictions(task, x, y)
