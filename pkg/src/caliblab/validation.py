"""Input validation helpers.

Small checks in the spirit of scikit-learn's ``check_array``: every public
entry point funnels raw user input through these so the numeric code can
assume clean, finite, correctly-shaped float64 arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import NotFittedError

PROB_SUM_TOL = 1e-9


def as_float_array(x, name: str = "array", ndim: int | None = None) -> np.ndarray:
    """Convert to a float64 ndarray and reject non-finite entries."""
    arr = np.asarray(x, dtype=np.float64)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_confidences(conf, name: str = "confidences") -> np.ndarray:
    """1-D float array with every entry in [0, 1]."""
    arr = as_float_array(conf, name, ndim=1)
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return arr


def check_prob_matrix(probs, name: str = "probs") -> np.ndarray:
    """(n, C) matrix of class probabilities; rows must sum to 1 within 1e-9."""
    arr = as_float_array(probs, name, ndim=2)
    if arr.size == 0:
        return arr
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} entries must lie in [0, 1]")
    if arr.shape[1] > 1:
        row_sums = arr.sum(axis=1)
        off = np.abs(row_sums - 1.0).max()
        if off > PROB_SUM_TOL:
            raise ValueError(f"{name} rows must sum to 1 within {PROB_SUM_TOL} (max deviation {off:.3g})")
    return arr


def check_labels(labels, num_classes: int, name: str = "labels") -> np.ndarray:
    """1-D integer array with entries in 0..num_classes-1."""
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"{name} must be integers")
    if arr.size and np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.floor(arr)):
        raise ValueError(f"{name} must be whole numbers")
    arr = arr.astype(np.int64, copy=True)
    if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
        raise ValueError(f"{name} must lie in 0..{num_classes - 1}")
    return arr


def check_same_length(name_a: str, a, name_b: str, b) -> None:
    if len(a) != len(b):
        raise ValueError(f"{name_a} and {name_b} must have the same length ({len(a)} != {len(b)})")


def check_feature_matrix(X, name: str = "X", expected_dim: int | None = None) -> np.ndarray:
    """(n, d) float matrix of inputs; 1-D input is treated as a single row."""
    arr = as_float_array(X, name)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if expected_dim is not None and arr.shape[1] != expected_dim:
        raise ValueError(f"{name} has {arr.shape[1]} features, expected {expected_dim}")
    return arr


def check_is_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit() before using this method"
        )


def readonly(arr: np.ndarray) -> np.ndarray:
    """Own a copy of the data and lock it against mutation."""
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out
