"""Prediction records and ordered datasets.

A :class:`Dataset` is an ordered, immutable collection of model predictions
paired with ground-truth labels. Binary problems store the single value
``f(x) = P(y=1)`` per record; multiclass problems store the full probability
vector. Record order is significant: every reduction in the metrics module
runs in stored order so results are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .validation import (
    check_labels,
    check_prob_matrix,
    check_same_length,
    readonly,
)

TRAIN = "train"
TEST = "test"
_SPLITS = (TRAIN, TEST)


@dataclass(frozen=True)
class PredictionRecord:
    """One model output with its label.

    ``probs`` has length 1 in the binary case (the value ``P(y=1)``) and
    length C otherwise. ``step`` optionally tags the training checkpoint the
    prediction came from, ``split`` whether it was a train or test input.
    """

    label: int
    probs: tuple[float, ...]
    step: int | None = None
    split: str | None = None


class Dataset:
    """Ordered sequence of predictions sharing one class count.

    Parameters
    ----------
    probs:
        Either a 1-D array of binary confidences ``P(y=1)`` or an (n, C)
        matrix of class probabilities (C >= 2, rows summing to 1 within 1e-9).
    labels:
        Integer class indices in ``0..C-1``.
    steps, splits:
        Optional per-record checkpoint ids / split tags.
    """

    def __init__(self, probs, labels, steps=None, splits=None):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim == 1:
            probs = probs.reshape(-1, 1)
        probs = check_prob_matrix(probs)
        if probs.ndim != 2 or probs.shape[1] < 1:
            raise ValueError(f"probs must have at least one column, got shape {probs.shape}")
        n = probs.shape[0]
        self._num_classes = 2 if probs.shape[1] == 1 else probs.shape[1]
        check_same_length("probs", probs, "labels", labels)
        labels = check_labels(labels, self._num_classes)

        if steps is not None:
            steps = np.asarray(steps, dtype=np.int64)
            check_same_length("probs", probs, "steps", steps)
            if steps.size and steps.min() < 0:
                raise ValueError("steps must be non-negative")
            steps = readonly(steps)
        if splits is not None:
            splits = np.asarray(splits, dtype=object)
            check_same_length("probs", probs, "splits", splits)
            bad = [s for s in splits if s not in _SPLITS]
            if bad:
                raise ValueError(f"splits must be one of {_SPLITS}, got {bad[0]!r}")
            splits = readonly(splits)

        self._probs = readonly(probs)
        self._labels = readonly(labels)
        self._steps = steps
        self._splits = splits
        self._n = n

    # ------------------------------------------------------------------ views

    @property
    def num_classes(self) -> int:
        return self._num_classes

    @property
    def is_binary(self) -> bool:
        return self._probs.shape[1] == 1

    @property
    def probs(self) -> np.ndarray:
        """Stored probabilities: shape (n, 1) binary, (n, C) multiclass."""
        return self._probs

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def steps(self) -> np.ndarray | None:
        return self._steps

    @property
    def splits(self) -> np.ndarray | None:
        return self._splits

    def __len__(self) -> int:
        return self._n

    def full_probs(self) -> np.ndarray:
        """(n, C) probability matrix; binary confidences expand to [1-f, f]."""
        if self.is_binary:
            f = self._probs[:, 0]
            return np.column_stack([1.0 - f, f])
        return np.array(self._probs)

    def calibration_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """(confidence, outcome) pairs that calibration metrics aggregate.

        Binary: confidence is the stored ``f(x)`` and the outcome is the
        label itself. Multiclass: top-label reduction, i.e. confidence is the
        maximum predicted probability and the outcome indicates whether the
        argmax class is correct.
        """
        if self.is_binary:
            return np.array(self._probs[:, 0]), self._labels.astype(np.float64)
        conf = self._probs.max(axis=1)
        correct = (np.argmax(self._probs, axis=1) == self._labels).astype(np.float64)
        return conf, correct

    def predicted_labels(self) -> np.ndarray:
        """Argmax class per record; binary predicts 1 iff f > 0.5 (ties -> 0)."""
        if self.is_binary:
            return (self._probs[:, 0] > 0.5).astype(np.int64)
        return np.argmax(self._probs, axis=1).astype(np.int64)

    def records(self) -> list[PredictionRecord]:
        out = []
        for i in range(self._n):
            out.append(
                PredictionRecord(
                    label=int(self._labels[i]),
                    probs=tuple(float(p) for p in self._probs[i]),
                    step=None if self._steps is None else int(self._steps[i]),
                    split=None if self._splits is None else str(self._splits[i]),
                )
            )
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        if self._num_classes != other._num_classes or self._n != other._n:
            return False
        if self._probs.shape != other._probs.shape:
            return False
        same_meta = (self._steps is None) == (other._steps is None) and (
            (self._splits is None) == (other._splits is None)
        )
        if not same_meta:
            return False
        if not (np.array_equal(self._probs, other._probs) and np.array_equal(self._labels, other._labels)):
            return False
        if self._steps is not None and not np.array_equal(self._steps, other._steps):
            return False
        if self._splits is not None and not np.array_equal(self._splits, other._splits):
            return False
        return True

    def __repr__(self) -> str:
        kind = "binary" if self.is_binary else f"{self._num_classes}-class"
        return f"Dataset({self._n} {kind} records)"

    # ------------------------------------------------------------ constructors

    @classmethod
    def from_binary(cls, confidences, labels, steps=None, splits=None) -> "Dataset":
        return cls(np.asarray(confidences, dtype=np.float64).reshape(-1, 1), labels, steps, splits)

    @classmethod
    def from_records(cls, records: Iterable[PredictionRecord]) -> "Dataset":
        records = list(records)
        if not records:
            raise ValueError("cannot build a Dataset from zero records")
        width = len(records[0].probs)
        if any(len(r.probs) != width for r in records):
            raise ValueError("all records must share the same class count")
        probs = np.array([r.probs for r in records], dtype=np.float64)
        labels = [r.label for r in records]
        steps = None if records[0].step is None else [r.step for r in records]
        splits = None if records[0].split is None else [r.split for r in records]
        return cls(probs, labels, steps, splits)


def concat_datasets(datasets: Sequence[Dataset]) -> Dataset:
    """Concatenate datasets in order; all must share the class count."""
    if not datasets:
        raise ValueError("need at least one dataset")
    c = datasets[0].num_classes
    if any(d.num_classes != c for d in datasets):
        raise ValueError("datasets disagree on class count")
    if any(d.probs.shape[1] != datasets[0].probs.shape[1] for d in datasets):
        raise ValueError("cannot mix binary and expanded probability storage")
    probs = np.concatenate([d.probs for d in datasets])
    labels = np.concatenate([d.labels for d in datasets])
    has_steps = all(d.steps is not None for d in datasets)
    has_splits = all(d.splits is not None for d in datasets)
    steps = np.concatenate([d.steps for d in datasets]) if has_steps else None
    splits = np.concatenate([d.splits for d in datasets]) if has_splits else None
    return Dataset(probs, labels, steps, splits)
