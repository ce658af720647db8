"""Calibration and error metrics over prediction datasets.

Conventions, fixed here once for the whole package:

* Binned ECE is ``sum_b (n_b / n) * |accuracy_b - confidence_b|`` over
  non-empty bins; empty bins contribute zero and are skipped by MCE.
* ``ece_exact`` groups records by their exact confidence value instead of
  binning and serves as the binning-free oracle for perfect calibration.
* Multiclass ECE/MCE/reliability use the top-label reduction (confidence is
  the maximum predicted probability, the outcome its correctness); classwise
  calibration lives in SCE and ACE.
* Brier scores use the sum-over-classes convention, so the range is [0, 2].
  The mean-over-classes variant would halve every binary value.
* Binary datasets store ``f(x) = P(y=1)`` and predict class 1 iff f > 0.5;
  a tie at 0.5 predicts class 0.

All reductions run over records in stored order and accumulate with
``math.fsum`` (error-free summation), so every metric is reproducible bit
for bit and invariant under record permutation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .binning import BinningScheme, assign_bins, make_equal_mass_bins
from .dataset import Dataset
from .errors import DegenerateBinsWarning, EmptyInputError
from .validation import readonly

DEFAULT_NUM_BINS = 15


def _fsum(values: np.ndarray) -> float:
    return math.fsum(values.tolist())


def _require_nonempty(data: Dataset) -> None:
    if len(data) == 0:
        raise EmptyInputError("dataset has no records")


@dataclass(frozen=True)
class ReliabilityDiagram:
    """Per-bin aggregates of confidence, accuracy and occupancy.

    Empty bins carry ``count == 0`` and NaN means. ``accuracy`` is the mean
    label in the binary case and top-label correctness otherwise.
    """

    scheme: BinningScheme
    count: np.ndarray
    mean_confidence: np.ndarray
    accuracy: np.ndarray
    total_count: int

    def __post_init__(self):
        object.__setattr__(self, "count", readonly(np.asarray(self.count, dtype=np.int64)))
        object.__setattr__(self, "mean_confidence", readonly(np.asarray(self.mean_confidence, dtype=np.float64)))
        object.__setattr__(self, "accuracy", readonly(np.asarray(self.accuracy, dtype=np.float64)))
        b = self.scheme.num_bins
        if not (len(self.count) == len(self.mean_confidence) == len(self.accuracy) == b):
            raise ValueError("per-bin arrays must match the scheme's bin count")
        if int(self.count.sum()) != self.total_count:
            raise ValueError("bin counts must sum to total_count")

    @property
    def occupied(self) -> np.ndarray:
        return self.count > 0

    def gaps(self) -> np.ndarray:
        """|accuracy - confidence| per bin, NaN where empty."""
        return np.abs(self.accuracy - self.mean_confidence)


def reliability(data: Dataset, scheme: BinningScheme) -> ReliabilityDiagram:
    """Aggregate (confidence, outcome) pairs of ``data`` into the bins of ``scheme``."""
    _require_nonempty(data)
    conf, outcome = data.calibration_pairs()
    bins = assign_bins(scheme, conf)
    b = scheme.num_bins
    count = np.bincount(bins, minlength=b).astype(np.int64)
    mean_conf = np.full(b, np.nan)
    acc = np.full(b, np.nan)
    for i in range(b):
        if count[i] == 0:
            continue
        sel = bins == i
        mean_conf[i] = _fsum(conf[sel]) / count[i]
        # outcomes are 0/1 so their sum is an exact integer in float64
        acc[i] = float(outcome[sel].sum()) / count[i]
    return ReliabilityDiagram(
        scheme=scheme,
        count=count,
        mean_confidence=mean_conf,
        accuracy=acc,
        total_count=len(data),
    )


def ece_binned(data: Dataset, scheme: BinningScheme) -> float:
    """Histogram-binning estimate of the expected calibration error."""
    diagram = reliability(data, scheme)
    return ece_from_diagram(diagram)


def ece_from_diagram(diagram: ReliabilityDiagram) -> float:
    n = diagram.total_count
    terms = [
        (diagram.count[i] / n) * abs(diagram.accuracy[i] - diagram.mean_confidence[i])
        for i in range(diagram.scheme.num_bins)
        if diagram.count[i] > 0
    ]
    return math.fsum(terms)


def ece_exact(data: Dataset) -> float:
    """Expected calibration error with exact grouping by confidence value.

    ``sum_v (n_v / n) * |mean(outcome | conf == v) - v|`` over the distinct
    confidence values v. Free of binning hyperparameters, so it is the
    reference the binned estimator is checked against.
    """
    _require_nonempty(data)
    conf, outcome = data.calibration_pairs()
    values, inverse = np.unique(conf, return_inverse=True)
    counts = np.bincount(inverse)
    outcome_sums = np.bincount(inverse, weights=outcome)  # exact: 0/1 weights
    n = len(data)
    terms = [
        (counts[i] / n) * abs(outcome_sums[i] / counts[i] - values[i])
        for i in range(len(values))
    ]
    return math.fsum(terms)


def mce(data: Dataset, scheme: BinningScheme) -> float:
    """Maximum per-bin |accuracy - confidence| over non-empty bins."""
    diagram = reliability(data, scheme)
    gaps = diagram.gaps()[diagram.occupied]
    return float(gaps.max())


def brier(data: Dataset) -> float:
    """Mean squared error between probability vectors and one-hot labels.

    Sum-over-classes convention: each record contributes
    ``sum_c (p_c - onehot_c)^2``, so values range over [0, 2]. Binary
    confidences expand to [1-f, f] first.
    """
    _require_nonempty(data)
    probs = data.full_probs()
    onehot = np.zeros_like(probs)
    onehot[np.arange(len(data)), data.labels] = 1.0
    sq = (probs - onehot) ** 2
    per_record = [math.fsum(row.tolist()) for row in sq]
    return math.fsum(per_record) / len(data)


def _classwise_ece_terms(column: np.ndarray, indicator: np.ndarray, scheme: BinningScheme, n: int) -> list[float]:
    """Binned calibration terms of one class-probability column."""
    bins = assign_bins(scheme, column)
    counts = np.bincount(bins, minlength=scheme.num_bins)
    hit_sums = np.bincount(bins, weights=indicator, minlength=scheme.num_bins)
    terms = []
    for b in range(scheme.num_bins):
        if counts[b] == 0:
            continue
        mean_prob = _fsum(column[bins == b]) / counts[b]
        freq = hit_sums[b] / counts[b]
        terms.append((counts[b] / n) * abs(freq - mean_prob))
    return terms


def sce(data: Dataset, scheme: BinningScheme) -> float:
    """Static calibration error: classwise binned ECE averaged over classes.

    Each class's probability column is binned with ``scheme``, compared
    against the frequency of that class, and the per-class errors are
    averaged. For C=2 this equals the mean of the binned ECEs of f and 1-f.
    """
    _require_nonempty(data)
    probs = data.full_probs()
    n, c = probs.shape
    per_class = [
        math.fsum(_classwise_ece_terms(probs[:, k], (data.labels == k).astype(np.float64), scheme, n))
        for k in range(c)
    ]
    return math.fsum(per_class) / c


def ace(data: Dataset, num_bins: int = DEFAULT_NUM_BINS) -> float:
    """Adaptive calibration error: SCE with per-class equal-mass bins.

    Each class column gets its own equal-mass scheme built from that column.
    Columns with heavy ties collapse to fewer bins; that degeneracy is
    reported through a :class:`DegenerateBinsWarning`.
    """
    _require_nonempty(data)
    probs = data.full_probs()
    n, c = probs.shape
    per_class = []
    degenerate = False
    for k in range(c):
        column = probs[:, k]
        scheme = make_equal_mass_bins(num_bins, column)
        degenerate = degenerate or scheme.degenerate
        terms = _classwise_ece_terms(column, (data.labels == k).astype(np.float64), scheme, n)
        per_class.append(math.fsum(terms))
    if degenerate:
        warnings.warn(
            f"equal-mass binning collapsed below {num_bins} bins for at least one class column",
            DegenerateBinsWarning,
            stacklevel=2,
        )
    return math.fsum(per_class) / c


def classification_error(data: Dataset) -> float:
    """Fraction of records whose predicted class differs from the label."""
    _require_nonempty(data)
    wrong = (data.predicted_labels() != data.labels).astype(np.float64)
    return float(wrong.sum()) / len(data)


def is_perfectly_calibrated(data: Dataset, tol: float = 1e-12) -> bool:
    """True iff the exact-grouping ECE is within ``tol`` of zero."""
    return ece_exact(data) <= tol


@dataclass(frozen=True)
class MetricsReport:
    """All calibration/error metrics of one dataset under one binning scheme."""

    ece_binned: float
    ece_exact: float
    mce: float
    brier: float
    sce: float
    ace: float
    error: float
    diagram: ReliabilityDiagram


def metrics_report(data: Dataset, scheme: BinningScheme, ace_bins: int | None = None) -> MetricsReport:
    """Compute the full metric suite in one pass-friendly call."""
    _require_nonempty(data)
    diagram = reliability(data, scheme)
    return MetricsReport(
        ece_binned=ece_from_diagram(diagram),
        ece_exact=ece_exact(data),
        mce=float(diagram.gaps()[diagram.occupied].max()),
        brier=brier(data),
        sce=sce(data, scheme),
        ace=ace(data, ace_bins if ace_bins is not None else scheme.num_bins),
        error=classification_error(data),
        diagram=diagram,
    )
