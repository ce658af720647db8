"""Confidence binning schemes.

A :class:`BinningScheme` partitions [0, 1] into B bins. Bins are half-open
``[edges[i], edges[i+1])`` except the last, which is closed at 1, so every
confidence maps to exactly one bin. Two constructions are provided:
equal-width bins and equal-mass (adaptive) bins placed at midpoints between
the order statistics of the observed confidences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import check_confidences, readonly


@dataclass(frozen=True)
class BinningScheme:
    """A partition of [0, 1] into confidence bins.

    ``edges`` is strictly increasing with ``edges[0] == 0`` and
    ``edges[-1] == 1``. ``degenerate`` is True when an equal-mass
    construction had to collapse duplicate boundaries, in which case
    ``num_bins`` is the effective (reduced) count.
    """

    kind: str  # "equal-width" | "equal-mass"
    edges: np.ndarray
    degenerate: bool = field(default=False)

    def __post_init__(self):
        if self.kind not in ("equal-width", "equal-mass"):
            raise ValueError(f"unknown binning kind {self.kind!r}")
        edges = np.asarray(self.edges, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 2:
            raise ValueError("edges must be a 1-D array of at least 2 boundaries")
        if edges[0] != 0.0 or edges[-1] != 1.0:
            raise ValueError("edges must start at 0 and end at 1")
        if not np.all(np.diff(edges) > 0):
            raise ValueError("edges must be strictly increasing")
        object.__setattr__(self, "edges", readonly(edges))

    @property
    def num_bins(self) -> int:
        return len(self.edges) - 1


def make_equal_width_bins(num_bins: int) -> BinningScheme:
    """Uniform partition of [0, 1] into ``num_bins`` bins."""
    if num_bins < 1:
        raise ValueError("num_bins must be a positive integer")
    edges = np.arange(num_bins + 1, dtype=np.float64) / num_bins
    return BinningScheme(kind="equal-width", edges=edges)


def make_equal_mass_bins(num_bins: int, confidences) -> BinningScheme:
    """Adaptive bins holding (nearly) equal numbers of the given confidences.

    The sorted confidences are split into ``num_bins`` groups whose sizes
    differ by at most one; each interior edge sits at the midpoint between
    the last value of one group and the first value of the next. A boundary
    between equal values cannot separate anything and is dropped, so heavy
    ties yield fewer effective bins and set the ``degenerate`` flag.
    """
    if num_bins < 1:
        raise ValueError("num_bins must be a positive integer")
    conf = check_confidences(confidences)
    if conf.size == 0:
        raise ValueError("confidences must be non-empty")

    ordered = np.sort(conf)
    groups = np.array_split(ordered, num_bins)
    interior = []
    for left, right in zip(groups[:-1], groups[1:]):
        if left.size == 0 or right.size == 0:
            continue
        lo, hi = left[-1], right[0]
        if hi > lo:
            interior.append(min(max((lo + hi) / 2.0, 0.0), 1.0))
    interior = [e for e in interior if 0.0 < e < 1.0]
    edges = np.concatenate(([0.0], np.unique(interior), [1.0]))
    return BinningScheme(
        kind="equal-mass",
        edges=edges,
        degenerate=(len(edges) - 1 < num_bins),
    )


def assign_bin(scheme: BinningScheme, confidence: float) -> int:
    """Bin index of a single confidence in [0, 1]."""
    if not (0.0 <= confidence <= 1.0):
        raise ValueError(f"confidence must lie in [0, 1], got {confidence}")
    return int(assign_bins(scheme, np.array([confidence]))[0])


def assign_bins(scheme: BinningScheme, confidences) -> np.ndarray:
    """Vectorized bin assignment; boundaries belong to the bin on their right."""
    conf = check_confidences(confidences)
    idx = np.searchsorted(scheme.edges, conf, side="right") - 1
    # conf == 1.0 lands past the last edge; the top bin is closed at 1.
    return np.minimum(idx, scheme.num_bins - 1)
