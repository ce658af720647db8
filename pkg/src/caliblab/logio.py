"""File formats: prediction logs (JSONL), sample files (JSONL), trajectory CSV.

Prediction logs hold one JSON object per line with keys ``split``, ``step``,
``label`` and either ``conf`` (binary f(x)) or ``probs`` (full vector), so
they can be appended to while a run is still training. Trajectories are CSV
with numbers at 9 significant digits. Every format round-trips:
``parse(write(x)) == x``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .decomposition import TrajectoryPoint
from .errors import LogParseError, LogValidationError

TRAJECTORY_HEADER = ["step", "train_error", "test_error", "train_ece", "test_ece",
                     "error_gap", "calib_gap"]

_GAP_REPARSE_TOL = 1e-9


def _fmt9(x: float) -> str:
    return format(float(x), ".9g")


# --------------------------------------------------------------- sample files

def write_samples(path, x: np.ndarray, y: np.ndarray) -> None:
    """Write labeled inputs as JSONL lines {"x": [...], "y": int}."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or len(x) != len(y):
        raise ValueError("need an (n, d) input matrix and n labels")
    with open(path, "w", encoding="utf-8") as fh:
        for xi, yi in zip(x, y):
            fh.write(json.dumps({"x": [float(v) for v in xi], "y": int(yi)}) + "\n")


def read_samples(path) -> tuple[np.ndarray, np.ndarray]:
    xs = []
    ys = []
    for lineno, obj in _iter_jsonl(path):
        try:
            xs.append([float(v) for v in obj["x"]])
            ys.append(int(obj["y"]))
        except (KeyError, TypeError, ValueError) as err:
            raise LogParseError(f"bad sample record ({err})", lineno) from err
    if xs and any(len(row) != len(xs[0]) for row in xs):
        raise LogValidationError("rows disagree on input dimension", 1)
    return np.array(xs, dtype=np.float64), np.array(ys, dtype=np.int64)


# ------------------------------------------------------------ prediction logs

def write_prediction_log(path, data: Dataset) -> None:
    """One JSON line per record; binary confidences use the ``conf`` key."""
    steps = data.steps
    splits = data.splits
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(len(data)):
            obj: dict = {}
            if splits is not None:
                obj["split"] = str(splits[i])
            if steps is not None:
                obj["step"] = int(steps[i])
            obj["label"] = int(data.labels[i])
            if data.is_binary:
                obj["conf"] = float(data.probs[i, 0])
            else:
                obj["probs"] = [float(p) for p in data.probs[i]]
            fh.write(json.dumps(obj) + "\n")


def _iter_jsonl(path):
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as err:
                raise LogParseError(f"invalid JSON ({err.msg})", lineno) from err
            if not isinstance(obj, dict):
                raise LogParseError("each line must hold a JSON object", lineno)
            yield lineno, obj


def _record_from_obj(obj: dict, lineno: int):
    try:
        label = int(obj["label"])
    except (KeyError, TypeError, ValueError):
        raise LogParseError("missing or non-integer 'label'", lineno) from None
    split = obj.get("split")
    if split is not None and split not in ("train", "test"):
        raise LogParseError(f"split must be 'train' or 'test', got {split!r}", lineno)
    step = obj.get("step")
    if step is not None:
        try:
            step = int(step)
        except (TypeError, ValueError):
            raise LogParseError("'step' must be an integer", lineno) from None
        if step < 0:
            raise LogValidationError("'step' must be non-negative", lineno)

    if "conf" in obj:
        try:
            conf = float(obj["conf"])
        except (TypeError, ValueError):
            raise LogParseError("'conf' must be a number", lineno) from None
        if not 0.0 <= conf <= 1.0:
            raise LogValidationError(f"confidence {conf} outside [0, 1]", lineno)
        if label not in (0, 1):
            raise LogValidationError(f"binary label must be 0 or 1, got {label}", lineno)
        return (conf,), label, step, split

    try:
        probs = [float(p) for p in obj["probs"]]
    except (KeyError, TypeError, ValueError):
        raise LogParseError("need a 'conf' number or a 'probs' array", lineno) from None
    if len(probs) < 2:
        raise LogParseError("'probs' must list at least 2 classes", lineno)
    if any(not 0.0 <= p <= 1.0 for p in probs):
        raise LogValidationError("probabilities outside [0, 1]", lineno)
    total = sum(probs)
    if abs(total - 1.0) > 1e-9:
        raise LogValidationError(f"probabilities sum to {total}, not 1", lineno)
    if not 0 <= label < len(probs):
        raise LogValidationError(f"label {label} out of range for {len(probs)} classes", lineno)
    return tuple(probs), label, step, split


def parse_log(path) -> dict[tuple[str | None, int | None], Dataset]:
    """Group a prediction log by (split, step), preserving file order.

    Groups appear in order of first occurrence; records keep their file
    order within each group. Raises :class:`LogParseError` or
    :class:`LogValidationError` with the offending line number.
    """
    groups: dict[tuple[str | None, int | None], list] = {}
    widths: dict[tuple[str | None, int | None], int] = {}
    for lineno, obj in _iter_jsonl(path):
        probs, label, step, split = _record_from_obj(obj, lineno)
        key = (split, step)
        if key not in groups:
            groups[key] = []
            widths[key] = len(probs)
        elif widths[key] != len(probs):
            raise LogValidationError(
                f"class count changed within group {key} "
                f"({widths[key]} vs {len(probs)})",
                lineno,
            )
        groups[key].append((probs, label))
    out: dict[tuple[str | None, int | None], Dataset] = {}
    for key, rows in groups.items():
        probs = np.array([r[0] for r in rows], dtype=np.float64)
        labels = [r[1] for r in rows]
        split, step = key
        n = len(rows)
        out[key] = Dataset(
            probs,
            labels,
            steps=None if step is None else np.full(n, step, dtype=np.int64),
            splits=None if split is None else np.full(n, split, dtype=object),
        )
    return out


# ------------------------------------------------------------- trajectory CSV

def write_trajectory_csv(path, trajectory) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_HEADER)
        for p in trajectory:
            writer.writerow([
                p.step,
                _fmt9(p.train_error), _fmt9(p.test_error),
                _fmt9(p.train_ece), _fmt9(p.test_ece),
                _fmt9(p.error_gap), _fmt9(p.calib_gap),
            ])


def read_trajectory_csv(path) -> list[TrajectoryPoint]:
    """Parse a trajectory; verifies stored gaps against the other columns.

    The serialized gaps must match the absolute column differences within
    1e-9. The in-memory points carry exactly recomputed gaps.
    """
    points = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRAJECTORY_HEADER:
            raise LogParseError(f"unexpected header {header}", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(TRAJECTORY_HEADER):
                raise LogParseError(f"expected {len(TRAJECTORY_HEADER)} columns, got {len(row)}", lineno)
            try:
                step = int(row[0])
                train_error, test_error, train_ece, test_ece, error_gap, calib_gap = map(float, row[1:])
            except ValueError as err:
                raise LogParseError(f"non-numeric field ({err})", lineno) from err
            if abs(error_gap - abs(test_error - train_error)) > _GAP_REPARSE_TOL:
                raise LogValidationError("error_gap does not match its columns", lineno)
            if abs(calib_gap - abs(test_ece - train_ece)) > _GAP_REPARSE_TOL:
                raise LogValidationError("calib_gap does not match its columns", lineno)
            points.append(TrajectoryPoint.create(step, train_error, test_error, train_ece, test_ece))
    return points
