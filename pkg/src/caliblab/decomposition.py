"""Train/test decomposition of calibration error.

Test calibration error splits into calibration on the train set plus the
calibration generalization gap:

    test_ece <= train_ece + |test_ece - train_ece|

which is an arithmetic identity, asserted here with zero tolerance on every
report. Two empirical claims are evaluated over training trajectories, never
assumed: (1) train ECE stays near zero throughout training, and (2) the
calibration generalization gap is bounded by the error generalization gap
|test_error - train_error|.
"""

from __future__ import annotations

from dataclasses import dataclass

from .binning import BinningScheme
from .dataset import Dataset
from .errors import EmptyInputError, NotApplicableError
from .metrics import classification_error, ece_binned

# Train ECE counts as "approximately zero" below this (Claim 1).
CLAIM1_DEFAULT_TOL = 0.05
# Slack absorbing binning noise when comparing the two gaps (Claim 2).
CLAIM2_DEFAULT_TOL = 0.02
# A run counts as interpolating once train error falls to this level.
INTERPOLATION_TRAIN_ERROR = 0.005


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class TrajectoryPoint:
    """Error and calibration of one training checkpoint, with both gaps.

    The stored gaps are exactly the absolute differences of their
    components; construction re-derives and verifies them.
    """

    step: int
    train_error: float
    test_error: float
    train_ece: float
    test_ece: float
    error_gap: float
    calib_gap: float

    def __post_init__(self):
        for name in ("train_error", "test_error", "train_ece", "test_ece", "error_gap", "calib_gap"):
            _check_unit(name, getattr(self, name))
        if self.step < 0:
            raise ValueError("step must be non-negative")
        if self.error_gap != abs(self.test_error - self.train_error):
            raise ValueError("error_gap must equal |test_error - train_error| exactly")
        if self.calib_gap != abs(self.test_ece - self.train_ece):
            raise ValueError("calib_gap must equal |test_ece - train_ece| exactly")

    @classmethod
    def create(cls, step: int, train_error: float, test_error: float,
               train_ece: float, test_ece: float) -> "TrajectoryPoint":
        """Build a point, deriving both gaps from the base metrics."""
        return cls(
            step=step,
            train_error=train_error,
            test_error=test_error,
            train_ece=train_ece,
            test_ece=test_ece,
            error_gap=abs(test_error - train_error),
            calib_gap=abs(test_ece - train_ece),
        )

    def identity_holds(self) -> bool:
        """The decomposition inequality, evaluated with zero tolerance.

        Compared in the rearranged form ``test_ece - train_ece <= calib_gap``:
        adding ``train_ece`` back to the gap would round a second time and
        can land one ulp below ``test_ece``, falsely failing the identity.
        """
        return self.test_ece - self.train_ece <= self.calib_gap


def decomposition_report(train: Dataset, test: Dataset, scheme: BinningScheme,
                         step: int = 0) -> TrajectoryPoint:
    """Measure both splits and assemble the decomposition at one checkpoint.

    Errors are classification errors; ECEs are binned with ``scheme``. The
    decomposition identity is asserted before returning.
    """
    if len(train) == 0 or len(test) == 0:
        raise EmptyInputError("both train and test splits must be non-empty")
    if train.num_classes != test.num_classes:
        raise ValueError(
            f"train and test class counts differ ({train.num_classes} != {test.num_classes})"
        )
    point = TrajectoryPoint.create(
        step=step,
        train_error=classification_error(train),
        test_error=classification_error(test),
        train_ece=ece_binned(train, scheme),
        test_ece=ece_binned(test, scheme),
    )
    if not point.identity_holds():
        raise AssertionError(
            f"decomposition identity violated at step {step}: "
            f"{point.test_ece} - {point.train_ece} > {point.calib_gap}"
        )
    return point


@dataclass(frozen=True)
class ClaimReport:
    """Outcome of evaluating both empirical claims over a trajectory."""

    claim1_max_train_ece: float
    claim2_holds_fraction: float
    claim2_slack: tuple[float, ...]  # error_gap - calib_gap per point
    violations: tuple[int, ...]  # steps where calib_gap > error_gap + tol
    tolerance: float


def evaluate_claims(trajectory, tol: float = 0.0) -> ClaimReport:
    """Report (never assert) how both claims fare across a trajectory.

    A point violates Claim 2 when its calibration gap exceeds the error gap
    by more than ``tol``. Claim 1 is summarized by the largest train ECE
    seen, to be compared against a threshold by the caller.
    """
    trajectory = list(trajectory)
    if not trajectory:
        raise EmptyInputError("trajectory has no points")
    slack = tuple(p.error_gap - p.calib_gap for p in trajectory)
    violations = tuple(p.step for p in trajectory if p.calib_gap > p.error_gap + tol)
    return ClaimReport(
        claim1_max_train_ece=max(p.train_ece for p in trajectory),
        claim2_holds_fraction=1.0 - len(violations) / len(trajectory),
        claim2_slack=slack,
        violations=violations,
        tolerance=tol,
    )


def interpolation_limit_check(point: TrajectoryPoint, tol: float = 0.05) -> bool:
    """Whether test ECE has converged to test error at an interpolating point.

    Only applies once the model interpolates (train error <= 0.005); asking
    about a non-interpolating point raises :class:`NotApplicableError`
    rather than answering False.
    """
    if point.train_error > INTERPOLATION_TRAIN_ERROR:
        raise NotApplicableError(
            f"point at step {point.step} is not interpolating "
            f"(train_error {point.train_error} > {INTERPOLATION_TRAIN_ERROR})"
        )
    return abs(point.test_ece - point.test_error) <= tol
