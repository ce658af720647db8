"""caliblab: calibration metrics, their train/test decomposition, and a
desk-scale training bench on synthetic tasks with known posteriors."""

from .binning import BinningScheme, assign_bin, assign_bins, make_equal_mass_bins, make_equal_width_bins
from .dataset import Dataset, PredictionRecord, concat_datasets
from .decomposition import (
    ClaimReport,
    TrajectoryPoint,
    decomposition_report,
    evaluate_claims,
    interpolation_limit_check,
)
from .errors import (
    CalibLabError,
    DegenerateBinsWarning,
    DivergenceError,
    EmptyInputError,
    LogParseError,
    LogValidationError,
    NotApplicableError,
    NotFittedError,
)
from .estimator import MlpClassifier
from .metrics import (
    DEFAULT_NUM_BINS,
    MetricsReport,
    ReliabilityDiagram,
    ace,
    brier,
    classification_error,
    ece_binned,
    ece_exact,
    is_perfectly_calibrated,
    mce,
    metrics_report,
    reliability,
    sce,
)
from .svg import reliability_svg, render_reliability_svg
from .synth import SyntheticTask, bayes_predictions, make_task, posterior, sample, sample_bayes_dataset
from .trainer import ExperimentResult, TrainConfig, over_config, run_experiment, under_config

__version__ = "0.1.0"

__all__ = [
    "BinningScheme",
    "CalibLabError",
    "ClaimReport",
    "Dataset",
    "DEFAULT_NUM_BINS",
    "DegenerateBinsWarning",
    "DivergenceError",
    "EmptyInputError",
    "ExperimentResult",
    "LogParseError",
    "LogValidationError",
    "MetricsReport",
    "MlpClassifier",
    "NotApplicableError",
    "NotFittedError",
    "PredictionRecord",
    "ReliabilityDiagram",
    "SyntheticTask",
    "TrainConfig",
    "TrajectoryPoint",
    "ace",
    "assign_bin",
    "assign_bins",
    "bayes_predictions",
    "brier",
    "classification_error",
    "concat_datasets",
    "decomposition_report",
    "ece_binned",
    "ece_exact",
    "evaluate_claims",
    "interpolation_limit_check",
    "is_perfectly_calibrated",
    "make_equal_mass_bins",
    "make_equal_width_bins",
    "make_task",
    "mce",
    "metrics_report",
    "over_config",
    "posterior",
    "reliability",
    "reliability_svg",
    "render_reliability_svg",
    "run_experiment",
    "sample",
    "sample_bayes_dataset",
    "sce",
    "under_config",
]
