"""Closed-form, exemplar-free continual learning toolkit."""

from .buffer import RandomReluProjection
from .exceptions import (
    AnalyticCLError,
    CorruptionError,
    FileFormatError,
    ParameterError,
    ShapeError,
    SingularMatrixError,
    StateError,
)
from .labels import ClassRegistry, SplitLabels, split_and_register
from .learner import AnalyticContinualClassifier, TaskUpdateDecomposition
from .metrics import AccuracyTrace, MetricsReport, auc_accuracy, avg_accuracy, task_accuracy
from .scenario import (
    ScenarioSpec,
    SyntheticDataset,
    TaskBatch,
    TaskStream,
    generate_siblurry,
    generate_synthetic,
)

__all__ = [
    "AnalyticCLError",
    "AnalyticContinualClassifier",
    "AccuracyTrace",
    "ClassRegistry",
    "CorruptionError",
    "FileFormatError",
    "MetricsReport",
    "ParameterError",
    "RandomReluProjection",
    "ScenarioSpec",
    "ShapeError",
    "SingularMatrixError",
    "SplitLabels",
    "StateError",
    "SyntheticDataset",
    "TaskBatch",
    "TaskStream",
    "TaskUpdateDecomposition",
    "auc_accuracy",
    "avg_accuracy",
    "generate_siblurry",
    "generate_synthetic",
    "split_and_register",
    "task_accuracy",
]

__version__ = "0.1.0"
