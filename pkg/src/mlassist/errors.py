"""Exception hierarchy shared across the package.

Every domain error maps to exit code 1 in the CLI and to a 4xx JSON body in
the REST service; anything else is a bug and surfaces as a 500.
"""

from __future__ import annotations


class MlAssistError(Exception):
    """Base class for all domain errors."""


# dataset ingestion
class ParseError(MlAssistError):
    """CSV is malformed (bad header, ragged rows, undecodable bytes)."""


class TargetError(MlAssistError):
    """Target column missing, non-numeric for regression, or constant for classification."""


class EmptyDatasetError(MlAssistError):
    """Dataset has no usable rows."""


# ml engine
class TaskMismatchError(MlAssistError):
    """Algorithm task does not match the dataset task."""


class TooFewSamplesError(MlAssistError):
    """Not enough samples (per class, for classification) for the requested folds."""


class NumericalFailureError(MlAssistError):
    """Training produced non-finite numbers it could not recover from."""


class LengthMismatchError(MlAssistError):
    """Prediction and truth vectors differ in length."""


class SingleClassError(MlAssistError):
    """ROC requires both classes present."""


class UnknownParamError(MlAssistError):
    """Parameter name not in the algorithm's curated menu."""


class UnknownAlgorithmError(MlAssistError):
    """Algorithm name not in the curated menu."""


class InvalidConfigError(MlAssistError):
    """Parameter value outside the curated allowed set."""


# experiment store
class ConflictError(MlAssistError):
    """Re-put of an existing id with different content."""


class InvariantViolationError(MlAssistError):
    """Record violates a documented invariant."""


class UnknownFieldError(MlAssistError):
    """Query filter references a field that does not exist."""


class UnknownMetricError(MlAssistError):
    """Metric name not produced by any task."""


class UnknownDatasetError(MlAssistError):
    """No dataset with that id."""


class UnknownExperimentError(MlAssistError):
    """No experiment with that id."""


# controller
class UnknownWorkerError(MlAssistError):
    """Worker id was never registered."""


class DuplicateExperimentError(MlAssistError):
    """Same (dataset, config, seed) already submitted; carries the existing id."""

    def __init__(self, experiment_id: str):
        super().__init__(f"experiment already exists: {experiment_id}")
        self.experiment_id = experiment_id


# recommender / knowledge base
class FormatError(MlAssistError):
    """Knowledge-base or rule file does not match the documented format."""


class EmptyInputError(MlAssistError):
    """Statistical comparison needs at least one usable record."""


class NotCompletedError(MlAssistError):
    """Operation requires a completed experiment."""


class NotClassificationError(MlAssistError):
    """Operation requires a classification experiment."""


class IoError(MlAssistError):
    """Filesystem write failed."""
