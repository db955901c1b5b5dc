"""Experiment documents and semantic queries."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from mlassist.errors import InvariantViolationError, UnknownMetricError
from mlassist.ml.evaluate import EvaluationResult
from mlassist.ml.metrics import ALL_METRICS

STATUSES = ("pending", "running", "completed", "failed")
FEEDBACK_VALUES = ("none", "up", "down")
LAUNCHERS = ("user", "ai")


@dataclass(frozen=True)
class ExperimentRecord:
    """One algorithm+parameters run on one dataset."""

    id: str
    dataset_id: str
    task_type: str
    algorithm: str
    parameters: dict
    seed: int
    cv_folds: int
    status: str = "pending"
    result: EvaluationResult | None = None
    error: str | None = None
    launched_by: str = "user"
    feedback: str = "none"
    index_terms: list[str] = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)
    created_at: str = ""
    finished_at: str | None = None

    def validate(self) -> None:
        if self.status not in STATUSES:
            raise InvariantViolationError(f"bad status {self.status!r}")
        if self.launched_by not in LAUNCHERS:
            raise InvariantViolationError(f"bad launched_by {self.launched_by!r}")
        if self.feedback not in FEEDBACK_VALUES:
            raise InvariantViolationError(f"bad feedback {self.feedback!r}")
        if (self.status == "completed") != (self.result is not None):
            raise InvariantViolationError("status=completed iff result present")
        if (self.status == "failed") != (self.error is not None):
            raise InvariantViolationError("status=failed iff error message present")
        if self.feedback != "none" and self.status != "completed":
            raise InvariantViolationError("feedback requires a completed experiment")

    def with_changes(self, **changes) -> "ExperimentRecord":
        return replace(self, **changes)

    def metric_value(self, metric: str) -> float | None:
        if self.result is None:
            return None
        return self.result.metrics.to_dict().get(metric)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dataset_id": self.dataset_id,
            "task_type": self.task_type,
            "algorithm": self.algorithm,
            "parameters": self.parameters,
            "seed": self.seed,
            "cv_folds": self.cv_folds,
            "status": self.status,
            "result": self.result.to_dict() if self.result else None,
            "error": self.error,
            "launched_by": self.launched_by,
            "feedback": self.feedback,
            "index_terms": sorted(self.index_terms),
            "artifacts": self.artifacts,
            "created_at": self.created_at,
            "finished_at": self.finished_at,
        }

    @staticmethod
    def from_dict(d: dict) -> "ExperimentRecord":
        result = d.get("result")
        return ExperimentRecord(
            id=d["id"],
            dataset_id=d["dataset_id"],
            task_type=d["task_type"],
            algorithm=d["algorithm"],
            parameters=d["parameters"],
            seed=d["seed"],
            cv_folds=d["cv_folds"],
            status=d["status"],
            result=EvaluationResult.from_dict(result, d["task_type"]) if result else None,
            error=d.get("error"),
            launched_by=d["launched_by"],
            feedback=d.get("feedback", "none"),
            index_terms=list(d.get("index_terms", [])),
            artifacts=dict(d.get("artifacts", {})),
            created_at=d["created_at"],
            finished_at=d.get("finished_at"),
        )


@dataclass(frozen=True)
class SemanticQuery:
    """Tag-linked retrieval: completed runs sharing any of the tags, ranked
    by a metric."""

    tags_any: frozenset
    metric: str
    order: str = "desc"
    limit: int = 10
    status: str = "completed"

    def validate(self) -> None:
        if self.metric not in ALL_METRICS:
            raise UnknownMetricError(f"unknown metric {self.metric!r}")
        if self.limit < 1:
            raise InvariantViolationError("limit must be >= 1")
        if self.order not in ("asc", "desc"):
            raise InvariantViolationError(f"order must be asc or desc, got {self.order!r}")
