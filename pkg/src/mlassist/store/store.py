"""The embedded document store.

Two newline-delimited JSON logs (datasets, experiments) hold one full record
document per line; a mutation appends the record's new version and the
latest version wins on replay.  Writes are acknowledged only after fsync.
Binary artifacts live in content-addressed files next to the logs.

Concurrency: one serialized writer (a process-wide lock), many readers.
Records are immutable dataclasses, so a reader never observes a torn record.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from datetime import datetime, timezone
from pathlib import Path

from mlassist.datasets.ingest import DatasetTable
from mlassist.datasets.records import DatasetRecord, normalize_tags
from mlassist.errors import (
    ConflictError,
    NotCompletedError,
    UnknownDatasetError,
    UnknownExperimentError,
    UnknownFieldError,
)
from mlassist.store.documents import ExperimentRecord, SemanticQuery

logger = logging.getLogger(__name__)

_QUERYABLE_FIELDS = {
    "id", "dataset_id", "task_type", "algorithm", "status",
    "launched_by", "feedback", "seed", "cv_folds",
}


def isoformat_now(clock=time.time) -> str:
    return datetime.fromtimestamp(clock(), tz=timezone.utc).isoformat(timespec="microseconds")


class _Log:
    """Append-only JSONL file; tolerates a truncated final line on replay."""

    def __init__(self, path: Path):
        self.path = path
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "ab")

    def append(self, doc: dict) -> None:
        line = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
        self._fh.write(line.encode("utf-8"))
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def replay(self):
        if not self.path.exists():
            return
        with open(self.path, "rb") as fh:
            raw = fh.read()
        for i, line in enumerate(raw.split(b"\n")):
            if not line.strip():
                continue
            try:
                yield json.loads(line.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError):
                # a torn trailing write was never acknowledged; drop it
                logger.warning("skipping unparseable line %d in %s", i + 1, self.path.name)

    def close(self) -> None:
        self._fh.close()


class ExperimentStore:
    """Datasets, experiments, and artifacts with tag-based retrieval."""

    def __init__(self, data_dir, clock=time.time):
        self.root = Path(data_dir) / "store"
        self.root.mkdir(parents=True, exist_ok=True)
        self._clock = clock
        self._lock = threading.RLock()
        self._datasets_log = _Log(self.root / "datasets.log")
        self._experiments_log = _Log(self.root / "experiments.log")
        self._artifact_dir = self.root / "artifacts"
        self._datasets: dict[str, DatasetRecord] = {}
        self._experiments: dict[str, ExperimentRecord] = {}
        self._term_index: dict[str, set[str]] = {}
        self._replay()

    def now(self) -> str:
        return isoformat_now(self._clock)

    def close(self) -> None:
        self._datasets_log.close()
        self._experiments_log.close()

    def _replay(self) -> None:
        for doc in self._datasets_log.replay():
            self._datasets[doc["id"]] = DatasetRecord.from_dict(doc)
        for doc in self._experiments_log.replay():
            record = ExperimentRecord.from_dict(doc)
            self._experiments[record.id] = record
        for record in self._experiments.values():
            self._index_terms(record)

    def _index_terms(self, record: ExperimentRecord) -> None:
        for term in record.index_terms:
            self._term_index.setdefault(term, set()).add(record.id)

    # -- datasets ----------------------------------------------------------

    def put_dataset(self, record: DatasetRecord) -> tuple[DatasetRecord, bool]:
        """Insert; identical content (same id) is a no-op returning the
        existing record.  Returns (record, created)."""
        with self._lock:
            existing = self._datasets.get(record.id)
            if existing is not None:
                return existing, False
            self._datasets_log.append(record.to_dict())
            self._datasets[record.id] = record
            return record, True

    def get_dataset(self, dataset_id: str) -> DatasetRecord:
        record = self._datasets.get(dataset_id)
        if record is None:
            raise UnknownDatasetError(f"no dataset {dataset_id!r}")
        return record

    def list_datasets(self) -> list[DatasetRecord]:
        with self._lock:
            records = list(self._datasets.values())
        return sorted(records, key=lambda r: (r.created_at, r.id))

    def update_dataset_tags(self, dataset_id: str, tags) -> DatasetRecord:
        with self._lock:
            record = self.get_dataset(dataset_id)
            updated = DatasetRecord.from_dict({**record.to_dict(), "tags": normalize_tags(tags)})
            self._datasets_log.append(updated.to_dict())
            self._datasets[dataset_id] = updated
            return updated

    def load_table(self, record: DatasetRecord) -> DatasetTable:
        blob = self.get_artifact(record.table_artifact)
        return DatasetTable.from_csv_bytes(blob, record.columns,
                                           record.target_column, record.task_type)

    # -- experiments -------------------------------------------------------

    def put_experiment(self, record: ExperimentRecord) -> str:
        """Durable insert.  Re-put of an identical record is a no-op;
        a different record under an existing id is a conflict."""
        record.validate()
        with self._lock:
            existing = self._experiments.get(record.id)
            if existing is not None:
                if existing.to_dict() == record.to_dict():
                    return record.id
                raise ConflictError(f"experiment {record.id} already exists with different content")
            self._experiments_log.append(record.to_dict())
            self._experiments[record.id] = record
            self._index_terms(record)
            return record.id

    def get_experiment(self, experiment_id: str) -> ExperimentRecord:
        record = self._experiments.get(experiment_id)
        if record is None:
            raise UnknownExperimentError(f"no experiment {experiment_id!r}")
        return record

    def _write_update(self, record: ExperimentRecord) -> ExperimentRecord:
        record.validate()
        self._experiments_log.append(record.to_dict())
        self._experiments[record.id] = record
        self._index_terms(record)
        return record

    def mark_running(self, experiment_id: str) -> ExperimentRecord:
        with self._lock:
            record = self.get_experiment(experiment_id)
            if record.status != "pending":
                return record
            return self._write_update(record.with_changes(status="running"))

    def resolve_experiment(self, experiment_id: str, *, result=None, error=None,
                           artifacts=None) -> tuple[ExperimentRecord, bool]:
        """Terminal transition; first resolution wins, later ones are no-ops.

        This is the store-side half of the exactly-once deposit contract.
        Returns (record, applied).
        """
        with self._lock:
            record = self.get_experiment(experiment_id)
            if record.status in ("completed", "failed"):
                return record, False
            changes = {"finished_at": self.now()}
            if result is not None:
                changes.update(status="completed", result=result, error=None)
            else:
                changes.update(status="failed", error=error or "unknown error")
            if artifacts:
                changes["artifacts"] = {**record.artifacts, **artifacts}
            return self._write_update(record.with_changes(**changes)), True

    def reset_to_pending(self, experiment_id: str) -> ExperimentRecord:
        """Requeue support for failed experiments that get resubmitted."""
        with self._lock:
            record = self.get_experiment(experiment_id)
            return self._write_update(record.with_changes(
                status="pending", error=None, result=None, finished_at=None))

    def set_feedback(self, experiment_id: str, vote: str) -> ExperimentRecord:
        with self._lock:
            record = self.get_experiment(experiment_id)
            if record.status != "completed":
                raise NotCompletedError(f"experiment {experiment_id} is {record.status}")
            return self._write_update(record.with_changes(feedback=vote))

    def attach_artifacts(self, experiment_id: str, artifacts: dict) -> ExperimentRecord:
        with self._lock:
            record = self.get_experiment(experiment_id)
            return self._write_update(record.with_changes(
                artifacts={**record.artifacts, **artifacts}))

    def query_experiments(self, **filters) -> list[ExperimentRecord]:
        for name in filters:
            if name not in _QUERYABLE_FIELDS:
                raise UnknownFieldError(f"cannot filter on {name!r}")
        with self._lock:
            records = list(self._experiments.values())
        out = [r for r in records
               if all(getattr(r, k) == v for k, v in filters.items())]
        return sorted(out, key=lambda r: (r.created_at, r.id))

    def semantic_best_configs(self, query: SemanticQuery) -> list[dict]:
        """Completed runs whose index terms intersect the query tags, ranked
        by the metric; ties break on (created_at, id)."""
        query.validate()
        with self._lock:
            candidate_ids = set()
            for term in query.tags_any:
                candidate_ids |= self._term_index.get(term, set())
            records = [self._experiments[i] for i in candidate_ids]
        rows = []
        for r in records:
            if query.status and r.status != query.status:
                continue
            value = r.metric_value(query.metric)
            if value is None:
                continue
            rows.append(r)
        sign = -1.0 if query.order == "desc" else 1.0
        rows.sort(key=lambda r: (sign * r.metric_value(query.metric), r.created_at, r.id))
        return [
            {
                "experiment_id": r.id,
                "dataset_id": r.dataset_id,
                "algorithm": r.algorithm,
                "parameters": r.parameters,
                "metric": query.metric,
                "metric_value": r.metric_value(query.metric),
            }
            for r in rows[: query.limit]
        ]

    # -- artifacts ---------------------------------------------------------

    def add_artifact(self, blob: bytes) -> str:
        digest = hashlib.sha256(blob).hexdigest()
        path = self._artifact_dir / digest[:2] / digest
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            with open(tmp, "wb") as fh:
                fh.write(blob)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        return digest

    def get_artifact(self, digest: str) -> bytes:
        path = self._artifact_dir / digest[:2] / digest
        if not path.exists():
            raise FileNotFoundError(f"no artifact {digest}")
        return path.read_bytes()
