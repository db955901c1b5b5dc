"""The controller state machine.

All queue mutations happen under one lock, so decisions are atomic and
totally ordered; workers interact only through register / heartbeat /
next_job / complete_job.  Time is injected, which makes lease expiry and
the whole failure protocol testable with a fake clock.

Exactly-once deposit rests on two independent guards: a completion is
accepted only from the worker currently holding the lease, and the store's
terminal transition is first-write-wins.
"""

from __future__ import annotations

import hashlib
import logging
import threading
import time
import uuid
from dataclasses import dataclass, replace

from mlassist.errors import UnknownExperimentError, UnknownWorkerError
from mlassist.ml.algorithms import ParamConfig, validate_config
from mlassist.store.documents import ExperimentRecord

logger = logging.getLogger(__name__)

PRIORITY = {"user": 0, "ai": 1}
DEFAULT_LEASE_TTL = 300.0
DEFAULT_MAX_ATTEMPTS = 3


@dataclass(frozen=True)
class Job:
    job_id: str
    experiment_id: str
    payload: dict
    priority: int
    sequence: int
    state: str = "queued"
    attempts: int = 0
    lease: dict | None = None  # {"worker_id", "deadline"}

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "experiment_id": self.experiment_id,
            "payload": self.payload,
            "state": self.state,
            "attempts": self.attempts,
            "lease": self.lease,
        }


@dataclass
class WorkerInfo:
    worker_id: str
    capacity: int = 1
    last_heartbeat: float = 0.0


@dataclass(frozen=True)
class SubmitOutcome:
    experiment_id: str
    job_id: str | None
    duplicate: bool


def experiment_id_for(dataset_id: str, config: ParamConfig, seed: int, cv_folds: int) -> str:
    """Deterministic id: resubmitting the same work converges on one record."""
    material = "|".join([dataset_id, config.algorithm, config.canonical(),
                         str(int(seed)), str(int(cv_folds))])
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


class Controller:
    def __init__(self, store, clock=time.time, lease_ttl: float = DEFAULT_LEASE_TTL,
                 max_attempts: int = DEFAULT_MAX_ATTEMPTS):
        self.store = store
        self.clock = clock
        self.lease_ttl = float(lease_ttl)
        self.max_attempts = int(max_attempts)
        self._lock = threading.RLock()
        self._jobs: dict[str, Job] = {}
        self._by_experiment: dict[str, str] = {}
        self._workers: dict[str, WorkerInfo] = {}
        self._sequence = 0
        self._completion_listeners: list = []
        self._recover_pending()

    # -- events --------------------------------------------------------------

    def on_completion(self, listener) -> None:
        """listener(ExperimentRecord) fires after a terminal deposit."""
        self._completion_listeners.append(listener)

    def _emit_completion(self, record: ExperimentRecord) -> None:
        for listener in list(self._completion_listeners):
            try:
                listener(record)
            except Exception:
                logger.exception("completion listener failed")

    # -- submission ------------------------------------------------------------

    def _recover_pending(self) -> None:
        """Requeue experiments interrupted before a terminal state."""
        for status in ("pending", "running"):
            for record in self.store.query_experiments(status=status):
                if record.status == "running":
                    # no live lease after restart; put it back in line
                    record = self.store.reset_to_pending(record.id)
                self._enqueue(record)

    def _enqueue(self, record: ExperimentRecord) -> Job:
        job = Job(
            job_id=uuid.uuid4().hex,
            experiment_id=record.id,
            payload={
                "dataset_id": record.dataset_id,
                "algorithm": record.algorithm,
                "parameters": record.parameters,
                "seed": record.seed,
                "cv_folds": record.cv_folds,
            },
            priority=PRIORITY[record.launched_by],
            sequence=self._next_sequence(),
        )
        self._jobs[job.job_id] = job
        self._by_experiment[record.id] = job.job_id
        return job

    def _next_sequence(self) -> int:
        self._sequence += 1
        return self._sequence

    def _requeue_experiment(self, record: ExperimentRecord) -> Job:
        """Fresh attempt budget for an explicitly resubmitted experiment,
        keeping the one-job-per-experiment invariant."""
        old_id = self._by_experiment.get(record.id)
        if old_id and old_id in self._jobs:
            job = replace(self._jobs[old_id], state="queued", attempts=0,
                          lease=None, sequence=self._next_sequence())
            self._jobs[old_id] = job
            return job
        return self._enqueue(record)

    def submit(self, dataset_id: str, config: ParamConfig, *, seed: int = 0,
               cv_folds: int = 5, launched_by: str = "user") -> SubmitOutcome:
        """Create the experiment record and queue its job.

        Duplicate submissions (same dataset, config, seed, folds) return the
        existing experiment id without queueing new work, unless the previous
        attempt failed, in which case it is requeued.
        """
        with self._lock:
            dataset = self.store.get_dataset(dataset_id)
            config = validate_config(config, dataset.task_type)
            experiment_id = experiment_id_for(dataset_id, config, seed, cv_folds)
            try:
                existing = self.store.get_experiment(experiment_id)
            except UnknownExperimentError:
                existing = None
            if existing is not None:
                if existing.status == "failed":
                    record = self.store.reset_to_pending(experiment_id)
                    job = self._requeue_experiment(record)
                    return SubmitOutcome(experiment_id, job.job_id, True)
                return SubmitOutcome(experiment_id, self._by_experiment.get(experiment_id), True)
            record = ExperimentRecord(
                id=experiment_id,
                dataset_id=dataset_id,
                task_type=dataset.task_type,
                algorithm=config.algorithm,
                parameters=config.values,
                seed=int(seed),
                cv_folds=int(cv_folds),
                status="pending",
                launched_by=launched_by,
                index_terms=sorted(set(dataset.tags) | {config.algorithm, dataset.task_type}),
                created_at=self.store.now(),
            )
            self.store.put_experiment(record)
            job = self._enqueue(record)
            return SubmitOutcome(experiment_id, job.job_id, False)

    # -- worker protocol -------------------------------------------------------

    def register_worker(self, worker_id: str | None = None, capacity: int = 1) -> str:
        with self._lock:
            if worker_id and worker_id in self._workers:
                self._workers[worker_id].last_heartbeat = self.clock()
                return worker_id
            worker_id = worker_id or uuid.uuid4().hex
            self._workers[worker_id] = WorkerInfo(worker_id, max(1, int(capacity)), self.clock())
            return worker_id

    def heartbeat(self, worker_id: str) -> None:
        with self._lock:
            worker = self._workers.get(worker_id)
            if worker is None:
                raise UnknownWorkerError(f"worker {worker_id!r} is not registered")
            worker.last_heartbeat = self.clock()

    def next_job(self, worker_id: str) -> Job | None:
        """Atomically lease the oldest queued job in the highest priority
        class; a job is never leased to two workers at once."""
        with self._lock:
            if worker_id not in self._workers:
                raise UnknownWorkerError(f"worker {worker_id!r} is not registered")
            queued = [j for j in self._jobs.values() if j.state == "queued"]
            if not queued:
                return None
            job = min(queued, key=lambda j: (j.priority, j.sequence))
            leased = replace(job, state="leased", attempts=job.attempts + 1,
                             lease={"worker_id": worker_id,
                                    "deadline": self.clock() + self.lease_ttl})
            self._jobs[job.job_id] = leased
            self.store.mark_running(job.experiment_id)
            return leased

    def complete_job(self, job_id: str, worker_id: str, *, result=None, error=None,
                     artifacts=None) -> dict:
        """Idempotent, stale-lease-safe completion.

        Only the worker holding the current lease deposits; everything else
        is acknowledged without effect.
        """
        completed_record = None
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                return {"ack": True, "applied": False, "reason": "unknown job"}
            if job.state in ("done", "failed", "cancelled"):
                return {"ack": True, "applied": False, "reason": f"job already {job.state}"}
            if job.state != "leased" or not job.lease or job.lease["worker_id"] != worker_id:
                return {"ack": True, "applied": False, "reason": "lease not held by caller"}
            record, applied = self.store.resolve_experiment(
                job.experiment_id, result=result, error=error, artifacts=artifacts)
            new_state = "done" if record.status == "completed" else "failed"
            self._jobs[job_id] = replace(job, state=new_state, lease=None)
            if applied:
                completed_record = record
        if completed_record is not None:
            self._emit_completion(completed_record)
        return {"ack": True, "applied": completed_record is not None}

    def reap_expired_leases(self, now: float | None = None) -> list[str]:
        """Requeue expired leases, failing jobs that exhausted max_attempts."""
        now = self.clock() if now is None else now
        requeued = []
        failed_records = []
        with self._lock:
            for job_id, job in list(self._jobs.items()):
                if job.state != "leased" or job.lease is None:
                    continue
                if job.lease["deadline"] >= now:
                    continue
                if job.attempts >= self.max_attempts:
                    record, applied = self.store.resolve_experiment(
                        job.experiment_id,
                        error=f"lease expired after {job.attempts} attempts")
                    self._jobs[job_id] = replace(job, state="failed", lease=None)
                    if applied:
                        failed_records.append(record)
                else:
                    self._jobs[job_id] = replace(job, state="queued", lease=None)
                    requeued.append(job_id)
        for record in failed_records:
            self._emit_completion(record)
        return requeued

    def cancel(self, job_id: str) -> bool:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None or job.state not in ("queued", "leased"):
                return False
            self.store.resolve_experiment(job.experiment_id, error="cancelled")
            self._jobs[job_id] = replace(job, state="cancelled", lease=None)
            return True

    # -- introspection ---------------------------------------------------------

    def counts(self) -> dict:
        with self._lock:
            out = {"queued": 0, "leased": 0, "done": 0, "failed": 0, "cancelled": 0}
            for job in self._jobs.values():
                out[job.state] += 1
            out["total"] = len(self._jobs)
            return out

    def get_job(self, job_id: str) -> Job | None:
        return self._jobs.get(job_id)

    def jobs_for_experiments(self, experiment_ids) -> dict:
        with self._lock:
            return {eid: self._jobs.get(self._by_experiment.get(eid, "")) for eid in experiment_ids}
