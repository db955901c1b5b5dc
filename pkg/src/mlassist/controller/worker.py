"""Job execution: the training routine workers run, plus an in-process pool.

Remote workers speak the same four-operation protocol over HTTP (see the
service module); the pool here talks to the controller directly so the
system runs standalone.
"""

from __future__ import annotations

import logging
import threading
import time

from mlassist.errors import MlAssistError
from mlassist.ml.algorithms import ParamConfig
from mlassist.ml.artifacts import save_model
from mlassist.ml.evaluate import CvSpec, train_evaluate

logger = logging.getLogger(__name__)


def execute_payload(store, payload: dict) -> dict:
    """Train per the job payload; returns {"result", "artifacts"} or {"error"}."""
    try:
        dataset = store.get_dataset(payload["dataset_id"])
        table = store.load_table(dataset)
        X, y, _ = table.to_matrix()
        config = ParamConfig(payload["algorithm"], dict(payload["parameters"]))
        result, model = train_evaluate(
            X, y, dataset.task_type, config,
            CvSpec(folds=int(payload["cv_folds"]), seed=int(payload["seed"])))
        blob = save_model(model, config.algorithm, config.values)
        return {"result": result, "artifacts": {"model": store.add_artifact(blob)}}
    except MlAssistError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}
    except Exception as exc:  # worker must never crash the pool
        logger.exception("job execution failed")
        return {"error": f"{type(exc).__name__}: {exc}"}


class LocalWorkerPool:
    """Threads that poll the controller, train, and complete jobs."""

    def __init__(self, controller, store, n_workers: int = 2, poll_interval: float = 0.05):
        self.controller = controller
        self.store = store
        self.n_workers = n_workers
        self.poll_interval = poll_interval
        self._threads: list[threading.Thread] = []
        self._stop = threading.Event()

    def start(self) -> None:
        for i in range(self.n_workers):
            worker_id = self.controller.register_worker(capacity=1)
            thread = threading.Thread(target=self._run, args=(worker_id,),
                                      name=f"worker-{i}", daemon=True)
            thread.start()
            self._threads.append(thread)

    def _run(self, worker_id: str) -> None:
        while not self._stop.is_set():
            job = self.controller.next_job(worker_id)
            if job is None:
                self.controller.reap_expired_leases()
                self._stop.wait(self.poll_interval)
                continue
            outcome = execute_payload(self.store, job.payload)
            self.controller.complete_job(
                job.job_id, worker_id,
                result=outcome.get("result"),
                error=outcome.get("error"),
                artifacts=outcome.get("artifacts"),
            )

    def stop(self, timeout: float = 5.0) -> None:
        self._stop.set()
        for thread in self._threads:
            thread.join(timeout=timeout)

    def drain(self, timeout: float = 120.0) -> bool:
        """Block until no queued or leased jobs remain; False on timeout."""
        deadline = time.time() + timeout
        while time.time() < deadline:
            counts = self.controller.counts()
            if counts["queued"] == 0 and counts["leased"] == 0:
                return True
            time.sleep(0.02)
        return False
