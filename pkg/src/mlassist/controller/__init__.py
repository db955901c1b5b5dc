"""Job orchestration: queueing, worker leases, exactly-once result deposit."""

from mlassist.controller.queue import Controller, Job, WorkerInfo
from mlassist.controller.worker import LocalWorkerPool, execute_payload

__all__ = ["Controller", "Job", "LocalWorkerPool", "WorkerInfo", "execute_payload"]
