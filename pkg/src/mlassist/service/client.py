"""HTTP client for the REST API, shared by the CLI and remote workers."""

from __future__ import annotations

import json
import time
import uuid

import httpx

from mlassist.datasets.ingest import DatasetTable
from mlassist.errors import MlAssistError
from mlassist.ml.algorithms import ParamConfig
from mlassist.ml.artifacts import save_model
from mlassist.ml.evaluate import CvSpec, train_evaluate


class ApiError(MlAssistError):
    def __init__(self, status_code: int, payload):
        self.status_code = status_code
        self.payload = payload
        detail = payload.get("detail") if isinstance(payload, dict) else payload
        super().__init__(f"HTTP {status_code}: {detail}")


class ApiClient:
    def __init__(self, base_url: str, token: str | None = None, timeout: float = 60.0):
        headers = {"authorization": f"Bearer {token}"} if token else {}
        self._client = httpx.Client(base_url=base_url.rstrip("/"), headers=headers,
                                    timeout=timeout)

    def close(self) -> None:
        self._client.close()

    def _unwrap(self, response: httpx.Response):
        if response.status_code >= 400:
            try:
                payload = response.json()
            except json.JSONDecodeError:
                payload = response.text
            raise ApiError(response.status_code, payload)
        if response.status_code == 204:
            return None
        content_type = response.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            return response.json()
        return response.content

    def get(self, path: str, **params):
        return self._unwrap(self._client.get(path, params=params or None))

    def post(self, path: str, body: dict | None = None, content: bytes | None = None):
        if content is not None:
            return self._unwrap(self._client.post(path, content=content))
        return self._unwrap(self._client.post(path, json=body or {}))

    # -- typed helpers ---------------------------------------------------------

    def ingest(self, raw: bytes, filename: str, name: str, target_column: str,
               task_type: str, tags: str = ""):
        response = self._client.post(
            "/datasets",
            files={"file": (filename, raw, "text/csv")},
            data={"name": name, "target_column": target_column,
                  "task_type": task_type, "tags": tags})
        return self._unwrap(response)

    def submit_experiment(self, dataset_id: str, algorithm: str | None,
                          parameters: dict | None, grid: bool, folds: int, seed: int):
        return self.post("/experiments", {
            "dataset_id": dataset_id, "algorithm": algorithm,
            "parameters": parameters, "grid": grid,
            "cv": {"folds": folds, "seed": seed},
            "request_id": uuid.uuid4().hex,
        })


class RemoteWorker:
    """Pull-based worker speaking the HTTP protocol against a remote service.

    Training runs locally; the model artifact is uploaded before completion
    so the result deposit can reference it by hash.
    """

    def __init__(self, client: ApiClient, poll_interval: float = 0.5):
        self.client = client
        self.poll_interval = poll_interval
        self.worker_id: str | None = None
        self._tables: dict[str, tuple] = {}

    def register(self) -> str:
        self.worker_id = self.client.post("/workers", {"capacity": 1})["worker_id"]
        return self.worker_id

    def _load_table(self, dataset_id: str) -> DatasetTable:
        record = self.client.get(f"/datasets/{dataset_id}")
        blob = self.client._client.get(f"/datasets/{dataset_id}/table").content
        return DatasetTable.from_csv_bytes(
            blob, [(c[0], c[1]) for c in record["columns"]],
            record["target_column"], record["task_type"])

    def run_one(self) -> bool:
        """Poll once; returns True if a job was processed."""
        job = self.client.post(f"/workers/{self.worker_id}/next")
        if job is None:
            return False
        payload = job["payload"]
        try:
            table = self._load_table(payload["dataset_id"])
            X, y, _ = table.to_matrix()
            config = ParamConfig(payload["algorithm"], dict(payload["parameters"]))
            result, model = train_evaluate(
                X, y, table.task_type, config,
                CvSpec(folds=int(payload["cv_folds"]), seed=int(payload["seed"])))
            blob = save_model(model, config.algorithm, config.values)
            sha = self.client.post("/artifacts", content=blob)["sha256"]
            outcome = {"result": result.to_dict(), "artifacts": {"model": sha}}
        except Exception as exc:
            outcome = {"error": f"{type(exc).__name__}: {exc}"}
        self.client.post(f"/jobs/{job['job_id']}/complete",
                         {"worker_id": self.worker_id, "outcome": outcome})
        return True

    def run_forever(self, stop=None) -> None:
        self.register()
        idle = 0
        while stop is None or not stop.is_set():
            if self.run_one():
                idle = 0
                continue
            idle += 1
            if idle % 20 == 0:
                self.client.post(f"/workers/{self.worker_id}/heartbeat")
            time.sleep(self.poll_interval)
