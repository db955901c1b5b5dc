"""REST surface over the store, controller, ML engine, and AI runner.

Handlers are stateless; all shared state lives behind the store/controller/
runner contracts.  Mutating endpoints accept an optional client-supplied
request_id and replay the prior response for a repeated id.
"""

from __future__ import annotations

import logging
import os
import threading
from importlib import resources
from pathlib import Path

from fastapi import Depends, FastAPI, Form, Header, HTTPException, Request, Response, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from mlassist import errors
from mlassist.controller import Controller, LocalWorkerPool
from mlassist.datasets.registry import ingest_dataset
from mlassist.ml.algorithms import ParamConfig, default_grid, get_algorithm, list_algorithms
from mlassist.ml.evaluate import EvaluationResult
from mlassist.recommender import AiRunner, apply_feedback, load_knowledge_base, load_rules, recommend
from mlassist.recommender.kb import KBEntry, PRIMARY_METRIC
from mlassist.recommender.engine import export_results_table
from mlassist.reporting import build_heatmap, roc_csv_bytes
from mlassist.reporting.svg import heatmap_svg, roc_svg
from mlassist.service.config import Config
from mlassist.service.webhook import WebhookNotifier
from mlassist.store import ExperimentStore, SemanticQuery

logger = logging.getLogger(__name__)

_STATUS_BY_ERROR = {
    errors.UnknownDatasetError: 404,
    errors.UnknownExperimentError: 404,
    errors.UnknownWorkerError: 404,
    errors.ConflictError: 409,
}


def _http_status(exc: errors.MlAssistError) -> int:
    for cls, status in _STATUS_BY_ERROR.items():
        if isinstance(exc, cls):
            return status
    return 400


class AppState:
    """Everything a handler needs, created once per service process."""

    def __init__(self, config: Config, clock=None):
        import time
        self.config = config
        self.clock = clock or time.time
        self.store = ExperimentStore(config.data_dir, clock=self.clock)
        self.controller = Controller(self.store, clock=self.clock,
                                     lease_ttl=config.lease_ttl_secs,
                                     max_attempts=config.max_attempts)
        self.kb, self.kb_errors = self._load_kb(config.kb_path)
        self.rules = self._load_rules(config.rules_path)
        self.notifier = WebhookNotifier(config.webhook_url)
        self.runner = AiRunner(self.store, self.controller, self.kb, self.rules,
                               self.notifier)
        self.controller.on_completion(self._announce_completion)
        self._replay_live_entries()
        self._idempotency: dict[tuple[str, str], dict] = {}
        self._idempotency_lock = threading.Lock()
        self.worker_pool: LocalWorkerPool | None = None
        self._ai_thread: threading.Thread | None = None
        self._stop = threading.Event()

    @staticmethod
    def _load_kb(path):
        if path:
            return load_knowledge_base(path)
        with resources.as_file(resources.files("mlassist.data") / "kb_bootstrap.tsv") as p:
            return load_knowledge_base(p)

    @staticmethod
    def _load_rules(path):
        if path:
            return load_rules(path)
        with resources.as_file(resources.files("mlassist.data") / "default_rules.json") as p:
            return load_rules(p)

    def _replay_live_entries(self) -> None:
        """Rebuild the KB's live layer from completed experiments on disk."""
        for record in self.store.query_experiments(status="completed"):
            metric = PRIMARY_METRIC[record.task_type]
            value = record.metric_value(metric)
            if value is None:
                continue
            dataset = self.store.get_dataset(record.dataset_id)
            self.kb.upsert_live(KBEntry(
                dataset_name=dataset.name, meta_features=dataset.meta_features,
                algorithm=record.algorithm, parameters=record.parameters,
                metric_name=metric, metric_value=float(value), source="live"))

    def _announce_completion(self, record) -> None:
        self.notifier.send({
            "kind": "experiment_completed",
            "experiment_id": record.id,
            "dataset_id": record.dataset_id,
            "summary": {
                "status": record.status,
                "algorithm": record.algorithm,
                "parameters": record.parameters,
                "metrics": record.result.metrics.to_dict() if record.result else None,
                "error": record.error,
            },
            "timestamp": record.finished_at or self.store.now(),
        })

    def start_background(self) -> None:
        if self.config.workers > 0:
            self.worker_pool = LocalWorkerPool(self.controller, self.store,
                                               n_workers=self.config.workers)
            self.worker_pool.start()
        self._ai_thread = threading.Thread(target=self._ai_loop, name="ai-loop",
                                           daemon=True)
        self._ai_thread.start()

    def _ai_loop(self) -> None:
        while not self._stop.wait(0.25):
            try:
                self.controller.reap_expired_leases()
                self.runner.tick_all()
            except Exception:
                logger.exception("ai loop iteration failed")

    def shutdown(self) -> None:
        self._stop.set()
        if self.worker_pool:
            self.worker_pool.stop()
        self.notifier.close()
        self.store.close()

    def remembered(self, route: str, request_id: str | None):
        if not request_id:
            return None
        with self._idempotency_lock:
            return self._idempotency.get((route, request_id))

    def remember(self, route: str, request_id: str | None, response: dict) -> dict:
        if request_id:
            with self._idempotency_lock:
                self._idempotency[(route, request_id)] = response
        return response


# -- request bodies -----------------------------------------------------------

class CvBody(BaseModel):
    folds: int = 5
    seed: int = 0


class ExperimentBody(BaseModel):
    dataset_id: str
    algorithm: str | None = None
    parameters: dict | None = None
    grid: bool = False
    cv: CvBody = CvBody()
    request_id: str | None = None


class FeedbackBody(BaseModel):
    vote: str
    request_id: str | None = None


class SessionBody(BaseModel):
    dataset_id: str
    max_runs: int = 10
    update_every: int = 1
    epsilon: float = 0.1
    seed: int = 0
    cv_folds: int = 5
    enabled: bool = True
    request_id: str | None = None


class ToggleBody(BaseModel):
    enabled: bool


class WorkerBody(BaseModel):
    worker_id: str | None = None
    capacity: int = 1


class CompleteBody(BaseModel):
    worker_id: str
    outcome: dict


class TagsBody(BaseModel):
    tags: list[str]


def create_app(config: Config | None = None, clock=None, state: AppState | None = None) -> FastAPI:
    from contextlib import asynccontextmanager

    state = state or AppState(config or Config(), clock=clock)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        state.start_background()
        yield
        state.shutdown()

    app = FastAPI(title="mlassist", version="0.1.0", lifespan=lifespan)
    app.state.ctx = state

    def require_auth(authorization: str | None = Header(default=None)):
        token = state.config.api_token
        if not token:
            return
        if authorization != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    auth = Depends(require_auth)

    @app.exception_handler(errors.MlAssistError)
    async def domain_error_handler(_request: Request, exc: errors.MlAssistError):
        return JSONResponse(status_code=_http_status(exc),
                            content={"error": type(exc).__name__, "detail": str(exc)})

    @app.get("/health")
    def health():
        return {"ok": True, "counts": state.controller.counts(),
                "kb_entries": len(state.kb)}

    # -- datasets -------------------------------------------------------------

    @app.post("/datasets", dependencies=[auth])
    async def post_dataset(file: UploadFile, name: str = Form(None),
                           target_column: str = Form(...), task_type: str = Form(...),
                           tags: str = Form("")):
        raw = await file.read()
        tag_list = [t for t in tags.split(",") if t.strip()]
        record, created = ingest_dataset(
            state.store, raw, name or (file.filename or "dataset"),
            target_column, task_type, tags=tag_list)
        return {"dataset": record.to_dict(), "created": created}

    @app.get("/datasets", dependencies=[auth])
    def get_datasets():
        return {"datasets": [r.to_dict() for r in state.store.list_datasets()]}

    @app.get("/datasets/{dataset_id}", dependencies=[auth])
    def get_dataset(dataset_id: str):
        return state.store.get_dataset(dataset_id).to_dict()

    @app.get("/datasets/{dataset_id}/table", dependencies=[auth])
    def get_dataset_table(dataset_id: str):
        record = state.store.get_dataset(dataset_id)
        blob = state.store.get_artifact(record.table_artifact)
        return PlainTextResponse(blob.decode("utf-8"), media_type="text/csv")

    @app.put("/datasets/{dataset_id}/tags", dependencies=[auth])
    def put_tags(dataset_id: str, body: TagsBody):
        return state.store.update_dataset_tags(dataset_id, body.tags).to_dict()

    # -- algorithms -------------------------------------------------------------

    @app.get("/algorithms", dependencies=[auth])
    def get_algorithms(task: str):
        return {"algorithms": [s.to_dict() for s in list_algorithms(task)]}

    # -- experiments ------------------------------------------------------------

    def _submit_one(dataset_id: str, config_: ParamConfig, cv: CvBody, launched_by="user"):
        outcome = state.controller.submit(dataset_id, config_, seed=cv.seed,
                                          cv_folds=cv.folds, launched_by=launched_by)
        return {"experiment_id": outcome.experiment_id, "job_id": outcome.job_id,
                "duplicate": outcome.duplicate}

    @app.post("/experiments", dependencies=[auth])
    def post_experiments(body: ExperimentBody):
        cached = state.remembered("/experiments", body.request_id)
        if cached is not None:
            return cached
        dataset = state.store.get_dataset(body.dataset_id)
        if body.grid:
            if body.algorithm:
                specs = [get_algorithm(body.algorithm, dataset.task_type)]
            else:
                specs = list_algorithms(dataset.task_type)
            submitted = []
            for spec in specs:
                for config_ in default_grid(spec):
                    submitted.append(_submit_one(body.dataset_id, config_, body.cv))
            response = {"submitted": submitted, "count": len(submitted)}
        else:
            if not body.algorithm:
                raise errors.InvalidConfigError("algorithm is required unless grid=true")
            config_ = ParamConfig(body.algorithm, body.parameters or {})
            response = _submit_one(body.dataset_id, config_, body.cv)
        return state.remember("/experiments", body.request_id, response)

    @app.get("/experiments", dependencies=[auth])
    def get_experiments(dataset_id: str | None = None, status: str | None = None,
                        algorithm: str | None = None, launched_by: str | None = None):
        filters = {k: v for k, v in [("dataset_id", dataset_id), ("status", status),
                                     ("algorithm", algorithm), ("launched_by", launched_by)]
                   if v is not None}
        return {"experiments": [r.to_dict() for r in state.store.query_experiments(**filters)]}

    @app.get("/experiments/{experiment_id}", dependencies=[auth])
    def get_experiment(experiment_id: str):
        return state.store.get_experiment(experiment_id).to_dict()

    @app.post("/experiments/{experiment_id}/feedback", dependencies=[auth])
    def post_feedback(experiment_id: str, body: FeedbackBody):
        route = f"/experiments/{experiment_id}/feedback"
        cached = state.remembered(route, body.request_id)
        if cached is not None:
            return cached
        apply_feedback(state.store, state.kb, experiment_id, body.vote)
        record = state.store.get_experiment(experiment_id)
        return state.remember(route, body.request_id, record.to_dict())

    @app.get("/experiments/{experiment_id}/roc", dependencies=[auth])
    def get_roc(experiment_id: str, format: str = "json"):
        record = state.store.get_experiment(experiment_id)
        if record.status != "completed":
            raise errors.NotCompletedError(f"experiment {experiment_id} is {record.status}")
        if record.task_type != "classification" or record.result.roc is None:
            raise errors.NotClassificationError("no ROC for this experiment")
        curve = record.result.roc
        if format == "csv":
            return PlainTextResponse(roc_csv_bytes(curve).decode("utf-8"),
                                     media_type="text/csv")
        if format == "svg":
            return Response(roc_svg(curve.points, curve.auc),
                            media_type="image/svg+xml")
        return curve.to_dict()

    # -- semantic query -----------------------------------------------------------

    @app.get("/best", dependencies=[auth])
    def get_best(tags: str, metric: str, order: str = "desc", limit: int = 10):
        tag_set = frozenset(t.strip().casefold() for t in tags.split(",") if t.strip())
        query = SemanticQuery(tags_any=tag_set, metric=metric, order=order, limit=limit)
        return {"results": state.store.semantic_best_configs(query)}

    # -- recommendations / AI -------------------------------------------------------

    @app.get("/recommendations", dependencies=[auth])
    def get_recommendations(dataset_id: str, n: int = 5):
        dataset = state.store.get_dataset(dataset_id)
        tried = [(r.algorithm, r.parameters) for r in
                 state.store.query_experiments(dataset_id=dataset_id)]
        recs = recommend(dataset.meta_features, state.kb, state.rules, tried, n)
        return {"recommendations": [r.to_dict() for r in recs]}

    @app.post("/ai/sessions", dependencies=[auth])
    def post_session(body: SessionBody):
        cached = state.remembered("/ai/sessions", body.request_id)
        if cached is not None:
            return cached
        session = state.runner.create_session(
            body.dataset_id, max_runs=body.max_runs, update_every=body.update_every,
            epsilon=body.epsilon, seed=body.seed, cv_folds=body.cv_folds,
            enabled=body.enabled)
        return state.remember("/ai/sessions", body.request_id, session.to_dict())

    @app.get("/ai/sessions", dependencies=[auth])
    def get_sessions():
        return {"sessions": [s.to_dict() for s in state.runner.sessions.values()]}

    @app.get("/ai/sessions/{session_id}", dependencies=[auth])
    def get_session(session_id: str):
        session = state.runner.get_session(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="no such session")
        return session.to_dict()

    @app.post("/ai/sessions/{session_id}/toggle", dependencies=[auth])
    def post_toggle(session_id: str, body: ToggleBody):
        if state.runner.get_session(session_id) is None:
            raise HTTPException(status_code=404, detail="no such session")
        return state.runner.toggle(session_id, body.enabled).to_dict()

    # -- knowledge base ----------------------------------------------------------

    @app.post("/kb/load", dependencies=[auth])
    async def post_kb_load(request: Request):
        import tempfile
        raw = await request.body()
        with tempfile.NamedTemporaryFile(suffix=".tsv", delete=False) as fh:
            fh.write(raw)
            tmp = fh.name
        try:
            loaded, load_errors = load_knowledge_base(tmp)
        finally:
            os.unlink(tmp)
        for entry in loaded.entries:
            state.kb.add_entry(entry)
        return {"loaded": len(loaded), "errors": load_errors, "kb_entries": len(state.kb)}

    @app.get("/kb", dependencies=[auth])
    def get_kb():
        entries, _, _ = state.kb.snapshot()
        return {"entries": len(entries),
                "datasets": sorted({e.dataset_name for e in entries}),
                "bootstrap_errors": state.kb_errors}

    # -- reports -------------------------------------------------------------------

    @app.get("/reports/heatmap", dependencies=[auth])
    def get_heatmap(metric: str, format: str = "json"):
        records = state.store.query_experiments(status="completed")
        names = {d.id: d.name for d in state.store.list_datasets()}
        matrix = build_heatmap(records, metric, names)
        if format == "svg":
            return Response(heatmap_svg(matrix.row_labels, matrix.col_labels,
                                        matrix.cells, metric),
                            media_type="image/svg+xml")
        return matrix.to_dict()

    @app.get("/reports/results-table", dependencies=[auth])
    def get_results_table():
        import tempfile
        records = state.store.query_experiments()
        names = {d.id: d.name for d in state.store.list_datasets()}
        with tempfile.NamedTemporaryFile(suffix=".tsv", delete=False, mode="w") as fh:
            tmp = fh.name
        try:
            export_results_table(records, tmp, names)
            text = Path(tmp).read_text(encoding="utf-8")
        finally:
            os.unlink(tmp)
        return PlainTextResponse(text, media_type="text/tab-separated-values")

    # -- worker protocol --------------------------------------------------------------

    @app.post("/workers", dependencies=[auth])
    def post_worker(body: WorkerBody):
        worker_id = state.controller.register_worker(worker_id=body.worker_id,
                                                     capacity=body.capacity)
        return {"worker_id": worker_id}

    @app.post("/workers/{worker_id}/heartbeat", dependencies=[auth])
    def post_heartbeat(worker_id: str):
        state.controller.heartbeat(worker_id)
        return {"ok": True}

    @app.post("/workers/{worker_id}/next", dependencies=[auth])
    def post_next(worker_id: str):
        state.controller.reap_expired_leases()
        job = state.controller.next_job(worker_id)
        if job is None:
            return Response(status_code=204)
        return job.to_dict()

    @app.post("/jobs/{job_id}/complete", dependencies=[auth])
    def post_complete(job_id: str, body: CompleteBody):
        outcome = body.outcome
        result = None
        if outcome.get("result") is not None:
            job = state.controller.get_job(job_id)
            if job is None:
                return {"ack": True, "applied": False, "reason": "unknown job"}
            record = state.store.get_experiment(job.experiment_id)
            result = EvaluationResult.from_dict(outcome["result"], record.task_type)
        return state.controller.complete_job(
            job_id, body.worker_id, result=result,
            error=outcome.get("error"), artifacts=outcome.get("artifacts"))

    # -- artifacts ----------------------------------------------------------------------

    @app.post("/artifacts", dependencies=[auth])
    async def post_artifact(request: Request):
        blob = await request.body()
        return {"sha256": state.store.add_artifact(blob)}

    @app.get("/artifacts/{digest}", dependencies=[auth])
    def get_artifact(digest: str):
        try:
            blob = state.store.get_artifact(digest)
        except FileNotFoundError:
            raise HTTPException(status_code=404, detail="no such artifact")
        return Response(blob, media_type="application/octet-stream")

    # -- static UI ------------------------------------------------------------------------

    ui_dir = os.environ.get("MLASSIST_UI_DIR", "frontend/static")
    if Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
