"""Autonomous analysis sessions.

A session owns a run budget and an update cadence for one dataset.  Each
step produces exactly one action: notify the user if enough completions
accumulated, stop when the budget or the configuration space is exhausted,
otherwise launch the next configuration (top recommendation, or a uniform
random untried one with probability epsilon).

The decision function is pure given the session state, so with a fixed seed
a session replays identically.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np

from mlassist.errors import InvalidConfigError
from mlassist.ml.algorithms import ParamConfig, full_grid, validate_config
from mlassist.ml.base import derive_rng
from mlassist.recommender.engine import compare_algorithms, recommend
from mlassist.recommender.kb import KBEntry, PRIMARY_METRIC

MAX_RECOMMENDATION_POOL = 4096


@dataclass
class AiSession:
    session_id: str
    dataset_id: str
    enabled: bool = True
    max_runs: int = 10
    runs_launched: int = 0
    update_every: int = 1
    epsilon: float = 0.1
    seed: int = 0
    cv_folds: int = 5
    completions_since_notify: int = 0
    stop_reason: str | None = None
    _rng: np.random.Generator | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidConfigError("epsilon must be in [0, 1]")
        if self.max_runs < 0 or self.update_every < 1:
            raise InvalidConfigError("max_runs must be >= 0 and update_every >= 1")
        if self._rng is None:
            self._rng = derive_rng(self.seed, 777)

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "dataset_id": self.dataset_id,
            "enabled": self.enabled,
            "max_runs": self.max_runs,
            "runs_launched": self.runs_launched,
            "update_every": self.update_every,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "cv_folds": self.cv_folds,
            "completions_since_notify": self.completions_since_notify,
            "stop_reason": self.stop_reason,
        }


@dataclass(frozen=True)
class AiAction:
    kind: str  # launch | notify | idle | stop
    config: ParamConfig | None = None
    summary: dict | None = None
    reason: str | None = None


def _key(algorithm: str, parameters: dict) -> tuple[str, str]:
    return (algorithm, json.dumps(parameters, sort_keys=True, separators=(",", ":")))


def ai_step(session: AiSession, *, meta, kb, rules, tried, task: str,
            inflight: int) -> AiAction:
    """One autonomous decision.  `tried` is the set of config keys already
    run on the dataset (any status); `inflight` counts non-terminal runs."""
    if not session.enabled:
        return AiAction("idle")
    if session.completions_since_notify >= session.update_every:
        session.completions_since_notify -= session.update_every
        return AiAction("notify")
    if session.runs_launched >= session.max_runs:
        session.enabled = False
        session.stop_reason = "budget"
        return AiAction("stop", reason="budget")

    grid = full_grid(task)
    untried_grid = [c for c in grid if c.key() not in tried]

    if session.epsilon > 0 and untried_grid and session._rng.random() < session.epsilon:
        pick = untried_grid[int(session._rng.integers(len(untried_grid)))]
        return AiAction("launch", config=pick)

    for rec in recommend(meta, kb, rules, history=sorted(tried), n=MAX_RECOMMENDATION_POOL):
        try:
            validate_config(rec.config, task)
        except Exception:
            continue  # knowledge-base config outside the curated menu
        return AiAction("launch", config=rec.config)
    if untried_grid:
        # recommendations exhausted but grid coverage remains
        return AiAction("launch", config=untried_grid[0])
    if inflight > 0:
        return AiAction("idle")
    session.enabled = False
    session.stop_reason = "exhausted"
    return AiAction("stop", reason="exhausted")


class AiRunner:
    """Wires sessions to the store, controller, knowledge base, and notifier."""

    def __init__(self, store, controller, kb, rules, notifier=None):
        self.store = store
        self.controller = controller
        self.kb = kb
        self.rules = rules
        self.notifier = notifier
        self._lock = threading.RLock()
        self.sessions: dict[str, AiSession] = {}
        controller.on_completion(self.handle_completion)

    # -- session management -------------------------------------------------

    def create_session(self, dataset_id: str, *, max_runs: int = 10, update_every: int = 1,
                       epsilon: float = 0.1, seed: int = 0, cv_folds: int = 5,
                       enabled: bool = True) -> AiSession:
        self.store.get_dataset(dataset_id)  # raises UnknownDatasetError
        session = AiSession(
            session_id=uuid.uuid4().hex,
            dataset_id=dataset_id,
            enabled=enabled,
            max_runs=max_runs,
            update_every=update_every,
            epsilon=epsilon,
            seed=seed,
            cv_folds=cv_folds,
        )
        with self._lock:
            self.sessions[session.session_id] = session
        return session

    def get_session(self, session_id: str) -> AiSession | None:
        return self.sessions.get(session_id)

    def toggle(self, session_id: str, enabled: bool) -> AiSession:
        with self._lock:
            session = self.sessions[session_id]
            session.enabled = enabled
            if enabled:
                session.stop_reason = None
            return session

    # -- knowledge-base fold-in ----------------------------------------------

    def handle_completion(self, record) -> None:
        """Controller callback for every terminal experiment."""
        if record.status == "completed":
            dataset = self.store.get_dataset(record.dataset_id)
            metric = PRIMARY_METRIC[record.task_type]
            value = record.metric_value(metric)
            if value is not None:
                self.kb.upsert_live(KBEntry(
                    dataset_name=dataset.name,
                    meta_features=dataset.meta_features,
                    algorithm=record.algorithm,
                    parameters=record.parameters,
                    metric_name=metric,
                    metric_value=float(value),
                    source="live",
                ))
        with self._lock:
            for session in self.sessions.values():
                if (session.dataset_id == record.dataset_id
                        and record.launched_by == "ai"
                        and record.status == "completed"):
                    session.completions_since_notify += 1

    # -- stepping -------------------------------------------------------------

    def step(self, session_id: str) -> AiAction:
        """Run one ai_step and execute its action."""
        with self._lock:
            session = self.sessions[session_id]
            dataset = self.store.get_dataset(session.dataset_id)
            records = self.store.query_experiments(dataset_id=session.dataset_id)
            tried = {_key(r.algorithm, r.parameters) for r in records}
            inflight = sum(1 for r in records if r.status in ("pending", "running"))
            action = ai_step(session, meta=dataset.meta_features, kb=self.kb,
                             rules=self.rules, tried=tried,
                             task=dataset.task_type, inflight=inflight)
            if action.kind == "launch":
                outcome = self.controller.submit(
                    session.dataset_id, action.config,
                    seed=session.seed, cv_folds=session.cv_folds, launched_by="ai")
                if not outcome.duplicate:
                    session.runs_launched += 1
        if action.kind == "notify":
            self._send("ai_update", session)
        elif action.kind == "stop":
            self._send("ai_stopped", session, reason=action.reason)
        return action

    def tick_all(self) -> list[AiAction]:
        with self._lock:
            ids = [s for s, sess in self.sessions.items() if sess.enabled]
        return [self.step(sid) for sid in ids]

    # -- notifications ----------------------------------------------------------

    def _summary(self, session: AiSession) -> dict:
        dataset = self.store.get_dataset(session.dataset_id)
        metric = PRIMARY_METRIC[dataset.task_type]
        completed = self.store.query_experiments(dataset_id=session.dataset_id,
                                                 status="completed")
        summary = {"dataset": dataset.name, "metric": metric,
                   "runs_launched": session.runs_launched,
                   "best": None, "algorithm_ranking": []}
        scored = [(r.metric_value(metric), r) for r in completed
                  if r.metric_value(metric) is not None]
        if scored:
            value, best = max(scored, key=lambda t: (t[0], t[1].id))
            summary["best"] = {
                "experiment_id": best.id,
                "algorithm": best.algorithm,
                "parameters": best.parameters,
                "metric_value": value,
            }
            report = compare_algorithms([r for _, r in scored], metric)
            summary["algorithm_ranking"] = report.algorithms
        return summary

    def _send(self, kind: str, session: AiSession, reason: str | None = None) -> None:
        if self.notifier is None:
            return
        event = {
            "kind": kind,
            "session_id": session.session_id,
            "dataset_id": session.dataset_id,
            "summary": self._summary(session),
            "timestamp": self.store.now(),
        }
        if reason:
            event["reason"] = reason
        self.notifier.send(event)
