"""Cross-validated training and evaluation.

One 64-bit seed drives an experiment; the fold shuffle, each fold's
estimator, and the final full-data fit all use independent derived streams,
so results do not depend on execution order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from mlassist.errors import (
    InvalidConfigError,
    TaskMismatchError,
    TooFewSamplesError,
    UnknownAlgorithmError,
)
from mlassist.ml.algorithms import ParamConfig, get_algorithm, make_estimator
from mlassist.ml.base import derive_rng, seed_sequence
from mlassist.ml.metrics import Metrics, RocCurve, compute_metrics, compute_roc

_STREAM_SPLIT = 0
_STREAM_FOLD = 1
_STREAM_FINAL = 2


@dataclass(frozen=True)
class CvSpec:
    folds: int = 5
    seed: int = 0


@dataclass
class EvaluationResult:
    metrics: Metrics
    per_fold: list[Metrics]
    roc: RocCurve | None
    seed: int
    cv_folds: int
    wall_time: float
    warning: str | None = None

    def to_dict(self, include_wall_time: bool = True) -> dict:
        out = {
            "metrics": self.metrics.to_dict(),
            "per_fold": [m.to_dict() for m in self.per_fold],
            "roc": self.roc.to_dict() if self.roc is not None else None,
            "seed": self.seed,
            "cv_folds": self.cv_folds,
            "warning": self.warning,
        }
        if include_wall_time:
            out["wall_time"] = self.wall_time
        return out

    @staticmethod
    def from_dict(d: dict, task: str) -> "EvaluationResult":
        return EvaluationResult(
            metrics=Metrics.from_dict(task, d["metrics"]),
            per_fold=[Metrics.from_dict(task, m) for m in d["per_fold"]],
            roc=RocCurve.from_dict(d["roc"]) if d.get("roc") else None,
            seed=d["seed"],
            cv_folds=d["cv_folds"],
            wall_time=d.get("wall_time", 0.0),
            warning=d.get("warning"),
        )


def kfold_indices(y: np.ndarray, task: str, folds: int, seed: int) -> list[np.ndarray]:
    """Validation index arrays, stratified per class for classification."""
    n = y.shape[0]
    if folds < 2:
        raise InvalidConfigError(f"folds must be >= 2, got {folds}")
    if n < folds:
        raise TooFewSamplesError(f"{n} samples cannot fill {folds} folds")
    rng = derive_rng(seed, _STREAM_SPLIT)
    assignment = np.empty(n, dtype=int)
    if task == "classification":
        classes, counts = np.unique(y, return_counts=True)
        if counts.min() < folds:
            bad = classes[np.argmin(counts)]
            raise TooFewSamplesError(
                f"class {bad!r} has {counts.min()} members; every class needs >= {folds}"
            )
        for cls in classes:
            idx = np.nonzero(y == cls)[0]
            idx = idx[rng.permutation(idx.size)]
            assignment[idx] = np.arange(idx.size) % folds
    else:
        order = rng.permutation(n)
        for f, chunk in enumerate(np.array_split(order, folds)):
            assignment[chunk] = f
    return [np.nonzero(assignment == f)[0] for f in range(folds)]


def decision_scores(estimator, X: np.ndarray) -> np.ndarray:
    """Per-class score matrix (n, K): probabilities when available, margins
    otherwise (binary margins expand to [-m, m])."""
    if hasattr(estimator, "predict_proba"):
        return estimator.predict_proba(X)
    margins = estimator.decision_function(X)
    if margins.ndim == 1:
        return np.column_stack([-margins, margins])
    return margins


def _check_task(config: ParamConfig, task: str) -> None:
    try:
        get_algorithm(config.algorithm, task)
    except UnknownAlgorithmError:
        other = "regression" if task == "classification" else "classification"
        try:
            get_algorithm(config.algorithm, other)
        except UnknownAlgorithmError:
            raise
        raise TaskMismatchError(
            f"{config.algorithm} is a {other} algorithm but the dataset task is {task}"
        ) from None


def train_evaluate(X, y, task: str, config: ParamConfig, cv: CvSpec):
    """Run k-fold CV then fit on all rows.

    Returns (EvaluationResult, fitted_estimator).  Classification fold
    metrics include AUC from that fold's validation scores; the result ROC
    is built from the pooled out-of-fold scores.  Non-convergence is not an
    error: it sets the result's warning flag.
    """
    start = time.perf_counter()
    _check_task(config, task)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    folds = kfold_indices(y, task, cv.folds, cv.seed)
    classes = np.unique(y) if task == "classification" else None

    per_fold: list[Metrics] = []
    warnings: list[str] = []
    oof_scores = np.zeros((y.shape[0], classes.size)) if task == "classification" else None
    for f, valid_idx in enumerate(folds):
        train_mask = np.ones(y.shape[0], dtype=bool)
        train_mask[valid_idx] = False
        est = make_estimator(config, task, random_state=seed_sequence(cv.seed, _STREAM_FOLD, f))
        est.fit(X[train_mask], y[train_mask])
        if getattr(est, "converged_", True) is False:
            warnings.append(f"fold {f}: hit iteration cap before tolerance")
        pred = est.predict(X[valid_idx])
        if task == "classification":
            scores = _align_scores(est, X[valid_idx], classes)
            oof_scores[valid_idx] = scores
            per_fold.append(compute_metrics(pred, y[valid_idx], task, scores=scores))
        else:
            per_fold.append(compute_metrics(pred, y[valid_idx], task))

    roc = None
    if task == "classification":
        if classes.size == 2:
            roc = compute_roc(oof_scores[:, 1], (y == classes[1]).astype(int))
        else:
            # micro-averaged one-vs-rest sweep over the pooled (score, is-class) pairs
            flat_scores = oof_scores.ravel()
            flat_labels = (y[:, None] == classes[None, :]).astype(int).ravel()
            roc = compute_roc(flat_scores, flat_labels)

    final = make_estimator(config, task, random_state=seed_sequence(cv.seed, _STREAM_FINAL))
    final.fit(X, y)
    if getattr(final, "converged_", True) is False:
        warnings.append("final fit: hit iteration cap before tolerance")

    result = EvaluationResult(
        metrics=Metrics.mean(per_fold),
        per_fold=per_fold,
        roc=roc,
        seed=cv.seed,
        cv_folds=cv.folds,
        wall_time=time.perf_counter() - start,
        warning="; ".join(warnings) if warnings else None,
    )
    return result, final


def _align_scores(est, X: np.ndarray, classes: np.ndarray) -> np.ndarray:
    """Score matrix over the full class list even if a fold misses classes."""
    raw = decision_scores(est, X)
    est_classes = getattr(est, "classes_", None)
    if est_classes is None or np.array_equal(est_classes, classes):
        if raw.shape[1] == classes.size:
            return raw
    out = np.full((X.shape[0], classes.size), -np.inf)
    lookup = {c: i for i, c in enumerate(classes)}
    for j, cls in enumerate(est_classes):
        out[:, lookup[cls]] = raw[:, j]
    return out
