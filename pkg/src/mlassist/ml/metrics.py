"""Evaluation metrics and ROC extraction.

The ROC AUC is computed from integer cumulative counts so that it equals the
pairwise concordance probability (ties counted 1/2) bit-for-bit, not just up
to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mlassist.errors import LengthMismatchError, SingleClassError

CLASSIFICATION_METRICS = ("accuracy", "balanced_accuracy", "f1_macro", "auc")
REGRESSION_METRICS = ("r2", "mse")
ALL_METRICS = CLASSIFICATION_METRICS + REGRESSION_METRICS

# metrics where larger is better; mse is the lone minimized one
HIGHER_IS_BETTER = {name: name != "mse" for name in ALL_METRICS}


def metrics_for_task(task: str) -> tuple[str, ...]:
    return CLASSIFICATION_METRICS if task == "classification" else REGRESSION_METRICS


@dataclass(frozen=True)
class Metrics:
    """Per-task metric bundle. Fields not belonging to the task stay None."""

    task: str
    accuracy: float | None = None
    balanced_accuracy: float | None = None
    f1_macro: float | None = None
    auc: float | None = None
    r2: float | None = None
    mse: float | None = None

    def to_dict(self) -> dict[str, float]:
        out = {}
        for name in metrics_for_task(self.task):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    @staticmethod
    def from_dict(task: str, values: dict[str, float]) -> "Metrics":
        return Metrics(task=task, **{k: v for k, v in values.items() if k in ALL_METRICS})

    @staticmethod
    def mean(items: list["Metrics"]) -> "Metrics":
        """Unweighted field-wise mean; a field averages over entries that have it."""
        if not items:
            raise ValueError("cannot average zero Metrics")
        task = items[0].task
        out: dict[str, float] = {}
        for name in metrics_for_task(task):
            vals = [getattr(m, name) for m in items if getattr(m, name) is not None]
            if vals:
                out[name] = float(np.mean(vals))
        return Metrics.from_dict(task, out)


@dataclass(frozen=True)
class RocCurve:
    """Threshold sweep over distinct scores, one point per distinct score.

    points start at (0, 0) and end at (1, 1); both coordinates are
    nondecreasing.  auc is the trapezoidal area, computed exactly from
    integer true/false positive counts.
    """

    points: list[tuple[float, float]] = field(default_factory=list)
    auc: float = 0.0

    def to_dict(self) -> dict:
        return {"points": [[fpr, tpr] for fpr, tpr in self.points], "auc": self.auc}

    @staticmethod
    def from_dict(d: dict) -> "RocCurve":
        return RocCurve(points=[(float(p[0]), float(p[1])) for p in d["points"]], auc=float(d["auc"]))


def _check_lengths(a, b) -> None:
    if len(a) != len(b) or len(a) == 0:
        raise LengthMismatchError(f"length mismatch: {len(a)} vs {len(b)}")


def accuracy_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    _check_lengths(y_true, y_pred)
    return float(np.mean(np.asarray(y_true) == np.asarray(y_pred)))


def balanced_accuracy_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Mean of per-class recalls, over classes present in y_true."""
    _check_lengths(y_true, y_pred)
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    recalls = []
    for cls in np.unique(y_true):
        mask = y_true == cls
        recalls.append(float(np.mean(y_pred[mask] == cls)))
    return float(np.mean(recalls))


def f1_macro_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Macro F1 over the union of observed labels; empty classes score 0."""
    _check_lengths(y_true, y_pred)
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    labels = np.unique(np.concatenate([y_true, y_pred]))
    f1s = []
    for cls in labels:
        tp = int(np.sum((y_pred == cls) & (y_true == cls)))
        fp = int(np.sum((y_pred == cls) & (y_true != cls)))
        fn = int(np.sum((y_pred != cls) & (y_true == cls)))
        denom = 2 * tp + fp + fn
        f1s.append(2 * tp / denom if denom else 0.0)
    return float(np.mean(f1s))


def r2_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    _check_lengths(y_true, y_pred)
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    ss_tot = float(np.sum((y_true - np.mean(y_true)) ** 2))
    if ss_tot == 0.0:
        # constant truth: perfect prediction scores 1, anything else 0
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


def mse_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    _check_lengths(y_true, y_pred)
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    return float(np.mean((y_true - y_pred) ** 2))


def compute_roc(scores, labels) -> RocCurve:
    """ROC curve from decision scores against binary labels (1 = positive).

    Thresholds sweep the distinct scores in descending order, ties grouped
    into a single point.  The AUC numerator is accumulated in exact integer
    arithmetic: sum over segments of d_fp * (tp_before + tp_after), divided
    once by 2 * P * N, which makes it identical to the concordance count
    (ties counted 1/2) divided by P * N.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(int)
    _check_lengths(scores, labels)
    pos_total = int(np.sum(labels == 1))
    neg_total = int(labels.size - pos_total)
    if pos_total == 0 or neg_total == 0:
        raise SingleClassError("ROC needs at least one positive and one negative label")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    tp_cum = np.cumsum(sorted_labels == 1)
    fp_cum = np.cumsum(sorted_labels == 0)
    # last index of each tie group of equal scores
    boundary = np.nonzero(np.diff(sorted_scores))[0]
    group_ends = np.concatenate([boundary, [scores.size - 1]])

    points = [(0.0, 0.0)]
    auc_num = 0  # exact integer: 2 * area * P * N
    tp_prev = 0
    fp_prev = 0
    for end in group_ends:
        tp = int(tp_cum[end])
        fp = int(fp_cum[end])
        auc_num += (fp - fp_prev) * (tp_prev + tp)
        points.append((fp / neg_total, tp / pos_total))
        tp_prev, fp_prev = tp, fp
    return RocCurve(points=points, auc=auc_num / (2 * pos_total * neg_total))


def auc_score(scores, labels) -> float:
    return compute_roc(scores, labels).auc


def macro_ovr_auc(score_matrix: np.ndarray, y_true_idx: np.ndarray, n_classes: int) -> float:
    """One-vs-rest AUC averaged over classes present in y_true.

    score_matrix is (n_samples, n_classes); column c scores class c.
    """
    aucs = []
    for cls in range(n_classes):
        mask = (y_true_idx == cls).astype(int)
        if 0 < mask.sum() < mask.size:
            aucs.append(auc_score(score_matrix[:, cls], mask))
    if not aucs:
        raise SingleClassError("no class with both positives and negatives")
    return float(np.mean(aucs))


def compute_metrics(predictions, truth, task: str, scores=None) -> Metrics:
    """Metric bundle for one prediction vector.

    For classification, `scores` is optional: a 1-d score vector (binary) or
    an (n, n_classes) matrix; without it the AUC is left unset.
    """
    if task == "classification":
        predictions = np.asarray(predictions)
        truth = np.asarray(truth)
        _check_lengths(predictions, truth)
        auc = None
        if scores is not None:
            scores_arr = np.asarray(scores, dtype=float)
            if scores_arr.ndim == 1:
                auc = auc_score(scores_arr, (truth == np.max(np.unique(truth))).astype(int))
            else:
                classes = np.unique(truth)
                lookup = {c: i for i, c in enumerate(classes)}
                idx = np.array([lookup[v] for v in truth])
                if scores_arr.shape[1] == classes.size:
                    auc = macro_ovr_auc(scores_arr, idx, classes.size)
                else:
                    raise LengthMismatchError(
                        f"score matrix has {scores_arr.shape[1]} columns for {classes.size} classes"
                    )
        return Metrics(
            task="classification",
            accuracy=accuracy_score(truth, predictions),
            balanced_accuracy=balanced_accuracy_score(truth, predictions),
            f1_macro=f1_macro_score(truth, predictions),
            auc=auc,
        )
    if task == "regression":
        return Metrics(
            task="regression",
            r2=r2_score(truth, predictions),
            mse=mse_score(truth, predictions),
        )
    raise ValueError(f"unknown task: {task!r}")
