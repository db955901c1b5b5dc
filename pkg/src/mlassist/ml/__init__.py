"""Curated machine learning engine.

Six classifiers and six regressors with small, restricted hyperparameter
menus, implemented natively on numpy with an sklearn-style fit/predict API.
"""

from mlassist.ml.algorithms import (
    ALGORITHM_ORDER,
    AlgorithmSpec,
    ParamConfig,
    ParamSpec,
    default_grid,
    describe_param,
    get_algorithm,
    list_algorithms,
    make_estimator,
)
from mlassist.ml.evaluate import CvSpec, EvaluationResult, train_evaluate
from mlassist.ml.metrics import Metrics, RocCurve, compute_metrics, compute_roc

__all__ = [
    "ALGORITHM_ORDER",
    "AlgorithmSpec",
    "CvSpec",
    "EvaluationResult",
    "Metrics",
    "ParamConfig",
    "ParamSpec",
    "RocCurve",
    "compute_metrics",
    "compute_roc",
    "default_grid",
    "describe_param",
    "get_algorithm",
    "list_algorithms",
    "make_estimator",
    "train_evaluate",
]
