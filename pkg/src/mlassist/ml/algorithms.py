"""The curated algorithm menu.

Six classifiers and six regressors, each with a handful of the most
important parameters restricted to small allowed sets.  Every parameter
carries a plain-language description so the UI can explain choices to
users who are not ML practitioners.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from mlassist.errors import InvalidConfigError, UnknownAlgorithmError, UnknownParamError
from mlassist.ml.ensemble import (
    GradientBoostingClassifier,
    GradientBoostingRegressor,
    RandomForestClassifier,
    RandomForestRegressor,
)
from mlassist.ml.linear import (
    ElasticNetRegressor,
    LinearSVMClassifier,
    LinearSVMRegressor,
    LogisticRegressionClassifier,
)
from mlassist.ml.neighbors import KnnClassifier, KnnRegressor
from mlassist.ml.tree import DecisionTreeClassifier, DecisionTreeRegressor

TASKS = ("classification", "regression")


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str  # "int" | "float" | "str" | "int_or_none"
    allowed: tuple
    description: str
    default: object

    def normalize(self, value):
        """Return the matching allowed element, so equal configs get equal
        canonical keys regardless of int/float spelling; raise otherwise."""
        for a in self.allowed:
            if a is None:
                if value is None or (isinstance(value, str) and value.lower() in ("none", "null", "unbounded")):
                    return None
            elif isinstance(a, str):
                if isinstance(value, str) and value == a:
                    return a
            elif isinstance(value, (int, float)) and not isinstance(value, bool):
                if float(value) == float(a):
                    return a
        raise InvalidConfigError(
            f"{self.name}={value!r} not in allowed set {list(self.allowed)}"
        )


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    task: str
    params: tuple[ParamSpec, ...]

    def param(self, name: str) -> ParamSpec:
        for p in self.params:
            if p.name == name:
                return p
        raise UnknownParamError(f"{self.name} has no parameter {name!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "task": self.task,
            "params": [
                {
                    "name": p.name,
                    "type": p.type,
                    "allowed": list(p.allowed),
                    "default": p.default,
                    "description": p.description,
                }
                for p in self.params
            ],
        }


@dataclass(frozen=True)
class ParamConfig:
    algorithm: str
    values: dict = field(default_factory=dict)

    def canonical(self) -> str:
        """Canonical JSON of the parameter values (sorted keys)."""
        return json.dumps(self.values, sort_keys=True, separators=(",", ":"))

    def key(self) -> tuple[str, str]:
        return (self.algorithm, self.canonical())


_DEPTH = ParamSpec(
    "max_depth", "int_or_none", (3, 5, 10, None),
    "How many levels of questions the tree may ask. Deeper trees fit the data "
    "more closely but are more likely to memorize noise; 'no limit' lets the "
    "tree grow until it runs out of useful splits.",
    None,
)
_MIN_SPLIT = ParamSpec(
    "min_samples_split", "int", (2, 5, 20),
    "The smallest group of rows the tree is still allowed to divide. Larger "
    "values give simpler, more cautious trees.",
    2,
)
_K = ParamSpec(
    "k", "int", (1, 3, 5, 11),
    "How many nearby examples get a vote. Small values react to local detail; "
    "larger values give smoother, more stable answers.",
    5,
)
_KNN_WEIGHTS = ParamSpec(
    "weights", "str", ("uniform", "distance"),
    "Whether every neighbor counts equally, or closer neighbors count more.",
    "uniform",
)
_LOGREG_C = ParamSpec(
    "C", "float", (0.01, 0.1, 1.0, 10.0),
    "How much the model is allowed to trust the training data. Lower values "
    "keep the model simpler; higher values fit the data more aggressively.",
    1.0,
)
_SVM_C = ParamSpec(
    "C", "float", (0.01, 0.1, 1.0, 10.0),
    "Trade-off between a wide safety margin and getting every training "
    "example right. Higher values chase the training data harder.",
    1.0,
)
_RF_N = ParamSpec(
    "n_estimators", "int", (10, 100),
    "Number of decision trees in the forest. Adding trees usually improves "
    "the model's predictions, at the cost of longer training time; removing "
    "trees trains faster but gives up some quality.",
    100,
)
_RF_FEATURES = ParamSpec(
    "max_features", "str", ("sqrt", "log2"),
    "How many columns each split gets to look at. Looking at fewer columns "
    "makes the trees more varied, which often helps the forest overall.",
    "sqrt",
)
_GB_N = ParamSpec(
    "n_estimators", "int", (50, 100),
    "Number of boosting rounds. More rounds usually mean better accuracy but "
    "a longer wait for training to finish.",
    100,
)
_GB_LR = ParamSpec(
    "learning_rate", "float", (0.01, 0.1),
    "How big a correction each round makes. Smaller steps are safer but need "
    "more rounds to get there.",
    0.1,
)
_EN_ALPHA = ParamSpec(
    "alpha", "float", (0.001, 0.01, 0.1, 1.0),
    "Overall strength of the penalty that keeps coefficients small. Higher "
    "values simplify the model and can zero out unhelpful columns.",
    0.01,
)
_EN_L1 = ParamSpec(
    "l1_ratio", "float", (0.25, 0.5, 0.75),
    "Balance between dropping columns entirely (toward 1) and merely "
    "shrinking them (toward 0).",
    0.5,
)

# menu order is fixed and user-visible; it also breaks recommendation ties
_SPECS: dict[str, dict[str, AlgorithmSpec]] = {
    "classification": {},
    "regression": {},
}
ALGORITHM_ORDER: dict[str, tuple[str, ...]] = {
    "classification": ("logistic_regression", "decision_tree", "knn", "svm",
                       "random_forest", "gradient_boosting"),
    "regression": ("elastic_net", "decision_tree", "knn", "svm",
                   "random_forest", "gradient_boosting"),
}


def _register(spec: AlgorithmSpec) -> None:
    _SPECS[spec.task][spec.name] = spec


_register(AlgorithmSpec("logistic_regression", "classification", (_LOGREG_C,)))
_register(AlgorithmSpec("decision_tree", "classification", (_DEPTH, _MIN_SPLIT)))
_register(AlgorithmSpec("knn", "classification", (_K, _KNN_WEIGHTS)))
_register(AlgorithmSpec("svm", "classification", (_SVM_C,)))
_register(AlgorithmSpec("random_forest", "classification", (_RF_N, _RF_FEATURES)))
_register(AlgorithmSpec("gradient_boosting", "classification", (_GB_N, _GB_LR)))

_register(AlgorithmSpec("elastic_net", "regression", (_EN_ALPHA, _EN_L1)))
_register(AlgorithmSpec("decision_tree", "regression", (_DEPTH, _MIN_SPLIT)))
_register(AlgorithmSpec("knn", "regression", (_K, _KNN_WEIGHTS)))
_register(AlgorithmSpec("svm", "regression", (_SVM_C,)))
_register(AlgorithmSpec("random_forest", "regression", (_RF_N, _RF_FEATURES)))
_register(AlgorithmSpec("gradient_boosting", "regression", (_GB_N, _GB_LR)))


def list_algorithms(task: str) -> list[AlgorithmSpec]:
    if task not in TASKS:
        raise UnknownAlgorithmError(f"unknown task {task!r}")
    return [_SPECS[task][name] for name in ALGORITHM_ORDER[task]]


def get_algorithm(name: str, task: str) -> AlgorithmSpec:
    if task not in TASKS:
        raise UnknownAlgorithmError(f"unknown task {task!r}")
    spec = _SPECS[task].get(name)
    if spec is None:
        raise UnknownAlgorithmError(f"no {task} algorithm named {name!r}")
    return spec


def describe_param(algorithm: str, param: str, task: str = "classification") -> str:
    return get_algorithm(algorithm, task).param(param).description


def validate_config(config: ParamConfig, task: str) -> ParamConfig:
    """Check names and allowed-set membership; fill defaults for omitted params."""
    spec = get_algorithm(config.algorithm, task)
    values = {}
    for name, value in config.values.items():
        pspec = spec.param(name)  # raises UnknownParamError
        values[name] = pspec.normalize(value)
    for pspec in spec.params:
        values.setdefault(pspec.name, pspec.default)
    return ParamConfig(config.algorithm, values)


def default_grid(spec: AlgorithmSpec) -> list[ParamConfig]:
    """Cartesian product of the allowed values, in menu declaration order."""
    names = [p.name for p in spec.params]
    combos = itertools.product(*(p.allowed for p in spec.params))
    return [ParamConfig(spec.name, dict(zip(names, combo))) for combo in combos]


def full_grid(task: str) -> list[ParamConfig]:
    """All grid configs for a task, algorithms in menu order."""
    out = []
    for spec in list_algorithms(task):
        out.extend(default_grid(spec))
    return out


_BUILDERS = {
    ("logistic_regression", "classification"):
        lambda v, rs: LogisticRegressionClassifier(C=v["C"]),
    ("decision_tree", "classification"):
        lambda v, rs: DecisionTreeClassifier(max_depth=v["max_depth"],
                                             min_samples_split=v["min_samples_split"],
                                             random_state=rs),
    ("knn", "classification"):
        lambda v, rs: KnnClassifier(k=v["k"], weights=v["weights"]),
    ("svm", "classification"):
        lambda v, rs: LinearSVMClassifier(C=v["C"], random_state=rs),
    ("random_forest", "classification"):
        lambda v, rs: RandomForestClassifier(n_estimators=v["n_estimators"],
                                             max_features=v["max_features"],
                                             random_state=rs),
    ("gradient_boosting", "classification"):
        lambda v, rs: GradientBoostingClassifier(n_estimators=v["n_estimators"],
                                                 learning_rate=v["learning_rate"]),
    ("elastic_net", "regression"):
        lambda v, rs: ElasticNetRegressor(alpha=v["alpha"], l1_ratio=v["l1_ratio"]),
    ("decision_tree", "regression"):
        lambda v, rs: DecisionTreeRegressor(max_depth=v["max_depth"],
                                            min_samples_split=v["min_samples_split"],
                                            random_state=rs),
    ("knn", "regression"):
        lambda v, rs: KnnRegressor(k=v["k"], weights=v["weights"]),
    ("svm", "regression"):
        lambda v, rs: LinearSVMRegressor(C=v["C"], random_state=rs),
    ("random_forest", "regression"):
        lambda v, rs: RandomForestRegressor(n_estimators=v["n_estimators"],
                                            max_features=v["max_features"],
                                            random_state=rs),
    ("gradient_boosting", "regression"):
        lambda v, rs: GradientBoostingRegressor(n_estimators=v["n_estimators"],
                                                learning_rate=v["learning_rate"]),
}


def make_estimator(config: ParamConfig, task: str, random_state=None):
    """Build a fit-ready estimator from a validated config."""
    config = validate_config(config, task)
    return _BUILDERS[(config.algorithm, task)](config.values, random_state)
