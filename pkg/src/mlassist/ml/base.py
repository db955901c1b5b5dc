"""Estimator base API and input validation helpers.

Estimators follow the familiar fit/predict protocol with get_params and
set_params introspected from __init__ keyword arguments, so they compose
with grid expansion and with pipeline-style tooling.
"""

from __future__ import annotations

import inspect

import numpy as np

from mlassist.errors import NumericalFailureError

_SEED_MASK = (1 << 64) - 1


def seed_sequence(seed: int, *path: int) -> np.random.SeedSequence:
    """Derive an independent child stream from a 64-bit seed.

    The spawn-key path acts as a counter split: streams for (seed, fold i)
    or (seed, tree j) are independent of evaluation order, so concurrent
    schedules reproduce sequential results.
    """
    return np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=tuple(int(p) for p in path))


def derive_rng(seed, *path: int) -> np.random.Generator:
    """Generator for a derived stream; accepts an int seed or a SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        if path:
            seed = np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(path))
        return np.random.Generator(np.random.PCG64(seed))
    if seed is None:
        seed = 0
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *path)))


def check_array(X, *, name: str = "X") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError(f"{name} has no rows")
    if not np.all(np.isfinite(X)):
        raise NumericalFailureError(f"{name} contains NaN or infinity")
    return X


def check_X_y(X, y, *, classification: bool) -> tuple[np.ndarray, np.ndarray]:
    X = check_array(X)
    y = np.asarray(y)
    if y.ndim != 1:
        y = y.ravel()
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if classification:
        # labels may be strings or ints; estimators re-encode via _encode_labels
        if y.dtype.kind == "f" and not np.all(np.isfinite(y)):
            raise NumericalFailureError("y contains NaN or infinity")
    else:
        y = y.astype(float, copy=False)
        if not np.all(np.isfinite(y)):
            raise NumericalFailureError("y contains NaN or infinity")
    return X, y


def check_is_fitted(estimator, attr: str) -> None:
    if not hasattr(estimator, attr):
        raise ValueError(f"{type(estimator).__name__} is not fitted yet")


class BaseEstimator:
    """get_params/set_params over __init__ keyword arguments, sklearn-style."""

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [p.name for p in sig.parameters.values() if p.name != "self"]

    def get_params(self) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseEstimator":
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"invalid parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


class ClassifierMixin:
    task = "classification"

    def _encode_labels(self, y: np.ndarray) -> np.ndarray:
        """Store sorted class labels and return integer codes."""
        self.classes_ = np.unique(y)
        lookup = {c: i for i, c in enumerate(self.classes_)}
        return np.array([lookup[v] for v in y], dtype=int)


class RegressorMixin:
    task = "regression"


class StandardScaler:
    """Column-wise z-scoring; zero-variance columns keep scale 1."""

    def fit(self, X: np.ndarray) -> "StandardScaler":
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean_) / self.scale_

    def fit_transform(self, X: np.ndarray) -> np.ndarray:
        return self.fit(X).transform(X)
