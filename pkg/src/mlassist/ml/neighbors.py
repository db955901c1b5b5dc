"""k-nearest neighbors on z-scored features with Euclidean distance.

Neighbor ties at equal distance resolve to the lowest training-row index
(stable sort), and prediction ties to the lowest class index, so results
are reproducible.
"""

from __future__ import annotations

import numpy as np

from mlassist.ml.base import (
    BaseEstimator,
    ClassifierMixin,
    RegressorMixin,
    StandardScaler,
    check_X_y,
    check_array,
    check_is_fitted,
)

_CHUNK = 256


class _KnnBase(BaseEstimator):
    def __init__(self, k=5, weights="uniform"):
        self.k = k
        self.weights = weights

    def _fit_data(self, X: np.ndarray) -> None:
        if self.weights not in ("uniform", "distance"):
            raise ValueError(f"weights must be 'uniform' or 'distance', got {self.weights!r}")
        self.scaler_ = StandardScaler().fit(X)
        self.X_ = self.scaler_.transform(X)

    def _neighbors(self, X: np.ndarray):
        """Yield (neighbor index block, distance block) per query chunk."""
        check_is_fitted(self, "X_")
        Xq = self.scaler_.transform(check_array(X))
        k = min(int(self.k), self.X_.shape[0])
        for start in range(0, Xq.shape[0], _CHUNK):
            q = Xq[start:start + _CHUNK]
            d2 = (
                np.sum(q * q, axis=1)[:, None]
                - 2.0 * (q @ self.X_.T)
                + np.sum(self.X_ * self.X_, axis=1)[None, :]
            )
            np.maximum(d2, 0.0, out=d2)
            idx = np.argsort(d2, axis=1, kind="stable")[:, :k]
            dist = np.sqrt(np.take_along_axis(d2, idx, axis=1))
            yield idx, dist

    def _weights_for(self, dist: np.ndarray) -> np.ndarray:
        if self.weights == "uniform":
            return np.ones_like(dist)
        # distance weighting: exact matches dominate; if any neighbor sits at
        # distance 0, only those neighbors vote
        zero = dist == 0.0
        w = np.zeros_like(dist)
        has_zero = zero.any(axis=1)
        with np.errstate(divide="ignore"):
            w[~has_zero] = 1.0 / dist[~has_zero]
        w[has_zero] = zero[has_zero].astype(float)
        return w


class KnnClassifier(ClassifierMixin, _KnnBase):
    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=True)
        self._fit_data(X)
        self.y_ = self._encode_labels(y)
        return self

    def predict_proba(self, X):
        K = self.classes_.size
        blocks = []
        for idx, dist in self._neighbors(X):
            w = self._weights_for(dist)
            votes = np.zeros((idx.shape[0], K))
            labels = self.y_[idx]
            for cls in range(K):
                votes[:, cls] = np.sum(w * (labels == cls), axis=1)
            blocks.append(votes / votes.sum(axis=1, keepdims=True))
        return np.vstack(blocks)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


class KnnRegressor(RegressorMixin, _KnnBase):
    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=False)
        self._fit_data(X)
        self.y_ = y
        return self

    def predict(self, X):
        blocks = []
        for idx, dist in self._neighbors(X):
            w = self._weights_for(dist)
            blocks.append(np.sum(w * self.y_[idx], axis=1) / np.sum(w, axis=1))
        return np.concatenate(blocks)
