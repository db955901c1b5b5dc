"""Tree ensembles: bagged random forests and gradient boosting.

Forests draw one independent RNG stream per tree from the root seed, so the
ensemble is reproducible even if trees are trained concurrently.  Boosting
fits depth-3 regression trees to log-loss gradients (classification, with a
Newton leaf step) or residuals (regression), shrunk by the learning rate.
"""

from __future__ import annotations

import numpy as np

from mlassist.ml.base import (
    BaseEstimator,
    ClassifierMixin,
    RegressorMixin,
    check_X_y,
    check_array,
    check_is_fitted,
    derive_rng,
)
from mlassist.ml.linear import _sigmoid
from mlassist.ml.tree import DecisionTreeClassifier, DecisionTreeRegressor, _Tree

BOOST_DEPTH = 3


class _ForestBase(BaseEstimator):
    def __init__(self, n_estimators=100, max_features="sqrt", max_depth=None,
                 min_samples_split=2, bootstrap=True, random_state=None):
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.bootstrap = bootstrap
        self.random_state = random_state

    def _tree_params(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "max_features": self.max_features,
        }

    def _fit_trees(self, X: np.ndarray, y: np.ndarray, tree_cls) -> list:
        n = X.shape[0]
        trees = []
        for i in range(int(self.n_estimators)):
            if self.bootstrap:
                rows = derive_rng(self.random_state, i, 0).integers(0, n, size=n)
            else:
                rows = np.arange(n)
            tree = tree_cls(random_state=derive_rng(self.random_state, i, 1),
                            **self._tree_params())
            tree.fit(X[rows], y[rows])
            trees.append(tree)
        return trees


class RandomForestClassifier(ClassifierMixin, _ForestBase):
    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=True)
        codes = self._encode_labels(y)
        self.trees_ = self._fit_trees(X, codes, DecisionTreeClassifier)
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "trees_")
        X = check_array(X)
        proba = np.zeros((X.shape[0], self.classes_.size))
        for tree in self.trees_:
            tree_proba = tree.predict_proba(X)
            # bootstrap samples can miss classes; align columns by label
            proba[:, tree.classes_] += tree_proba
        return proba / len(self.trees_)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


class RandomForestRegressor(RegressorMixin, _ForestBase):
    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=False)
        self.trees_ = self._fit_trees(X, y, DecisionTreeRegressor)
        return self

    def predict(self, X):
        check_is_fitted(self, "trees_")
        X = check_array(X)
        return np.mean([tree.predict(X) for tree in self.trees_], axis=0)


def _fit_boost_tree(X: np.ndarray, residual: np.ndarray) -> _Tree:
    tree = _Tree(False, 0, BOOST_DEPTH, 2, None, derive_rng(0))
    tree.build(X, residual)
    return tree


class GradientBoostingClassifier(ClassifierMixin, BaseEstimator):
    """Stagewise additive model on the logistic / softmax loss."""

    def __init__(self, n_estimators=100, learning_rate=0.1):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate

    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=True)
        codes = self._encode_labels(y)
        n, K = X.shape[0], self.classes_.size
        lr = float(self.learning_rate)
        self.stages_ = []
        if K == 2:
            y01 = codes.astype(float)
            p0 = np.clip(np.mean(y01), 1e-12, 1 - 1e-12)
            self.base_score_ = float(np.log(p0 / (1 - p0)))
            F = np.full(n, self.base_score_)
            for _ in range(int(self.n_estimators)):
                p = _sigmoid(F)
                tree = _fit_boost_tree(X, y01 - p)
                gamma = self._newton_leaves(tree, X, y01 - p, p * (1 - p), factor=1.0)
                F += lr * gamma[tree.apply(X)]
                self.stages_.append((tree, gamma))
        else:
            onehot = np.zeros((n, K))
            onehot[np.arange(n), codes] = 1.0
            priors = np.clip(onehot.mean(axis=0), 1e-12, None)
            self.base_score_ = np.log(priors)
            F = np.tile(self.base_score_, (n, 1))
            factor = (K - 1.0) / K
            for _ in range(int(self.n_estimators)):
                expF = np.exp(F - F.max(axis=1, keepdims=True))
                P = expF / expF.sum(axis=1, keepdims=True)
                stage = []
                for k in range(K):
                    resid = onehot[:, k] - P[:, k]
                    tree = _fit_boost_tree(X, resid)
                    gamma = self._newton_leaves(tree, X, resid, P[:, k] * (1 - P[:, k]), factor)
                    F[:, k] += lr * gamma[tree.apply(X)]
                    stage.append((tree, gamma))
                self.stages_.append(stage)
        return self

    @staticmethod
    def _newton_leaves(tree: _Tree, X: np.ndarray, resid: np.ndarray,
                       hess: np.ndarray, factor: float) -> np.ndarray:
        """Per-leaf Newton step: factor * sum(residual) / sum(hessian)."""
        leaf = tree.apply(X)
        n_nodes = tree.value.shape[0]
        num = np.bincount(leaf, weights=resid, minlength=n_nodes)
        den = np.bincount(leaf, weights=hess, minlength=n_nodes)
        return factor * num / np.maximum(den, 1e-12)

    def decision_function(self, X):
        check_is_fitted(self, "stages_")
        X = check_array(X)
        lr = float(self.learning_rate)
        if self.classes_.size == 2:
            F = np.full(X.shape[0], self.base_score_)
            for tree, gamma in self.stages_:
                F += lr * gamma[tree.apply(X)]
            return F
        F = np.tile(self.base_score_, (X.shape[0], 1))
        for stage in self.stages_:
            for k, (tree, gamma) in enumerate(stage):
                F[:, k] += lr * gamma[tree.apply(X)]
        return F

    def predict_proba(self, X):
        F = self.decision_function(X)
        if self.classes_.size == 2:
            p = _sigmoid(F)
            return np.column_stack([1 - p, p])
        expF = np.exp(F - F.max(axis=1, keepdims=True))
        return expF / expF.sum(axis=1, keepdims=True)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


class GradientBoostingRegressor(RegressorMixin, BaseEstimator):
    """Stagewise additive model on squared error (residual fitting)."""

    def __init__(self, n_estimators=100, learning_rate=0.1):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate

    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=False)
        self.base_score_ = float(np.mean(y))
        lr = float(self.learning_rate)
        F = np.full(X.shape[0], self.base_score_)
        self.trees_ = []
        for _ in range(int(self.n_estimators)):
            tree = _fit_boost_tree(X, y - F)
            F += lr * tree.leaf_values(X)[:, 0]
            self.trees_.append(tree)
        return self

    def predict(self, X):
        check_is_fitted(self, "trees_")
        X = check_array(X)
        pred = np.full(X.shape[0], self.base_score_)
        lr = float(self.learning_rate)
        for tree in self.trees_:
            pred += lr * tree.leaf_values(X)[:, 0]
        return pred
