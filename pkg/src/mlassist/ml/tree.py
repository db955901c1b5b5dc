"""CART decision trees.

Split quality is Gini impurity (classification) or within-node squared error
(regression); candidate thresholds are midpoints between distinct sorted
values.  Tie-breaking is fixed: equal gains resolve to the lowest feature
index, then the lowest threshold, so a tree is a pure function of
(data, params, seed).
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

_LEAF = -1


def resolve_max_features(max_features, n_features: int) -> int:
    if max_features is None:
        return n_features
    if max_features == "sqrt":
        return max(1, int(np.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(np.log2(n_features))) if n_features > 1 else 1
    m = int(max_features)
    if m < 1:
        raise ValueError(f"max_features must be >= 1, got {max_features!r}")
    return min(m, n_features)


def _best_split_classification(Xf: np.ndarray, y_onehot: np.ndarray):
    """Best (column, threshold, score) among the candidate feature columns.

    Score is -(sum_sq_left/n_left + sum_sq_right/n_right); minimizing it
    minimizes the weighted Gini of the children.  Returns None if no valid
    boundary exists.
    """
    n = Xf.shape[0]
    order = np.argsort(Xf, axis=0, kind="stable")
    xs = np.take_along_axis(Xf, order, axis=0)
    valid = xs[:-1] < xs[1:]  # (n-1, F)
    if not valid.any():
        return None
    cum = np.cumsum(y_onehot[order], axis=0)  # (n, F, K)
    left = cum[:-1]
    total = cum[-1]  # (F, K)
    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    score = -(
        np.sum(left * left, axis=2) / n_left
        + np.sum((total[None, :, :] - left) ** 2, axis=2) / n_right
    )
    score = np.where(valid, score, np.inf)
    flat = np.argmin(score.ravel(order="F"))
    col, boundary = divmod(flat, n - 1)
    threshold = (xs[boundary, col] + xs[boundary + 1, col]) / 2.0
    return int(col), float(threshold), float(score[boundary, col])


def _best_split_regression(Xf: np.ndarray, y: np.ndarray):
    """Best (column, threshold, score); score = -(sum_l^2/n_l + sum_r^2/n_r)."""
    n = Xf.shape[0]
    order = np.argsort(Xf, axis=0, kind="stable")
    xs = np.take_along_axis(Xf, order, axis=0)
    valid = xs[:-1] < xs[1:]
    if not valid.any():
        return None
    ys = y[order]  # (n, F)
    cum = np.cumsum(ys, axis=0)
    sum_left = cum[:-1]
    sum_total = cum[-1]
    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    score = -(sum_left**2 / n_left + (sum_total[None, :] - sum_left) ** 2 / n_right)
    score = np.where(valid, score, np.inf)
    flat = np.argmin(score.ravel(order="F"))
    col, boundary = divmod(flat, n - 1)
    threshold = (xs[boundary, col] + xs[boundary + 1, col]) / 2.0
    return int(col), float(threshold), float(score[boundary, col])


class _Tree:
    """Flat-array tree built depth-first; left child before right so the
    node RNG stream is consumed in a fixed order."""

    def __init__(self, classification: bool, n_classes: int, max_depth, min_samples_split: int,
                 max_features, rng: np.random.Generator):
        self.classification = classification
        self.n_classes = n_classes
        self.max_depth = max_depth
        self.min_samples_split = max(2, int(min_samples_split))
        self.max_features = max_features
        self.rng = rng
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[np.ndarray] = []

    def build(self, X: np.ndarray, y: np.ndarray) -> None:
        n_features = X.shape[1]
        m = resolve_max_features(self.max_features, n_features)
        if self.classification:
            y_onehot = np.zeros((y.size, self.n_classes))
            y_onehot[np.arange(y.size), y] = 1.0
        # stack of (row_index_array, depth, parent_node_id, is_left); root parent -1
        stack = [(np.arange(X.shape[0]), 0, -1, False)]
        while stack:
            rows, depth, parent, is_left = stack.pop()
            node_id = self._new_node(y, rows)
            if parent >= 0:
                (self.left if is_left else self.right)[parent] = node_id
            if not self._splittable(y, rows, depth):
                continue
            if m < n_features:
                feats = np.sort(self.rng.choice(n_features, size=m, replace=False))
            else:
                feats = np.arange(n_features)
            Xf = X[np.ix_(rows, feats)]
            if self.classification:
                found = _best_split_classification(Xf, y_onehot[rows])
                parent_score = -float(np.sum(np.sum(y_onehot[rows], axis=0) ** 2)) / rows.size
            else:
                found = _best_split_regression(Xf, y[rows])
                parent_score = -(float(np.sum(y[rows])) ** 2) / rows.size
            if found is None:
                continue
            col, threshold, score = found
            if not score < parent_score:  # no strict impurity decrease
                continue
            feat = int(feats[col])
            go_left = X[rows, feat] <= threshold
            self.feature[node_id] = feat
            self.threshold[node_id] = threshold
            # push right first so left is processed (and numbered) first
            stack.append((rows[~go_left], depth + 1, node_id, False))
            stack.append((rows[go_left], depth + 1, node_id, True))
        self._finalize()

    def _new_node(self, y: np.ndarray, rows: np.ndarray) -> int:
        node_id = len(self.feature)
        self.feature.append(_LEAF)
        self.threshold.append(0.0)
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        if self.classification:
            self.value.append(np.bincount(y[rows], minlength=self.n_classes).astype(float))
        else:
            self.value.append(np.array([float(np.mean(y[rows]))]))
        return node_id

    def _splittable(self, y: np.ndarray, rows: np.ndarray, depth: int) -> bool:
        if rows.size < self.min_samples_split:
            return False
        if self.max_depth is not None and depth >= self.max_depth:
            return False
        yr = y[rows]
        return bool(np.any(yr != yr[0]))  # pure / constant nodes stop

    def _finalize(self) -> None:
        self.feature = np.asarray(self.feature, dtype=int)
        self.threshold = np.asarray(self.threshold, dtype=float)
        self.left = np.asarray(self.left, dtype=int)
        self.right = np.asarray(self.right, dtype=int)
        self.value = np.stack(self.value)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node id for every row (iterative vectorized descent)."""
        node = np.zeros(X.shape[0], dtype=int)
        while True:
            feat = self.feature[node]
            active = feat != _LEAF
            if not active.any():
                return node
            rows = np.nonzero(active)[0]
            f = feat[rows]
            go_left = X[rows, f] <= self.threshold[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])

    def leaf_values(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


class DecisionTreeClassifier(ClassifierMixin, BaseEstimator):
    def __init__(self, max_depth=None, min_samples_split=2, max_features=None, random_state=None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=True)
        codes = self._encode_labels(y)
        self.tree_ = _Tree(True, self.classes_.size, self.max_depth, self.min_samples_split,
                           self.max_features, derive_rng(self.random_state))
        self.tree_.build(X, codes)
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "tree_")
        X = check_array(X)
        counts = self.tree_.leaf_values(X)
        return counts / counts.sum(axis=1, keepdims=True)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


class DecisionTreeRegressor(RegressorMixin, BaseEstimator):
    def __init__(self, max_depth=None, min_samples_split=2, max_features=None, random_state=None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=False)
        self.tree_ = _Tree(False, 0, self.max_depth, self.min_samples_split,
                           self.max_features, derive_rng(self.random_state))
        self.tree_.build(X, y)
        return self

    def predict(self, X):
        check_is_fitted(self, "tree_")
        X = check_array(X)
        return self.tree_.leaf_values(X)[:, 0]
