"""Linear models: logistic regression, elastic net, and linear SVMs.

Logistic regression minimizes the mean log-loss plus an L2 penalty with
full-batch gradient descent and Armijo backtracking (cap 1000 iterations,
gradient tolerance 1e-6).  Hitting the cap is not an error: the model is
returned with ``converged_ = False``.

The elastic net uses cyclic coordinate descent on standardized inputs.

The SVMs are linear-kernel only: hinge loss (classification) and
epsilon-insensitive loss (regression), trained by averaged stochastic
subgradient over 50 epochs.  Multiclass is one-vs-rest for both logistic
regression and the SVM.
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
    derive_rng,
)

MAX_ITER = 1000
GRAD_TOL = 1e-6
SVM_EPOCHS = 50


def logistic_loss_grad(theta: np.ndarray, X: np.ndarray, y_pm: np.ndarray, l2: float):
    """Loss and gradient of L2-penalized mean log-loss.

    theta stacks [w, b]; y_pm has entries in {-1, +1}; the penalty is
    l2/2 * ||w||^2 with the bias unpenalized.  Kept as a module-level pure
    function so the analytic gradient can be checked against finite
    differences directly.
    """
    w, b = theta[:-1], theta[-1]
    n = X.shape[0]
    margins = y_pm * (X @ w + b)
    loss = float(np.mean(np.logaddexp(0.0, -margins)) + 0.5 * l2 * np.dot(w, w))
    # d/dm log(1+e^-m) = -sigmoid(-m)
    coef = -y_pm * _sigmoid(-margins) / n
    grad_w = X.T @ coef + l2 * w
    grad_b = float(np.sum(coef))
    return loss, np.concatenate([grad_w, [grad_b]])


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _gradient_descent(X: np.ndarray, y_pm: np.ndarray, l2: float) -> tuple[np.ndarray, bool]:
    """Backtracking full-batch descent; returns (theta, converged)."""
    theta = np.zeros(X.shape[1] + 1)
    loss, grad = logistic_loss_grad(theta, X, y_pm, l2)
    step = 1.0
    for _ in range(MAX_ITER):
        if np.max(np.abs(grad)) <= GRAD_TOL:
            return theta, True
        gnorm2 = float(np.dot(grad, grad))
        step = min(step * 2.0, 1e6)
        while True:
            candidate = theta - step * grad
            new_loss, new_grad = logistic_loss_grad(candidate, X, y_pm, l2)
            if new_loss <= loss - 0.5 * step * gnorm2 or step < 1e-16:
                break
            step *= 0.5
        theta, loss, grad = candidate, new_loss, new_grad
    return theta, bool(np.max(np.abs(grad)) <= GRAD_TOL)


class LogisticRegressionClassifier(ClassifierMixin, BaseEstimator):
    """L2-regularized logistic regression; C is the inverse penalty strength."""

    def __init__(self, C=1.0):
        self.C = C

    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=True)
        codes = self._encode_labels(y)
        self.scaler_ = StandardScaler().fit(X)
        Xs = self.scaler_.transform(X)
        l2 = 1.0 / (self.C * X.shape[0])
        n_classes = self.classes_.size
        thetas = []
        self.converged_ = True
        if n_classes == 2:
            targets = [2 * codes - 1]  # positive class = classes_[1]
        else:
            targets = [np.where(codes == k, 1, -1) for k in range(n_classes)]
        for y_pm in targets:
            theta, ok = _gradient_descent(Xs, y_pm.astype(float), l2)
            self.converged_ = self.converged_ and ok
            thetas.append(theta)
        stacked = np.stack(thetas)
        self.coef_ = stacked[:, :-1]
        self.intercept_ = stacked[:, -1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = self.scaler_.transform(check_array(X))
        margins = X @ self.coef_.T + self.intercept_
        return margins[:, 0] if self.classes_.size == 2 else margins

    def predict_proba(self, X):
        margins = self.decision_function(X)
        if self.classes_.size == 2:
            p = _sigmoid(margins)
            return np.column_stack([1 - p, p])
        p = _sigmoid(margins)
        return p / p.sum(axis=1, keepdims=True)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


class ElasticNetRegressor(RegressorMixin, BaseEstimator):
    """Elastic net by cyclic coordinate descent on standardized features."""

    def __init__(self, alpha=0.01, l1_ratio=0.5):
        self.alpha = alpha
        self.l1_ratio = l1_ratio

    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=False)
        self.scaler_ = StandardScaler().fit(X)
        Xs = self.scaler_.transform(X)
        self.y_mean_ = float(np.mean(y))
        yc = y - self.y_mean_
        n, d = Xs.shape
        l1 = self.alpha * self.l1_ratio
        l2 = self.alpha * (1.0 - self.l1_ratio)
        col_sq = (Xs * Xs).sum(axis=0) / n  # 1 for live columns, 0 for constant ones
        w = np.zeros(d)
        residual = yc.copy()
        for _ in range(MAX_ITER):
            max_delta = 0.0
            for j in range(d):
                if col_sq[j] == 0.0:
                    continue
                rho = float(Xs[:, j] @ residual) / n + col_sq[j] * w[j]
                new_w = np.sign(rho) * max(abs(rho) - l1, 0.0) / (col_sq[j] + l2)
                delta = new_w - w[j]
                if delta != 0.0:
                    residual -= delta * Xs[:, j]
                    max_delta = max(max_delta, abs(delta))
                    w[j] = new_w
            if max_delta <= 1e-7:
                break
        self.coef_ = w
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        Xs = self.scaler_.transform(check_array(X))
        return Xs @ self.coef_ + self.y_mean_


def _averaged_subgradient(Xs, targets, l2, epochs, batch_size, rng, update):
    """Shared ASGD driver: shuffled mini-batches, running average of iterates.

    `update(w, b, Xb, tb, eta)` returns the (w, b) after one subgradient step
    on batch Xb with per-batch learning rate eta.
    """
    n, d = Xs.shape
    w = np.zeros(d)
    b = 0.0
    w_avg = np.zeros(d)
    b_avg = 0.0
    t = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            t += 1
            eta = 1.0 / (l2 * t + 1.0)  # starts near 1, decays like 1/(l2 t)
            w, b = update(w, b, Xs[batch], targets[batch], eta)
            w_avg += (w - w_avg) / t
            b_avg += (b - b_avg) / t
    return w_avg, b_avg


class LinearSVMClassifier(ClassifierMixin, BaseEstimator):
    """Linear SVM with hinge loss, averaged stochastic subgradient training."""

    def __init__(self, C=1.0, batch_size=32, random_state=None):
        self.C = C
        self.batch_size = batch_size
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=True)
        codes = self._encode_labels(y)
        self.scaler_ = StandardScaler().fit(X)
        Xs = self.scaler_.transform(X)
        n = X.shape[0]
        l2 = 1.0 / (self.C * n)
        batch = max(1, min(int(self.batch_size), n))

        def hinge_step(w, b, Xb, tb, eta):
            margins = tb * (Xb @ w + b)
            active = margins < 1.0
            w = (1.0 - eta * l2) * w
            if active.any():
                coef = tb[active] / Xb.shape[0]
                w = w + eta * (Xb[active].T @ coef)
                b = b + eta * float(np.sum(coef))
            return w, b

        n_classes = self.classes_.size
        if n_classes == 2:
            targets = [(2 * codes - 1).astype(float)]
        else:
            targets = [np.where(codes == k, 1.0, -1.0) for k in range(n_classes)]
        ws, bs = [], []
        for k, y_pm in enumerate(targets):
            rng = derive_rng(self.random_state, k)
            w, b = _averaged_subgradient(Xs, y_pm, l2, SVM_EPOCHS, batch, rng, hinge_step)
            ws.append(w)
            bs.append(b)
        self.coef_ = np.stack(ws)
        self.intercept_ = np.asarray(bs)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        Xs = self.scaler_.transform(check_array(X))
        margins = Xs @ self.coef_.T + self.intercept_
        return margins[:, 0] if self.classes_.size == 2 else margins

    def predict(self, X):
        margins = self.decision_function(X)
        if self.classes_.size == 2:
            return self.classes_[(margins > 0).astype(int)]
        return self.classes_[np.argmax(margins, axis=1)]


class LinearSVMRegressor(RegressorMixin, BaseEstimator):
    """Linear epsilon-insensitive regression; targets standardized internally,
    so epsilon is expressed in target standard deviations."""

    def __init__(self, C=1.0, epsilon=0.1, batch_size=32, random_state=None):
        self.C = C
        self.epsilon = epsilon
        self.batch_size = batch_size
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, classification=False)
        self.scaler_ = StandardScaler().fit(X)
        Xs = self.scaler_.transform(X)
        self.y_mean_ = float(np.mean(y))
        y_std = float(np.std(y))
        self.y_scale_ = y_std if y_std > 0 else 1.0
        ys = (y - self.y_mean_) / self.y_scale_
        n = X.shape[0]
        l2 = 1.0 / (self.C * n)
        batch = max(1, min(int(self.batch_size), n))
        eps = self.epsilon

        def eps_step(w, b, Xb, tb, eta):
            residual = tb - (Xb @ w + b)
            active = np.abs(residual) > eps
            w = (1.0 - eta * l2) * w
            if active.any():
                coef = np.sign(residual[active]) / Xb.shape[0]
                w = w + eta * (Xb[active].T @ coef)
                b = b + eta * float(np.sum(coef))
            return w, b

        rng = derive_rng(self.random_state, 0)
        w, b = _averaged_subgradient(Xs, ys, l2, SVM_EPOCHS, batch, rng, eps_step)
        self.coef_ = w
        self.intercept_ = float(b)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        Xs = self.scaler_.transform(check_array(X))
        return (Xs @ self.coef_ + self.intercept_) * self.y_scale_ + self.y_mean_
