"""Shared fixtures: synthetic data generators and a seeded store factory."""

from __future__ import annotations

import numpy as np
import pytest


def gaussian_blobs(n_per_class=250, n_features=2, separation=4.0, seed=42, n_classes=2):
    """Gaussian clusters with unit variance, class centers `separation` apart
    along the first axis; Bayes error for separation=4 is ~0.023."""
    rng = np.random.default_rng(seed)
    blocks, labels = [], []
    for c in range(n_classes):
        center = np.zeros(n_features)
        center[0] = c * separation
        blocks.append(rng.normal(center, 1.0, (n_per_class, n_features)))
        labels.append(np.full(n_per_class, c))
    X = np.vstack(blocks)
    y = np.concatenate(labels)
    order = rng.permutation(y.size)
    return X[order], y[order]


def linear_target(n=600, n_features=2, noise_ratio=0.1, seed=7):
    """y = X @ w with Gaussian noise at noise_ratio of the signal std."""
    rng = np.random.default_rng(seed)
    X = rng.normal(0.0, 1.0, (n, n_features))
    w = rng.uniform(-3.0, 3.0, n_features)
    signal = X @ w
    y = signal + rng.normal(0.0, noise_ratio * signal.std(), n)
    return X, y


@pytest.fixture
def blobs():
    return gaussian_blobs()


@pytest.fixture
def linear_data():
    return linear_target()
