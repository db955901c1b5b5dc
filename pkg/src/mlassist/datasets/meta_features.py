"""Dataset meta-features: the fixed 10-vector the recommender keys on.

The vector ordering is part of the system contract (knowledge-base files and
distance computations both rely on it) and must never change.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

META_FEATURE_NAMES = (
    "n_instances",
    "n_features",
    "n_classes",
    "imbalance_ratio",
    "frac_categorical",
    "mean_abs_corr",
    "mean_skew",
    "mean_kurtosis",
    "log_instances",
    "log_features",
)


@dataclass(frozen=True)
class MetaFeatures:
    n_instances: float
    n_features: float
    n_classes: float
    imbalance_ratio: float
    frac_categorical: float
    mean_abs_corr: float
    mean_skew: float
    mean_kurtosis: float
    log_instances: float
    log_features: float

    def vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in META_FEATURE_NAMES], dtype=float)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in META_FEATURE_NAMES}

    @staticmethod
    def from_dict(d: dict) -> "MetaFeatures":
        return MetaFeatures(**{name: float(d[name]) for name in META_FEATURE_NAMES})

    @staticmethod
    def from_vector(v) -> "MetaFeatures":
        v = np.asarray(v, dtype=float)
        if v.shape != (len(META_FEATURE_NAMES),):
            raise ValueError(f"meta-feature vector must have length {len(META_FEATURE_NAMES)}")
        return MetaFeatures(**dict(zip(META_FEATURE_NAMES, map(float, v))))


def _moments(col: np.ndarray) -> tuple[float, float]:
    """(skewness g1, excess kurtosis g2); zero for constant columns."""
    centered = col - col.mean()
    m2 = float(np.mean(centered**2))
    if m2 <= 0.0:
        return 0.0, 0.0
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    return m3 / m2**1.5, m4 / m2**2 - 3.0


def compute_meta_features(table) -> MetaFeatures:
    """Characterize a parsed table (see datasets.ingest.DatasetTable).

    Categorical columns are excluded from the correlation/skew/kurtosis
    statistics; degenerate statistics fall back to 0 so the vector is always
    finite.
    """
    feature_cols = [c for c in table.columns if c != table.target_column]
    n = table.n_rows
    n_features = len(feature_cols)
    numeric = [c for c in feature_cols if table.kinds[c] == "numeric"]
    n_categorical = n_features - len(numeric)

    if table.task_type == "classification":
        _, counts = np.unique(table.data[table.target_column], return_counts=True)
        n_classes = counts.size
        imbalance = float(counts.min() / counts.max())
    else:
        n_classes = 0
        imbalance = 1.0

    mean_abs_corr = 0.0
    if len(numeric) >= 2:
        mat = np.column_stack([table.data[c] for c in numeric])
        stds = mat.std(axis=0)
        live = stds > 0
        pair_total = len(numeric) * (len(numeric) - 1) // 2
        if live.sum() >= 2:
            corr = np.corrcoef(mat[:, live], rowvar=False)
            upper = np.abs(corr[np.triu_indices_from(corr, k=1)])
            # pairs touching a constant column contribute 0
            mean_abs_corr = float(upper.sum() / pair_total)

    skews, kurts = [], []
    for c in numeric:
        g1, g2 = _moments(table.data[c])
        skews.append(g1)
        kurts.append(g2)

    return MetaFeatures(
        n_instances=float(n),
        n_features=float(n_features),
        n_classes=float(n_classes),
        imbalance_ratio=imbalance,
        frac_categorical=n_categorical / n_features if n_features else 0.0,
        mean_abs_corr=mean_abs_corr,
        mean_skew=float(np.mean(skews)) if skews else 0.0,
        mean_kurtosis=float(np.mean(kurts)) if kurts else 0.0,
        log_instances=float(np.log10(max(n, 1))),
        log_features=float(np.log10(max(n_features, 1))),
    )
