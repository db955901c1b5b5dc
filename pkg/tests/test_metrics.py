import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlassist.errors import LengthMismatchError, SingleClassError
from mlassist.ml.metrics import (
    Metrics,
    accuracy_score,
    auc_score,
    balanced_accuracy_score,
    compute_metrics,
    compute_roc,
    f1_macro_score,
    mse_score,
    r2_score,
)


def brute_force_auc(scores, labels):
    """Concordance probability with ties counted 1/2, in exact integer halves."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    num = 0
    for p in pos:
        for n in neg:
            if p > n:
                num += 2
            elif p == n:
                num += 1
    return num / (2 * len(pos) * len(neg))


class TestClassificationMetrics:
    def test_perfect_predictions(self):
        y = [0, 1, 1, 0, 2]
        m = compute_metrics(y, y, "classification")
        assert m.accuracy == 1.0
        assert m.balanced_accuracy == 1.0
        assert m.f1_macro == 1.0

    def test_constant_predictions_on_balanced_binary(self):
        # recalls are 1.0 for class 1 and 0.0 for class 0 -> balanced = 0.5
        truth = [1, 1, 0, 0]
        preds = [1, 1, 1, 1]
        m = compute_metrics(preds, truth, "classification")
        assert m.accuracy == 0.5
        assert m.balanced_accuracy == 0.5

    def test_balanced_accuracy_ignores_class_sizes(self):
        truth = [0] * 90 + [1] * 10
        preds = [0] * 90 + [1] * 5 + [0] * 5
        assert balanced_accuracy_score(truth, preds) == pytest.approx((1.0 + 0.5) / 2)

    def test_f1_macro_hand_case(self):
        # class 0: tp=1 fp=1 fn=1 -> f1=0.5; class 1: tp=1 fp=1 fn=1 -> 0.5
        truth = [0, 0, 1, 1]
        preds = [0, 1, 0, 1]
        assert f1_macro_score(truth, preds) == pytest.approx(0.5)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            accuracy_score([1, 2], [1])

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(3)
        truth = rng.integers(0, 3, 60)
        preds = rng.integers(0, 3, 60)
        remap = {0: 7, 1: 5, 2: 9}
        truth2 = np.array([remap[v] for v in truth])
        preds2 = np.array([remap[v] for v in preds])
        assert balanced_accuracy_score(truth, preds) == pytest.approx(
            balanced_accuracy_score(truth2, preds2))
        assert f1_macro_score(truth, preds) == pytest.approx(f1_macro_score(truth2, preds2))


class TestRegressionMetrics:
    def test_mean_prediction_gives_zero_r2(self):
        truth = np.array([1.0, 2.0, 3.0, 6.0])
        preds = np.full(4, truth.mean())
        assert r2_score(truth, preds) == 0.0

    def test_perfect_r2(self):
        truth = np.array([1.0, 2.0, 3.0])
        assert r2_score(truth, truth) == 1.0

    def test_mse(self):
        assert mse_score([0.0, 0.0], [1.0, 3.0]) == 5.0

    def test_constant_truth(self):
        assert r2_score([2.0, 2.0], [2.0, 2.0]) == 1.0
        assert r2_score([2.0, 2.0], [2.0, 3.0]) == 0.0


class TestRoc:
    def test_perfect_separation(self):
        roc = compute_roc([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0])
        assert roc.auc == 1.0
        assert roc.points[0] == (0.0, 0.0)
        assert roc.points[-1] == (1.0, 1.0)

    def test_all_ties_give_half(self):
        roc = compute_roc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0])
        assert roc.auc == 0.5
        assert roc.points == [(0.0, 0.0), (1.0, 1.0)]

    def test_interleaved_case(self):
        # positives score {0.8, 0.2}, negatives {0.4, 0.6}: 2 of 4 pairs concordant
        roc = compute_roc([0.8, 0.4, 0.6, 0.2], [1, 0, 0, 1])
        assert roc.auc == 0.5

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassError):
            compute_roc([0.1, 0.2], [1, 1])

    def test_one_point_per_distinct_score(self):
        roc = compute_roc([0.9, 0.9, 0.4, 0.4, 0.1], [1, 0, 1, 0, 0])
        # 3 distinct scores -> (0,0) + 3 points
        assert len(roc.points) == 4

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(0, 5), min_size=2, max_size=60),
           st.randoms(use_true_random=False))
    def test_matches_brute_force_exactly(self, quantized, rnd):
        labels = [rnd.randint(0, 1) for _ in quantized]
        if len(set(labels)) < 2:
            labels[0], labels[1] = 0, 1
        scores = [q / 5.0 for q in quantized]  # coarse grid forces ties
        assert compute_roc(scores, labels).auc == brute_force_auc(scores, labels)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_negation_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        scores = rng.choice([0.1, 0.3, 0.5, 0.9], 30)
        labels = rng.integers(0, 2, 30)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        a = auc_score(scores, labels)
        b = auc_score(-scores, 1 - labels)
        assert a == pytest.approx(b, abs=1e-12)

    def test_auc_equals_trapezoid_of_points(self):
        rng = np.random.default_rng(11)
        scores = rng.normal(0, 1, 150)
        labels = (rng.uniform(0, 1, 150) < 0.4).astype(int)
        roc = compute_roc(scores, labels)
        pts = np.asarray(roc.points)
        trap = float(np.sum(np.diff(pts[:, 0]) * (pts[:-1, 1] + pts[1:, 1]) / 2))
        assert roc.auc == pytest.approx(trap, abs=1e-12)

    def test_monotone_points(self):
        rng = np.random.default_rng(5)
        roc = compute_roc(rng.normal(0, 1, 80), rng.integers(0, 2, 80))
        pts = np.asarray(roc.points)
        assert (np.diff(pts[:, 0]) >= 0).all()
        assert (np.diff(pts[:, 1]) >= 0).all()


class TestMetricsBundle:
    def test_mean_is_unweighted(self):
        a = Metrics(task="regression", r2=0.5, mse=1.0)
        b = Metrics(task="regression", r2=1.0, mse=3.0)
        m = Metrics.mean([a, b])
        assert m.r2 == 0.75
        assert m.mse == 2.0

    def test_binary_auc_from_scores(self):
        m = compute_metrics([1, 1, 0, 0], [1, 1, 0, 0], "classification",
                            scores=np.array([0.9, 0.8, 0.3, 0.1]))
        assert m.auc == 1.0

    def test_auc_absent_without_scores(self):
        m = compute_metrics([1, 0], [1, 0], "classification")
        assert m.auc is None
        assert "auc" not in m.to_dict()
