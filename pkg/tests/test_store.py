import json

import pytest

from mlassist.errors import (
    ConflictError,
    InvariantViolationError,
    NotCompletedError,
    UnknownFieldError,
    UnknownMetricError,
)
from mlassist.store import ExperimentRecord, ExperimentStore, SemanticQuery

from helpers import FakeClock, fake_result, seed_dataset


def make_record(store, dataset, *, exp_id="e1", algorithm="knn", status="pending",
                accuracy=None, launched_by="user", params=None):
    result = fake_result(accuracy=accuracy) if status == "completed" else None
    return ExperimentRecord(
        id=exp_id,
        dataset_id=dataset.id,
        task_type="classification",
        algorithm=algorithm,
        parameters=params or {"k": 5, "weights": "uniform"},
        seed=0,
        cv_folds=2,
        status=status,
        result=result,
        error="boom" if status == "failed" else None,
        launched_by=launched_by,
        index_terms=sorted(set(dataset.tags) | {algorithm, "classification"}),
        created_at=store.now(),
    )


@pytest.fixture
def store(tmp_path):
    s = ExperimentStore(tmp_path, clock=FakeClock())
    yield s
    s.close()


class TestPutGet:
    def test_roundtrip(self, store):
        ds = seed_dataset(store)
        rec = make_record(store, ds)
        store.put_experiment(rec)
        assert store.get_experiment("e1").to_dict() == rec.to_dict()

    def test_idempotent_identical_put(self, store):
        ds = seed_dataset(store)
        rec = make_record(store, ds)
        store.put_experiment(rec)
        store.put_experiment(rec)
        assert len(store.query_experiments()) == 1

    def test_conflicting_put_rejected(self, store):
        ds = seed_dataset(store)
        store.put_experiment(make_record(store, ds))
        with pytest.raises(ConflictError):
            store.put_experiment(make_record(store, ds, algorithm="svm"))

    def test_completed_without_result_rejected(self, store):
        ds = seed_dataset(store)
        bad = make_record(store, ds).with_changes(status="completed")
        with pytest.raises(InvariantViolationError):
            store.put_experiment(bad)

    def test_feedback_requires_completion(self, store):
        ds = seed_dataset(store)
        store.put_experiment(make_record(store, ds))
        with pytest.raises(NotCompletedError):
            store.set_feedback("e1", "up")


class TestQuery:
    def seed(self, store):
        ds_a = seed_dataset(store, name="a", tags=("alpha",), seed=1)
        ds_b = seed_dataset(store, name="b", tags=("beta",), seed=2)
        store.put_experiment(make_record(store, ds_a, exp_id="e1", status="completed", accuracy=0.7))
        store.put_experiment(make_record(store, ds_a, exp_id="e2", algorithm="svm"))
        store.put_experiment(make_record(store, ds_a, exp_id="e3", status="failed"))
        store.put_experiment(make_record(store, ds_b, exp_id="e4", status="completed", accuracy=0.9))
        store.put_experiment(make_record(store, ds_b, exp_id="e5", algorithm="svm",
                                         status="completed", accuracy=0.8))
        return ds_a, ds_b

    def test_filter_by_dataset(self, store):
        ds_a, _ = self.seed(store)
        assert len(store.query_experiments(dataset_id=ds_a.id)) == 3

    def test_empty_filter_returns_all(self, store):
        self.seed(store)
        assert len(store.query_experiments()) == 5

    def test_conjunction_equals_intersection(self, store):
        self.seed(store)
        both = store.query_experiments(status="completed", algorithm="svm")
        a = {r.id for r in store.query_experiments(status="completed")}
        b = {r.id for r in store.query_experiments(algorithm="svm")}
        assert {r.id for r in both} == a & b

    def test_unknown_field(self, store):
        with pytest.raises(UnknownFieldError):
            store.query_experiments(flavor="salty")

    def test_stable_order(self, store):
        self.seed(store)
        ids = [r.id for r in store.query_experiments()]
        assert ids == sorted(ids, key=lambda i: (store.get_experiment(i).created_at, i))


class TestSemantic:
    def seed_tagged(self, store):
        prostate = seed_dataset(store, name="prostate-study", tags=("prostate", "cancer"), seed=3)
        diabetes = seed_dataset(store, name="diabetes-study", tags=("diabetes",), seed=4)
        store.put_experiment(make_record(store, prostate, exp_id="p1", algorithm="knn",
                                         status="completed", accuracy=0.91))
        store.put_experiment(make_record(store, prostate, exp_id="p2", algorithm="logistic_regression",
                                         status="completed", accuracy=0.88))
        store.put_experiment(make_record(store, prostate, exp_id="p3", algorithm="svm"))  # pending
        store.put_experiment(make_record(store, diabetes, exp_id="d1", algorithm="svm",
                                         status="completed", accuracy=0.99))
        return prostate, diabetes

    def test_worked_query(self, store):
        self.seed_tagged(store)
        hits = store.semantic_best_configs(
            SemanticQuery(frozenset({"prostate"}), "accuracy", "desc", 1))
        assert len(hits) == 1
        assert hits[0]["algorithm"] == "knn"
        assert hits[0]["metric_value"] == 0.91

    def test_full_ranking_excludes_unrelated_and_pending(self, store):
        self.seed_tagged(store)
        hits = store.semantic_best_configs(
            SemanticQuery(frozenset({"prostate"}), "accuracy", "desc", 10))
        assert [h["experiment_id"] for h in hits] == ["p1", "p2"]

    def test_no_match_is_empty(self, store):
        self.seed_tagged(store)
        assert store.semantic_best_configs(
            SemanticQuery(frozenset({"lung"}), "accuracy", "desc", 5)) == []

    def test_tie_breaks_by_created_at(self, store):
        ds = seed_dataset(store, tags=("tied",), seed=5)
        first = make_record(store, ds, exp_id="t1", status="completed", accuracy=0.5)
        store.put_experiment(first)
        store._clock.advance(10)
        store.put_experiment(make_record(store, ds, exp_id="t0", algorithm="svm",
                                         status="completed", accuracy=0.5))
        hits = store.semantic_best_configs(
            SemanticQuery(frozenset({"tied"}), "accuracy", "desc", 5))
        assert [h["experiment_id"] for h in hits] == ["t1", "t0"]

    def test_unknown_metric(self, store):
        with pytest.raises(UnknownMetricError):
            store.semantic_best_configs(SemanticQuery(frozenset({"x"}), "speed", "desc", 1))

    def test_brute_force_permutation_property(self, store):
        ds = seed_dataset(store, tags=("perm",), seed=6)
        values = [0.3, 0.9, 0.1, 0.9, 0.5]
        for i, v in enumerate(values):
            store.put_experiment(make_record(store, ds, exp_id=f"x{i}", status="completed",
                                             accuracy=v, params={"k": 1, "weights": "uniform"}))
            store._clock.advance(1)
        hits = store.semantic_best_configs(
            SemanticQuery(frozenset({"perm"}), "accuracy", "desc", 100))
        got = [h["metric_value"] for h in hits]
        assert got == sorted(values, reverse=True)
        assert len(hits) == 5


class TestDurability:
    def test_restart_preserves_acknowledged_writes(self, tmp_path):
        clock = FakeClock()
        s1 = ExperimentStore(tmp_path, clock=clock)
        ds = seed_dataset(s1)
        rec = make_record(s1, ds, status="completed", accuracy=0.77)
        s1.put_experiment(rec)
        # no close: simulates a crash (fsync already ran on append)
        s2 = ExperimentStore(tmp_path, clock=clock)
        assert s2.get_experiment("e1").metric_value("accuracy") == 0.77
        assert s2.get_dataset(ds.id).name == ds.name
        s2.put_experiment(rec)  # idempotent re-put after restart
        assert len(s2.query_experiments()) == 1
        s1.close()
        s2.close()

    def test_torn_trailing_line_is_skipped(self, tmp_path):
        clock = FakeClock()
        s1 = ExperimentStore(tmp_path, clock=clock)
        ds = seed_dataset(s1)
        s1.put_experiment(make_record(s1, ds))
        s1.close()
        log = tmp_path / "store" / "experiments.log"
        with open(log, "ab") as fh:
            fh.write(b'{"id": "half-written')
        s2 = ExperimentStore(tmp_path, clock=clock)
        assert len(s2.query_experiments()) == 1
        s2.close()

    def test_update_versions_replay_to_latest(self, tmp_path):
        clock = FakeClock()
        s1 = ExperimentStore(tmp_path, clock=clock)
        ds = seed_dataset(s1)
        s1.put_experiment(make_record(s1, ds))
        s1.resolve_experiment("e1", result=fake_result(accuracy=0.6))
        s1.set_feedback("e1", "up")
        s1.close()
        s2 = ExperimentStore(tmp_path, clock=clock)
        rec = s2.get_experiment("e1")
        assert rec.status == "completed"
        assert rec.feedback == "up"
        s2.close()

    def test_log_lines_are_plain_documents(self, tmp_path):
        clock = FakeClock()
        s1 = ExperimentStore(tmp_path, clock=clock)
        ds = seed_dataset(s1)
        s1.put_experiment(make_record(s1, ds))
        s1.close()
        lines = (tmp_path / "store" / "experiments.log").read_text().strip().split("\n")
        doc = json.loads(lines[0])
        for key in ("id", "dataset_id", "algorithm", "parameters", "status",
                    "launched_by", "feedback", "index_terms", "created_at"):
            assert key in doc


class TestResolveAndArtifacts:
    def test_first_resolution_wins(self, store):
        ds = seed_dataset(store)
        store.put_experiment(make_record(store, ds))
        _, applied1 = store.resolve_experiment("e1", result=fake_result(accuracy=0.8))
        _, applied2 = store.resolve_experiment("e1", result=fake_result(accuracy=0.2))
        assert applied1 and not applied2
        assert store.get_experiment("e1").metric_value("accuracy") == 0.8

    def test_artifact_roundtrip(self, store):
        digest = store.add_artifact(b"some bytes")
        assert store.get_artifact(digest) == b"some bytes"
        assert len(digest) == 64 and digest == digest.lower()

    def test_tags_editable(self, store):
        ds = seed_dataset(store, tags=("old",))
        updated = store.update_dataset_tags(ds.id, ["NEW", "tags "])
        assert updated.tags == ["new", "tags"]
        assert store.get_dataset(ds.id).tags == ["new", "tags"]

    def test_dataset_table_roundtrip(self, store):
        ds = seed_dataset(store)
        table = store.load_table(store.get_dataset(ds.id))
        assert table.n_rows == ds.n_rows
        X, y, _ = table.to_matrix()
        assert X.shape[0] == ds.n_rows
