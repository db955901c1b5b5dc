import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlassist.datasets.ingest import (
    DatasetTable,
    content_id,
    ingest_bytes,
    parse_table,
)
from mlassist.datasets.meta_features import META_FEATURE_NAMES, compute_meta_features
from mlassist.datasets.records import normalize_tags
from mlassist.errors import EmptyDatasetError, ParseError, TargetError


def csv_bytes(header, rows, delimiter=","):
    lines = [delimiter.join(header)]
    lines += [delimiter.join(str(c) for c in row) for row in rows]
    return ("\n".join(lines) + "\n").encode("utf-8")


def fixture_table(n_rows=100, n_numeric=4, seed=0):
    rng = np.random.default_rng(seed)
    header = [f"x{i}" for i in range(n_numeric)] + ["label"]
    rows = []
    for i in range(n_rows):
        rows.append([f"{v:.6f}" for v in rng.normal(0, 1, n_numeric)] + [str(i % 2)])
    return csv_bytes(header, rows)


class TestParsing:
    def test_basic_shape(self):
        raw = fixture_table(n_rows=100, n_numeric=4)
        dataset_id, table = ingest_bytes(raw, "label", "classification")
        assert table.n_rows == 100
        meta = compute_meta_features(table)
        assert meta.n_features == 4
        assert len(dataset_id) == 64

    def test_constant_target_rejected(self):
        raw = csv_bytes(["a", "y"], [[1.5, "x"], [2.5, "x"], [3.5, "x"]])
        with pytest.raises(TargetError):
            parse_table(raw, "y", "classification")

    def test_same_bytes_same_id(self):
        raw = fixture_table()
        assert content_id(raw, "label", "classification") == \
            content_id(raw, "label", "classification")

    def test_line_endings_do_not_change_id(self):
        raw = fixture_table()
        crlf = raw.replace(b"\n", b"\r\n")
        assert content_id(raw, "label", "classification") == \
            content_id(crlf, "label", "classification")

    def test_different_target_different_id(self):
        raw = csv_bytes(["a", "b", "y"], [[1.0, 2.0, 0], [3.0, 4.0, 1], [5.0, 6.0, 0]])
        assert content_id(raw, "y", "classification") != \
            content_id(raw, "a", "classification")

    def test_tab_delimited(self):
        raw = csv_bytes(["a", "b", "y"], [[1.5, 2.5, 0], [3.5, 4.5, 1]], delimiter="\t")
        table = parse_table(raw, "y", "classification")
        assert table.columns == ["a", "b", "y"]

    def test_ragged_rows_rejected(self):
        raw = b"a,b,y\n1,2,0\n1,2\n"
        with pytest.raises(ParseError):
            parse_table(raw, "y", "classification")

    def test_missing_target_column(self):
        raw = fixture_table()
        with pytest.raises(TargetError):
            parse_table(raw, "nonexistent", "classification")

    def test_empty_input(self):
        with pytest.raises(EmptyDatasetError):
            parse_table(b"", "y", "classification")

    def test_row_limit_guard(self):
        raw = fixture_table(n_rows=50)
        with pytest.raises(ParseError):
            parse_table(raw, "label", "classification", row_limit=10)

    def test_rows_with_missing_target_dropped(self):
        raw = csv_bytes(["a", "y"], [[1.5, 0], [2.5, ""], [3.5, 1], [4.5, "NA"]])
        table = parse_table(raw, "y", "classification")
        assert table.n_rows == 2

    def test_regression_needs_numeric_target(self):
        raw = csv_bytes(["a", "y"], [[1.5, "low"], [2.5, "high"]])
        with pytest.raises(TargetError):
            parse_table(raw, "y", "regression")


class TestImputationAndKinds:
    def test_numeric_median_imputation(self):
        raw = csv_bytes(["a", "y"], [[1.5, 0], ["", 1], [3.5, 0], [10.5, 1]])
        table = parse_table(raw, "y", "classification")
        assert table.data["a"][1] == pytest.approx(3.5)  # median of {1.5, 3.5, 10.5}

    def test_categorical_mode_imputation_breaks_ties_low(self):
        raw = csv_bytes(["c", "y"], [["b", 0], ["a", 1], ["?", 0], ["b", 1], ["a", 0]])
        table = parse_table(raw, "y", "classification")
        assert table.data["c"][2] == "a"  # tie between a and b -> lexicographic

    def test_small_integer_column_is_categorical(self):
        raw = csv_bytes(["g", "y"], [[1, 1.5], [2, 2.5], [1, 3.5], [3, 4.5]])
        table = parse_table(raw, "y", "regression")
        assert table.kinds["g"] == "categorical"

    def test_regression_target_never_categorical(self):
        raw = csv_bytes(["a", "y"], [[1.5, 1], [2.5, 2], [3.5, 1], [4.5, 2]])
        table = parse_table(raw, "y", "regression")
        assert table.kinds["y"] == "numeric"

    def test_kind_override(self):
        raw = csv_bytes(["g", "y"], [[1, 0], [2, 1], [1, 0], [3, 1]])
        table = parse_table(raw, "y", "classification", kind_overrides={"g": "numeric"})
        assert table.kinds["g"] == "numeric"

    def test_one_hot_matrix(self):
        raw = csv_bytes(["num", "cat", "y"],
                        [[1.5, "red", 0], [2.5, "blue", 1], [3.5, "red", 0]])
        table = parse_table(raw, "y", "classification")
        X, y, names = table.to_matrix()
        assert names == ["num", "cat=blue", "cat=red"]
        assert X[:, 1].tolist() == [0.0, 1.0, 0.0]
        assert y.tolist() == ["0", "1", "0"]

    def test_table_csv_roundtrip(self):
        raw = csv_bytes(["num", "cat", "y"],
                        [[1.25, "red", 0], [2.5, "blue", 1], [3.125, "red", 0]])
        table = parse_table(raw, "y", "classification")
        blob = table.to_csv_bytes()
        back = DatasetTable.from_csv_bytes(
            blob, [(c, table.kinds[c]) for c in table.columns], "y", "classification")
        assert back.columns == table.columns
        assert np.array_equal(back.data["num"], table.data["num"])
        assert back.data["cat"].tolist() == table.data["cat"].tolist()


class TestMetaFeatures:
    def test_balanced_binary_imbalance_is_one(self):
        raw = fixture_table(n_rows=100)
        table = parse_table(raw, "label", "classification")
        assert compute_meta_features(table).imbalance_ratio == 1.0

    def test_duplicate_feature_gives_perfect_correlation(self):
        rows = [[v, v, i % 2] for i, v in enumerate(np.linspace(0.1, 9.7, 40))]
        raw = csv_bytes(["a", "b", "y"], rows)
        table = parse_table(raw, "y", "classification")
        assert compute_meta_features(table).mean_abs_corr == pytest.approx(1.0)

    def test_derived_fixture_fractions(self):
        # 1000 rows, 6 numeric + 3 categorical features, binary target
        rng = np.random.default_rng(4)
        header = [f"n{i}" for i in range(6)] + ["c0", "c1", "c2", "label"]
        rows = []
        for i in range(1000):
            rows.append(
                [f"{v:.4f}" for v in rng.normal(0, 1, 6)]
                + [rng.choice(["a", "b"]), rng.choice(["x", "y", "z"]), rng.choice(["p", "q"])]
                + [str(i % 2)]
            )
        table = parse_table(csv_bytes(header, rows), "label", "classification")
        meta = compute_meta_features(table)
        assert meta.frac_categorical == pytest.approx(3 / 9)
        assert meta.log_instances == pytest.approx(3.0)
        assert meta.n_classes == 2

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(1)
        header = ["a", "b", "y"]
        rows = [[f"{rng.normal():.5f}", f"{rng.normal():.5f}", str(i % 3)] for i in range(60)]
        t1 = parse_table(csv_bytes(header, rows), "y", "classification")
        shuffled = [rows[i] for i in rng.permutation(60)]
        t2 = parse_table(csv_bytes(header, shuffled), "y", "classification")
        assert compute_meta_features(t1).to_dict() == pytest.approx(
            compute_meta_features(t2).to_dict())

    def test_positive_scaling_preserves_correlation(self):
        rng = np.random.default_rng(2)
        base = rng.normal(0, 1, (50, 2))
        rows1 = [[repr(a), repr(b), str(i % 2)] for i, (a, b) in enumerate(base)]
        rows2 = [[repr(a * 1024.0), repr(b), str(i % 2)] for i, (a, b) in enumerate(base)]
        m1 = compute_meta_features(parse_table(csv_bytes(["a", "b", "y"], rows1), "y", "classification"))
        m2 = compute_meta_features(parse_table(csv_bytes(["a", "b", "y"], rows2), "y", "classification"))
        assert m1.mean_abs_corr == pytest.approx(m2.mean_abs_corr, abs=1e-9)

    def test_single_numeric_feature_zero_correlation(self):
        raw = csv_bytes(["a", "y"], [[1.5, 0], [2.5, 1], [3.5, 0]])
        meta = compute_meta_features(parse_table(raw, "y", "classification"))
        assert meta.mean_abs_corr == 0.0

    def test_vector_order_and_length(self):
        raw = fixture_table(n_rows=30)
        meta = compute_meta_features(parse_table(raw, "label", "classification"))
        vec = meta.vector()
        assert vec.shape == (10,)
        assert vec[0] == meta.n_instances
        assert vec[-1] == meta.log_features
        assert list(META_FEATURE_NAMES)[0] == "n_instances"

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 5), st.integers(10, 60))
    def test_never_nan_or_inf(self, seed, n_cols, n_rows):
        rng = np.random.default_rng(seed)
        header = [f"c{i}" for i in range(n_cols)] + ["y"]
        rows = []
        for i in range(n_rows):
            cells = []
            for j in range(n_cols):
                kind = (seed + j) % 3
                if kind == 0:
                    cells.append(f"{rng.normal():.4f}")
                elif kind == 1:
                    cells.append(str(rng.integers(0, 3)))
                else:
                    cells.append(rng.choice(["u", "v", "w"]))
            rows.append(cells + [str(i % 2)])
        meta = compute_meta_features(
            parse_table(csv_bytes(header, rows), "y", "classification"))
        assert np.all(np.isfinite(meta.vector()))


class TestTags:
    def test_normalization(self):
        assert normalize_tags(["Cancer", "  cancer ", "PROSTATE", ""]) == ["cancer", "prostate"]
