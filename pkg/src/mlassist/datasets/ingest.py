"""CSV ingestion: parsing, validation, imputation, and identity hashing.

A dataset's id is the SHA-256 of its canonical content (line endings
normalized, outer whitespace trimmed) plus the target/task designation.
Name and tags never enter the hash, so re-uploads of the same bytes are
recognized regardless of labeling.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass

import numpy as np

from mlassist.errors import EmptyDatasetError, ParseError, TargetError

MISSING_TOKENS = {"", "na", "n/a", "nan", "null", "none", "?"}
MAX_CATEGORICAL_CARDINALITY = 10
DEFAULT_ROW_LIMIT = 1_000_000


@dataclass
class DatasetTable:
    """A parsed, imputed, analysis-ready table.

    data maps column name to a float array (numeric) or an object array of
    strings (categorical).  The classification target keeps its original
    string labels.
    """

    columns: list[str]
    kinds: dict[str, str]
    data: dict[str, np.ndarray]
    target_column: str
    task_type: str

    @property
    def n_rows(self) -> int:
        return int(self.data[self.target_column].shape[0])

    def feature_columns(self) -> list[str]:
        return [c for c in self.columns if c != self.target_column]

    def to_matrix(self) -> tuple[np.ndarray, np.ndarray, list[str]]:
        """One-hot encoded feature matrix, target vector, expanded names."""
        blocks, names = [], []
        for col in self.feature_columns():
            if self.kinds[col] == "numeric":
                blocks.append(self.data[col].astype(float).reshape(-1, 1))
                names.append(col)
            else:
                values = self.data[col]
                for level in sorted(set(values.tolist())):
                    blocks.append((values == level).astype(float).reshape(-1, 1))
                    names.append(f"{col}={level}")
        X = np.hstack(blocks)
        y = self.data[self.target_column]
        if self.task_type == "regression":
            y = y.astype(float)
        return X, y, names

    def to_csv_bytes(self) -> bytes:
        """Canonical serialization: comma-delimited, repr-precision floats."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        cols = []
        for c in self.columns:
            if self.kinds[c] == "numeric" and self.data[c].dtype.kind == "f":
                cols.append([repr(v) for v in self.data[c].tolist()])
            else:
                cols.append([str(v) for v in self.data[c].tolist()])
        for row in zip(*cols):
            writer.writerow(row)
        return buf.getvalue().encode("utf-8")

    @staticmethod
    def from_csv_bytes(blob: bytes, columns: list[tuple[str, str]],
                       target_column: str, task_type: str) -> "DatasetTable":
        """Rehydrate a stored canonical table using the record's column kinds."""
        text = blob.decode("utf-8")
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], rows[1:]
        kinds = dict(columns)
        data: dict[str, np.ndarray] = {}
        for j, name in enumerate(header):
            cells = [r[j] for r in body]
            if kinds[name] == "numeric" and not (task_type == "classification" and name == target_column):
                data[name] = np.array([float(c) for c in cells])
            else:
                data[name] = np.array(cells, dtype=object)
        return DatasetTable(columns=header, kinds=kinds, data=data,
                            target_column=target_column, task_type=task_type)


def canonical_text(raw: bytes) -> str:
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8: {exc}") from None
    return text.replace("\r\n", "\n").replace("\r", "\n").strip()


def content_id(raw: bytes, target_column: str, task_type: str) -> str:
    material = canonical_text(raw) + "\x00" + target_column + "\x00" + task_type
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def _detect_delimiter(first_line: str) -> str:
    return "\t" if first_line.count("\t") > first_line.count(",") else ","


def _is_missing(cell: str) -> bool:
    return cell.strip().casefold() in MISSING_TOKENS


def _try_float(cell: str):
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def parse_table(raw: bytes, target_column: str, task_type: str,
                kind_overrides: dict[str, str] | None = None,
                row_limit: int = DEFAULT_ROW_LIMIT) -> DatasetTable:
    """Parse and validate a CSV byte stream into an analysis-ready table.

    Rows with a missing target are dropped; missing feature cells are imputed
    with the column median (numeric) or mode (categorical, ties to the
    lexicographically smallest value).
    """
    text = canonical_text(raw)
    if not text:
        raise EmptyDatasetError("input is empty")
    first_line = text.split("\n", 1)[0]
    delimiter = _detect_delimiter(first_line)
    rows = list(csv.reader(io.StringIO(text), delimiter=delimiter))
    header = [h.strip() for h in rows[0]]
    if any(not h for h in header):
        raise ParseError("header has an empty column name")
    if len(set(header)) != len(header):
        raise ParseError("header has duplicate column names")
    if target_column not in header:
        raise TargetError(f"target column {target_column!r} not in header {header}")
    if len(header) < 2:
        raise ParseError("need at least one feature column besides the target")

    body = rows[1:]
    if len(body) > row_limit:
        raise ParseError(f"{len(body)} rows exceeds the row limit of {row_limit}")
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise ParseError(f"row {i + 2} has {len(row)} cells, expected {len(header)}")

    target_idx = header.index(target_column)
    kept = [row for row in body if not _is_missing(row[target_idx])]
    if not kept:
        raise EmptyDatasetError("no rows with a target value")

    overrides = {k: v for k, v in (kind_overrides or {}).items()}
    kinds: dict[str, str] = {}
    data: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        cells = [row[j].strip() for row in kept]
        kinds[name] = _decide_kind(name, cells, target_column, task_type, overrides.get(name))
        data[name] = _materialize(name, cells, kinds[name], name == target_column, task_type)

    table = DatasetTable(columns=header, kinds=kinds, data=data,
                         target_column=target_column, task_type=task_type)
    _validate_target(table)
    return table


def _decide_kind(name: str, cells: list[str], target_column: str, task_type: str,
                 override: str | None) -> str:
    if override in ("numeric", "categorical"):
        return override
    present = [c for c in cells if not _is_missing(c)]
    if not present:
        raise ParseError(f"column {name!r} has no values")
    parsed = [_try_float(c) for c in present]
    if any(v is None for v in parsed):
        return "categorical"
    is_regression_target = task_type == "regression" and name == target_column
    if is_regression_target:
        return "numeric"
    if all(float(v).is_integer() for v in parsed) and len(set(parsed)) <= MAX_CATEGORICAL_CARDINALITY:
        return "categorical"
    return "numeric"


def _materialize(name: str, cells: list[str], kind: str, is_target: bool,
                 task_type: str) -> np.ndarray:
    if is_target and task_type == "classification":
        return np.array(cells, dtype=object)  # labels verbatim, no imputation
    if kind == "numeric":
        values = [_try_float(c) if not _is_missing(c) else None for c in cells]
        if is_target and any(v is None for v in values):
            raise TargetError(f"regression target {name!r} has non-numeric values")
        present = [v for v in values if v is not None]
        if not present:
            raise ParseError(f"column {name!r} has no numeric values")
        median = float(np.median(present))
        return np.array([v if v is not None else median for v in values], dtype=float)
    present = [c for c in cells if not _is_missing(c)]
    counts: dict[str, int] = {}
    for c in present:
        counts[c] = counts.get(c, 0) + 1
    top = max(counts.values())
    mode = min(v for v, k in counts.items() if k == top)
    return np.array([c if not _is_missing(c) else mode for c in cells], dtype=object)


def _validate_target(table: DatasetTable) -> None:
    y = table.data[table.target_column]
    if table.task_type == "classification":
        if np.unique(y).size < 2:
            raise TargetError("classification target has fewer than 2 distinct values")
    elif table.task_type == "regression":
        if table.kinds[table.target_column] != "numeric":
            raise TargetError("regression target must be numeric")
    else:
        raise TargetError(f"unknown task type {table.task_type!r}")


def ingest_bytes(raw: bytes, target_column: str, task_type: str,
                 kind_overrides: dict[str, str] | None = None,
                 row_limit: int = DEFAULT_ROW_LIMIT):
    """Parse + hash in one step; returns (dataset id, table)."""
    table = parse_table(raw, target_column, task_type,
                        kind_overrides=kind_overrides, row_limit=row_limit)
    return content_id(raw, target_column, task_type), table
