"""The knowledge base: what ran where, and how well it did.

Bootstrapped from a tab-delimited benchmark results file and grown with
every completed live experiment, it is the memory the recommender learns
from.  Feature statistics for z-normalization are recomputed on every
mutation; a constant column gets a standard deviation of 1 so it simply
stops influencing distances.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace

from mlassist.datasets.meta_features import META_FEATURE_NAMES, MetaFeatures
from mlassist.errors import FormatError, IoError

KB_COLUMNS = ("dataset",) + META_FEATURE_NAMES + (
    "algorithm", "parameters", "metric_name", "metric_value")

PRIMARY_METRIC = {"classification": "balanced_accuracy", "regression": "r2"}
CLASSIFICATION_RANGE_METRICS = ("accuracy", "balanced_accuracy", "f1_macro", "auc")


@dataclass(frozen=True)
class KBEntry:
    dataset_name: str
    meta_features: MetaFeatures
    algorithm: str
    parameters: dict
    metric_name: str
    metric_value: float
    source: str = "bootstrap"  # "bootstrap" | "live"
    feedback_delta: int = 0

    @property
    def task(self) -> str:
        return "classification" if self.meta_features.n_classes >= 2 else "regression"

    def config_key(self) -> tuple[str, str]:
        return (self.algorithm, json.dumps(self.parameters, sort_keys=True,
                                           separators=(",", ":")))

    def validate(self) -> None:
        value = float(self.metric_value)
        if value != value or value in (float("inf"), float("-inf")):
            raise FormatError("metric_value must be finite")
        if self.metric_name in CLASSIFICATION_RANGE_METRICS and not 0.0 <= value <= 1.0:
            raise FormatError(f"{self.metric_name}={value} outside [0, 1]")


class KnowledgeBase:
    def __init__(self, entries=()):
        self._lock = threading.RLock()
        self.entries: list[KBEntry] = []
        self.feature_means: list[float] = [0.0] * len(META_FEATURE_NAMES)
        self.feature_stds: list[float] = [1.0] * len(META_FEATURE_NAMES)
        for e in entries:
            self.entries.append(e)
        self._recompute_stats()

    def __len__(self) -> int:
        return len(self.entries)

    def snapshot(self) -> tuple[list[KBEntry], list[float], list[float]]:
        with self._lock:
            return list(self.entries), list(self.feature_means), list(self.feature_stds)

    def add_entry(self, entry: KBEntry) -> KBEntry:
        entry.validate()
        with self._lock:
            self.entries.append(entry)
            self._recompute_stats()
            return entry

    def upsert_live(self, entry: KBEntry) -> KBEntry:
        """Replace the live entry for (dataset, config, metric) or append;
        accumulated feedback survives the replacement."""
        entry.validate()
        with self._lock:
            for i, existing in enumerate(self.entries):
                if (existing.source == "live"
                        and existing.dataset_name == entry.dataset_name
                        and existing.config_key() == entry.config_key()
                        and existing.metric_name == entry.metric_name):
                    merged = replace(entry, feedback_delta=existing.feedback_delta)
                    self.entries[i] = merged
                    self._recompute_stats()
                    return merged
            self.entries.append(entry)
            self._recompute_stats()
            return entry

    def adjust_feedback(self, dataset_name: str, algorithm: str, parameters: dict,
                        delta: int, meta: MetaFeatures | None = None,
                        metric_name: str | None = None,
                        metric_value: float | None = None) -> KBEntry | None:
        """Shift feedback_delta on every entry for this config on this
        dataset; creates a live entry if none exists and enough context is
        supplied."""
        key = (algorithm, json.dumps(parameters, sort_keys=True, separators=(",", ":")))
        with self._lock:
            touched = None
            for i, e in enumerate(self.entries):
                if e.dataset_name == dataset_name and e.config_key() == key:
                    touched = replace(e, feedback_delta=e.feedback_delta + delta)
                    self.entries[i] = touched
            if touched is None and meta is not None and metric_value is not None:
                touched = KBEntry(dataset_name, meta, algorithm, parameters,
                                  metric_name or "balanced_accuracy",
                                  float(metric_value), source="live",
                                  feedback_delta=delta)
                self.entries.append(touched)
                self._recompute_stats()
            return touched

    def _recompute_stats(self) -> None:
        n = len(self.entries)
        if n == 0:
            self.feature_means = [0.0] * len(META_FEATURE_NAMES)
            self.feature_stds = [1.0] * len(META_FEATURE_NAMES)
            return
        means, stds = [], []
        for j, name in enumerate(META_FEATURE_NAMES):
            values = [float(getattr(e.meta_features, name)) for e in self.entries]
            mean = sum(values) / n
            var = sum((v - mean) ** 2 for v in values) / n
            std = var ** 0.5
            means.append(mean)
            stds.append(std if std > 0.0 else 1.0)
        self.feature_means = means
        self.feature_stds = stds


def _parse_row(cells: list[str], line_no: int) -> KBEntry:
    if len(cells) != len(KB_COLUMNS):
        raise FormatError(f"line {line_no}: {len(cells)} columns, expected {len(KB_COLUMNS)}")
    record = dict(zip(KB_COLUMNS, cells))
    try:
        meta = MetaFeatures.from_dict({k: float(record[k]) for k in META_FEATURE_NAMES})
    except ValueError as exc:
        raise FormatError(f"line {line_no}: bad meta-feature value ({exc})") from None
    try:
        parameters = json.loads(record["parameters"])
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {line_no}: parameters is not valid JSON ({exc})") from None
    if not isinstance(parameters, dict):
        raise FormatError(f"line {line_no}: parameters must be a JSON object")
    try:
        value = float(record["metric_value"])
    except ValueError:
        raise FormatError(f"line {line_no}: metric_value is not a number") from None
    entry = KBEntry(
        dataset_name=record["dataset"],
        meta_features=meta,
        algorithm=record["algorithm"],
        parameters=parameters,
        metric_name=record["metric_name"],
        metric_value=value,
        source="bootstrap",
    )
    entry.validate()
    return entry


def load_knowledge_base(path) -> tuple[KnowledgeBase, list[dict]]:
    """Load a bootstrap file.

    Returns (kb, error_report): malformed rows are collected, well-formed
    rows load anyway.  A bad header is fatal (FormatError).
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or not lines[0].strip():
        raise FormatError("knowledge base file is empty")
    header = tuple(h.strip() for h in lines[0].split("\t"))
    if header != KB_COLUMNS:
        raise FormatError(
            f"bad header: expected {list(KB_COLUMNS)}, got {list(header)}")
    kb = KnowledgeBase()
    errors: list[dict] = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            kb.add_entry(_parse_row(line.split("\t"), i))
        except FormatError as exc:
            errors.append({"line": i, "error": str(exc)})
    return kb, errors


def save_knowledge_base(kb: KnowledgeBase, path) -> None:
    entries, _, _ = kb.snapshot()
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\t".join(KB_COLUMNS) + "\n")
            for e in entries:
                meta = e.meta_features.to_dict()
                row = [e.dataset_name]
                row += [repr(meta[name]) for name in META_FEATURE_NAMES]
                row += [e.algorithm,
                        json.dumps(e.parameters, sort_keys=True, separators=(",", ":")),
                        e.metric_name, repr(float(e.metric_value))]
                fh.write("\t".join(row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write knowledge base: {exc}") from None
