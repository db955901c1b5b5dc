"""Cross-method / cross-dataset heatmap matrices."""

from __future__ import annotations

from dataclasses import dataclass

from mlassist.recommender.engine import best_per_dataset_algorithm, compare_algorithms


@dataclass(frozen=True)
class HeatmapMatrix:
    """Cell (i, j) is the best completed metric of algorithm i on dataset j,
    or None where it never ran.  Rows are ordered best average rank first,
    columns lexicographically."""

    metric: str
    row_labels: list[str]
    col_labels: list[str]
    cells: list[list[float | None]]

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "row_labels": self.row_labels,
            "col_labels": self.col_labels,
            "cells": self.cells,
        }


def build_heatmap(records, metric: str, dataset_names: dict | None = None) -> HeatmapMatrix:
    """records: completed experiments; dataset_names maps id -> display name."""
    best = best_per_dataset_algorithm(records, metric)
    names = dataset_names or {}
    if not best:
        return HeatmapMatrix(metric=metric, row_labels=[], col_labels=[], cells=[])
    report = compare_algorithms(records, metric)
    rows = report.algorithms  # already sorted by average rank, best first
    dataset_ids = sorted({d for d, _ in best}, key=lambda d: (names.get(d, d), d))
    cells = [[best.get((d, a)) for d in dataset_ids] for a in rows]
    return HeatmapMatrix(
        metric=metric,
        row_labels=list(rows),
        col_labels=[names.get(d, d) for d in dataset_ids],
        cells=cells,
    )
