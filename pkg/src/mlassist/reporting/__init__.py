"""Result visualization data: ROC exports and cross-method heatmaps."""

from mlassist.reporting.heatmap import HeatmapMatrix, build_heatmap
from mlassist.reporting.roc_export import export_roc, roc_csv_bytes, parse_roc_csv

__all__ = ["HeatmapMatrix", "build_heatmap", "export_roc", "parse_roc_csv", "roc_csv_bytes"]
