"""Dataset ingestion, validation, and characterization."""

from mlassist.datasets.ingest import DatasetTable, ingest_bytes, parse_table
from mlassist.datasets.meta_features import (
    META_FEATURE_NAMES,
    MetaFeatures,
    compute_meta_features,
)
from mlassist.datasets.records import DatasetRecord, normalize_tags

__all__ = [
    "DatasetRecord",
    "DatasetTable",
    "MetaFeatures",
    "META_FEATURE_NAMES",
    "compute_meta_features",
    "ingest_bytes",
    "normalize_tags",
    "parse_table",
]
