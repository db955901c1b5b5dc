"""Ingestion glue: parse + characterize + persist in one call."""

from __future__ import annotations

from mlassist.datasets.ingest import content_id, parse_table
from mlassist.datasets.meta_features import compute_meta_features
from mlassist.datasets.records import DatasetRecord, normalize_tags
from mlassist.errors import UnknownDatasetError


def ingest_dataset(store, raw: bytes, name: str, target_column: str, task_type: str,
                   tags=(), kind_overrides=None, row_limit=1_000_000):
    """Returns (DatasetRecord, created).  Re-ingesting identical content is a
    no-op that returns the existing record."""
    dataset_id = content_id(raw, target_column, task_type)
    try:
        return store.get_dataset(dataset_id), False
    except UnknownDatasetError:
        pass
    table = parse_table(raw, target_column, task_type,
                        kind_overrides=kind_overrides, row_limit=row_limit)
    artifact = store.add_artifact(table.to_csv_bytes())
    record = DatasetRecord(
        id=dataset_id,
        name=name,
        columns=[(c, table.kinds[c]) for c in table.columns],
        target_column=target_column,
        task_type=task_type,
        tags=normalize_tags(tags),
        n_rows=table.n_rows,
        meta_features=compute_meta_features(table),
        created_at=store.now(),
        table_artifact=artifact,
    )
    return store.put_dataset(record)
