"""Dataset record type and tag normalization."""

from __future__ import annotations

from dataclasses import dataclass

from mlassist.datasets.meta_features import MetaFeatures


def normalize_tags(tags) -> list[str]:
    """Case-folded, stripped, deduplicated, sorted; empty strings dropped."""
    cleaned = {t.strip().casefold() for t in tags if t and t.strip()}
    return sorted(cleaned)


@dataclass
class DatasetRecord:
    """Metadata for one ingested dataset.  Immutable after creation except
    tags, which the store may update separately."""

    id: str
    name: str
    columns: list[tuple[str, str]]  # (name, "numeric" | "categorical")
    target_column: str
    task_type: str
    tags: list[str]
    n_rows: int
    meta_features: MetaFeatures
    created_at: str
    table_artifact: str = ""  # content hash of the canonical imputed table

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "columns": [[n, k] for n, k in self.columns],
            "target_column": self.target_column,
            "task_type": self.task_type,
            "tags": list(self.tags),
            "n_rows": self.n_rows,
            "meta_features": self.meta_features.to_dict(),
            "created_at": self.created_at,
            "table_artifact": self.table_artifact,
        }

    @staticmethod
    def from_dict(d: dict) -> "DatasetRecord":
        return DatasetRecord(
            id=d["id"],
            name=d["name"],
            columns=[(c[0], c[1]) for c in d["columns"]],
            target_column=d["target_column"],
            task_type=d["task_type"],
            tags=list(d["tags"]),
            n_rows=d["n_rows"],
            meta_features=MetaFeatures.from_dict(d["meta_features"]),
            created_at=d["created_at"],
            table_artifact=d.get("table_artifact", ""),
        )
