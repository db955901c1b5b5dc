"""Embedded experiment memory: append-only document log plus tag indexes."""

from mlassist.store.documents import ExperimentRecord, SemanticQuery
from mlassist.store.store import ExperimentStore

__all__ = ["ExperimentRecord", "ExperimentStore", "SemanticQuery"]
