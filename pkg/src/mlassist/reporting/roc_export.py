"""ROC curve export: a CSV of (fpr, tpr) points plus a static SVG.

The CSV interface is 6-decimal fixed point.  Parsing a written file returns
exactly the stored coordinates rounded to 6 decimals, and both files are
linked back into the store as content-addressed artifacts on the experiment.
"""

from __future__ import annotations

from pathlib import Path

from mlassist.errors import IoError, NotClassificationError, NotCompletedError
from mlassist.ml.metrics import RocCurve
from mlassist.reporting.svg import roc_svg

ROC_CSV_HEADER = "fpr,tpr"


def roc_csv_bytes(curve: RocCurve) -> bytes:
    lines = [ROC_CSV_HEADER]
    lines += [f"{fpr:.6f},{tpr:.6f}" for fpr, tpr in curve.points]
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_roc_csv(blob: bytes) -> list[tuple[float, float]]:
    lines = blob.decode("utf-8").strip().split("\n")
    if not lines or lines[0].strip() != ROC_CSV_HEADER:
        raise IoError(f"bad ROC CSV header: {lines[0] if lines else ''!r}")
    points = []
    for line in lines[1:]:
        fpr, tpr = line.split(",")
        points.append((float(fpr), float(tpr)))
    return points


def export_roc(store, experiment_id: str, path) -> dict:
    """Write <path>.csv and <path>.svg; returns {"csv", "svg"} artifact hashes.

    Both artifacts are stored content-addressed and attached to the
    experiment record, so they stay retrievable by experiment id.
    """
    record = store.get_experiment(experiment_id)
    if record.status != "completed":
        raise NotCompletedError(f"experiment {experiment_id} is {record.status}")
    if record.task_type != "classification" or record.result.roc is None:
        raise NotClassificationError("ROC export needs a completed classification run")
    curve = record.result.roc
    csv_blob = roc_csv_bytes(curve)
    svg_blob = roc_svg(curve.points, curve.auc).encode("utf-8")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.with_suffix(".csv").write_bytes(csv_blob)
        path.with_suffix(".svg").write_bytes(svg_blob)
    except OSError as exc:
        raise IoError(f"cannot write ROC files: {exc}") from None
    artifacts = {
        "roc_csv": store.add_artifact(csv_blob),
        "roc_svg": store.add_artifact(svg_blob),
    }
    store.attach_artifacts(experiment_id, artifacts)
    return artifacts
