"""Thumbs up/down: recorded on the experiment, accumulated in the KB.

Every vote call shifts the config's feedback_delta by +/-1 (an up after a
down nets to zero), and the recommender turns the net delta into a score
multiplier of 1 + 0.1 per vote, clamped to [0.5, 1.5].
"""

from __future__ import annotations

from mlassist.errors import InvariantViolationError
from mlassist.recommender.kb import PRIMARY_METRIC


def apply_feedback(store, kb, experiment_id: str, vote: str):
    """Returns the touched KBEntry (or None when the KB has no context)."""
    if vote not in ("up", "down"):
        raise InvariantViolationError(f"vote must be 'up' or 'down', got {vote!r}")
    record = store.set_feedback(experiment_id, vote)  # validates completion
    dataset = store.get_dataset(record.dataset_id)
    metric = PRIMARY_METRIC[record.task_type]
    return kb.adjust_feedback(
        dataset.name,
        record.algorithm,
        record.parameters,
        1 if vote == "up" else -1,
        meta=dataset.meta_features,
        metric_name=metric,
        metric_value=record.metric_value(metric),
    )
