"""Meta-learning recommendation and cross-algorithm comparison.

Scoring pipeline for a query dataset:

1. z-normalize its meta-feature vector against the knowledge base stats;
2. find the k nearest KB datasets (Euclidean, dataset = mean of its
   entries' meta vectors);
3. score every configuration seen on those neighbors by the
   distance-weighted mean of its metric, weight 1/(1+d);
4. multiply in accumulated user feedback (1 + 0.1 per net vote, clamped to
   [0.5, 1.5]) and matching expert rules (boost/penalize scale by
   1 +/- weight, exclude removes);
5. drop configurations already run on the query dataset;
6. return the top n, ties resolved by menu order then canonical params.

With an empty knowledge base the fallback ranks the full curated grid by
rule score alone, ties by menu order.

Scalar arithmetic here is deliberately plain Python (not vectorized): the
knowledge base is desk-scale and reproducibility down to the last bit
matters more than speed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from mlassist.datasets.meta_features import META_FEATURE_NAMES, MetaFeatures
from mlassist.errors import EmptyInputError, UnknownMetricError
from mlassist.ml.algorithms import ALGORITHM_ORDER, ParamConfig, full_grid
from mlassist.ml.metrics import ALL_METRICS, HIGHER_IS_BETTER
from mlassist.recommender.kb import KnowledgeBase
from mlassist.recommender.rules import ordered_for_application

DEFAULT_NEIGHBORS = 5
FEEDBACK_UNIT = 0.1
FEEDBACK_CLAMP = (0.5, 1.5)


@dataclass(frozen=True)
class Recommendation:
    config: ParamConfig
    expected_score: float
    rationale: str
    rank: int

    def to_dict(self) -> dict:
        return {
            "algorithm": self.config.algorithm,
            "parameters": self.config.values,
            "expected_score": self.expected_score,
            "rationale": self.rationale,
            "rank": self.rank,
        }


def _task_of(meta: MetaFeatures) -> str:
    return "classification" if meta.n_classes >= 2 else "regression"


def _algo_index(task: str, algorithm: str) -> int:
    order = ALGORITHM_ORDER[task]
    return order.index(algorithm) if algorithm in order else len(order)


def _canonical(parameters: dict) -> str:
    return json.dumps(parameters, sort_keys=True, separators=(",", ":"))


def _znorm(vector, means, stds) -> list[float]:
    return [(float(v) - m) / s for v, m, s in zip(vector, means, stds)]


def _distance(a: list[float], b: list[float]) -> float:
    return sum((x - y) ** 2 for x, y in zip(a, b)) ** 0.5


def feedback_multiplier(delta: int) -> float:
    low, high = FEEDBACK_CLAMP
    return min(high, max(low, 1.0 + FEEDBACK_UNIT * delta))


def recommend(meta: MetaFeatures, kb: KnowledgeBase, rules, history, n: int,
              k: int = DEFAULT_NEIGHBORS) -> list[Recommendation]:
    if n < 1:
        raise ValueError("n must be >= 1")
    task = _task_of(meta)
    history_keys = {_history_key(h) for h in (history or [])}
    entries, means, stds = kb.snapshot()
    entries = [e for e in entries if e.task == task]
    active_rules = [r for r in ordered_for_application(rules or []) if r.matches(meta)]

    if not entries:
        return _rule_only_fallback(task, active_rules, history_keys, n)

    # dataset-level meta vectors: mean over that dataset's entries
    per_dataset: dict[str, list] = {}
    for e in entries:
        per_dataset.setdefault(e.dataset_name, []).append(e)
    query_z = _znorm(
        [getattr(meta, f) for f in META_FEATURE_NAMES], means, stds)
    dataset_distances = []
    for name in sorted(per_dataset):
        group = per_dataset[name]
        mean_vector = []
        for f in META_FEATURE_NAMES:
            mean_vector.append(sum(float(getattr(e.meta_features, f)) for e in group)
                               / len(group))
        d = _distance(query_z, _znorm(mean_vector, means, stds))
        dataset_distances.append((d, name))
    dataset_distances.sort(key=lambda t: (t[0], t[1]))
    neighbors = dataset_distances[: max(1, k)]
    neighbor_weight = {name: 1.0 / (1.0 + d) for d, name in neighbors}

    # distance-weighted mean metric per configuration across the neighbors
    stats: dict[tuple[str, str], dict] = {}
    for e in entries:
        if e.dataset_name not in neighbor_weight:
            continue
        key = e.config_key()
        w = neighbor_weight[e.dataset_name]
        slot = stats.setdefault(key, {"wsum": 0.0, "vsum": 0.0, "delta": 0,
                                      "parameters": e.parameters})
        slot["wsum"] += w
        slot["vsum"] += w * float(e.metric_value)
        slot["delta"] += e.feedback_delta

    scored = []
    for (algorithm, canonical), slot in stats.items():
        if (algorithm, canonical) in history_keys:
            continue
        score = slot["vsum"] / slot["wsum"]
        notes = []
        mult = feedback_multiplier(slot["delta"])
        if slot["delta"] != 0:
            notes.append(f"user feedback x{mult:.2f}")
        score *= mult
        excluded = False
        for rule in active_rules:
            if not rule.targets(algorithm, slot["parameters"]):
                continue
            if rule.action == "exclude":
                excluded = True
                notes.append(f"rule {rule.rule_id} excludes")
                break
            score *= rule.multiplier()
            notes.append(f"rule {rule.rule_id} {rule.action} x{rule.multiplier():.2f}")
        if excluded:
            continue
        scored.append((score, _algo_index(task, algorithm), canonical,
                       algorithm, slot["parameters"], notes))

    scored.sort(key=lambda t: (-t[0], t[1], t[2]))
    neighbor_names = ", ".join(name for _, name in neighbors)
    out = []
    for rank, (score, _, _, algorithm, parameters, notes) in enumerate(scored[:n], start=1):
        rationale = f"nearest datasets: {neighbor_names}"
        if notes:
            rationale += "; " + "; ".join(notes)
        out.append(Recommendation(ParamConfig(algorithm, dict(parameters)),
                                  float(score), rationale, rank))
    return out


def _history_key(item) -> tuple[str, str]:
    if isinstance(item, ParamConfig):
        return (item.algorithm, item.canonical())
    algorithm, parameters = item
    if isinstance(parameters, str):
        return (algorithm, parameters)
    return (algorithm, _canonical(parameters))


def _rule_only_fallback(task: str, active_rules, history_keys, n: int):
    """Empty knowledge base: the curated grid ranked by rule score alone."""
    scored = []
    for position, config in enumerate(full_grid(task)):
        key = (config.algorithm, config.canonical())
        if key in history_keys:
            continue
        score = 1.0
        excluded = False
        fired = []
        for rule in active_rules:
            if not rule.targets(config.algorithm, config.values):
                continue
            if rule.action == "exclude":
                excluded = True
                break
            score *= rule.multiplier()
            fired.append(f"rule {rule.rule_id} {rule.action}")
        if excluded:
            continue
        scored.append((score, position, config, fired))
    scored.sort(key=lambda t: (-t[0], t[1]))
    out = []
    for rank, (score, _, config, fired) in enumerate(scored[:n], start=1):
        rationale = "no knowledge-base coverage; ranked by expert rules and menu order"
        if fired:
            rationale += " (" + ", ".join(fired) + ")"
        out.append(Recommendation(config, float(score), rationale, rank))
    return out


@dataclass(frozen=True)
class RankingReport:
    metric: str
    algorithms: list[str]  # sorted by average rank, best first
    per_algorithm_mean: dict
    average_rank: dict
    win_matrix: dict  # win_matrix[a][b] = datasets where a strictly beats b
    n_datasets: int

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "algorithms": self.algorithms,
            "per_algorithm_mean": self.per_algorithm_mean,
            "average_rank": self.average_rank,
            "win_matrix": self.win_matrix,
            "n_datasets": self.n_datasets,
        }


def best_per_dataset_algorithm(records, metric: str) -> dict:
    """(dataset_id, algorithm) -> best completed metric value."""
    if metric not in ALL_METRICS:
        raise UnknownMetricError(f"unknown metric {metric!r}")
    higher = HIGHER_IS_BETTER[metric]
    best: dict[tuple[str, str], float] = {}
    for r in records:
        value = r.metric_value(metric)
        if value is None:
            continue
        key = (r.dataset_id, r.algorithm)
        if key not in best or (value > best[key] if higher else value < best[key]):
            best[key] = value
    return best


def _mean_ranks(values: dict, higher: bool) -> dict:
    """Algorithm -> rank within one dataset; 1 is best, ties get mean rank."""
    items = sorted(values.items(), key=lambda kv: (-kv[1] if higher else kv[1], kv[0]))
    ranks: dict[str, float] = {}
    i = 0
    while i < len(items):
        j = i
        while j + 1 < len(items) and items[j + 1][1] == items[i][1]:
            j += 1
        mean_rank = (i + 1 + j + 1) / 2.0
        for k in range(i, j + 1):
            ranks[items[k][0]] = mean_rank
        i = j + 1
    return ranks


def compare_algorithms(records, metric: str) -> RankingReport:
    """Friedman-style comparison: per-dataset ranks of each algorithm's best
    configuration, averaged, plus a strict pairwise win matrix."""
    best = best_per_dataset_algorithm(records, metric)
    if not best:
        raise EmptyInputError("no completed records carry that metric")
    higher = HIGHER_IS_BETTER[metric]
    datasets: dict[str, dict[str, float]] = {}
    for (dataset_id, algorithm), value in best.items():
        datasets.setdefault(dataset_id, {})[algorithm] = value

    algorithms = sorted({a for _, a in best})
    rank_sums = {a: 0.0 for a in algorithms}
    rank_counts = {a: 0 for a in algorithms}
    value_sums = {a: 0.0 for a in algorithms}
    wins = {a: {b: 0 for b in algorithms if b != a} for a in algorithms}
    for values in datasets.values():
        for a, r in _mean_ranks(values, higher).items():
            rank_sums[a] += r
            rank_counts[a] += 1
            value_sums[a] += values[a]
        for a in values:
            for b in values:
                if a == b:
                    continue
                if (values[a] > values[b]) if higher else (values[a] < values[b]):
                    wins[a][b] += 1

    average_rank = {a: rank_sums[a] / rank_counts[a] for a in algorithms}
    per_mean = {a: value_sums[a] / rank_counts[a] for a in algorithms}
    ordered = sorted(algorithms, key=lambda a: (average_rank[a], a))
    return RankingReport(
        metric=metric,
        algorithms=ordered,
        per_algorithm_mean=per_mean,
        average_rank=average_rank,
        win_matrix=wins,
        n_datasets=len(datasets),
    )


RESULT_TABLE_COLUMNS = ("experiment_id", "dataset", "algorithm", "parameters",
                        "accuracy", "balanced_accuracy", "f1_macro", "auc", "r2", "mse")


def export_results_table(records, path, dataset_names: dict | None = None) -> int:
    """Collate records into a tab-delimited file; returns the row count."""
    from mlassist.errors import IoError

    names = dataset_names or {}
    rows = sorted(records, key=lambda r: (r.created_at, r.id))
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\t".join(RESULT_TABLE_COLUMNS) + "\n")
            for r in rows:
                metrics = r.result.metrics.to_dict() if r.result else {}
                cells = [
                    r.id,
                    names.get(r.dataset_id, r.dataset_id),
                    r.algorithm,
                    _canonical(r.parameters),
                ]
                for metric in RESULT_TABLE_COLUMNS[4:]:
                    value = metrics.get(metric)
                    cells.append("" if value is None else repr(float(value)))
                fh.write("\t".join(cells) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write results table: {exc}") from None
    return len(rows)
