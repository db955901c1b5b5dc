"""Independent brute-force reimplementation of the recommendation pipeline.

Used as the oracle for recommender tests and the acceptance suite.  It is
deliberately written from the documented behavior with plain loops and no
imports from the engine module, so the two implementations can only agree
by computing the same thing.
"""

from __future__ import annotations

import json

META_NAMES = (
    "n_instances", "n_features", "n_classes", "imbalance_ratio",
    "frac_categorical", "mean_abs_corr", "mean_skew", "mean_kurtosis",
    "log_instances", "log_features",
)

CLASSIFICATION_ORDER = ("logistic_regression", "decision_tree", "knn", "svm",
                        "random_forest", "gradient_boosting")
REGRESSION_ORDER = ("elastic_net", "decision_tree", "knn", "svm",
                    "random_forest", "gradient_boosting")

OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=": lambda a, b: a == b,
    "==": lambda a, b: a == b,
}


def canon(params: dict) -> str:
    return json.dumps(params, sort_keys=True, separators=(",", ":"))


def oracle_recommend(meta: dict, entries: list[dict], rules: list[dict],
                     history: set[tuple[str, str]], n: int, k: int = 5):
    """entries: {dataset, meta: {...}, algorithm, parameters, metric_value,
    feedback_delta}; rules: {rule_id, condition: [{field, op, value}], action:
    {kind, algorithm, param?, value?}, weight}.

    Returns [(algorithm, canonical_params, score)] of length <= n.
    """
    task = "classification" if meta["n_classes"] >= 2 else "regression"
    order = CLASSIFICATION_ORDER if task == "classification" else REGRESSION_ORDER

    # (1) z-normalization stats over ALL entries
    if entries:
        means, stds = {}, {}
        for f in META_NAMES:
            vals = [e["meta"][f] for e in entries]
            m = sum(vals) / len(vals)
            var = sum((v - m) ** 2 for v in vals) / len(vals)
            s = var ** 0.5
            means[f] = m
            stds[f] = s if s > 0.0 else 1.0
    task_entries = [e for e in entries
                    if ("classification" if e["meta"]["n_classes"] >= 2 else "regression") == task]
    active = [r for r in rules
              if all(OPS[c["op"]](meta[c["field"]], c["value"]) for c in r["condition"])]
    active.sort(key=lambda r: (-r["weight"], r["rule_id"]))

    def rule_hits(algorithm, parameters):
        hits = []
        for r in active:
            a = r["action"]
            if a["algorithm"] != algorithm:
                continue
            if "param" in a and parameters.get(a["param"]) != a.get("value"):
                continue
            hits.append(r)
        return hits

    if not task_entries:
        return None  # caller should use the grid fallback oracle

    # (2) k nearest datasets by euclidean distance on z-scored mean meta
    groups: dict[str, list[dict]] = {}
    for e in task_entries:
        groups.setdefault(e["dataset"], []).append(e)
    qz = [(meta[f] - means[f]) / stds[f] for f in META_NAMES]
    dists = []
    for name in sorted(groups):
        mean_meta = [sum(e["meta"][f] for e in groups[name]) / len(groups[name])
                     for f in META_NAMES]
        mz = [(v - means[f]) / stds[f] for v, f in zip(mean_meta, META_NAMES)]
        d = sum((a - b) ** 2 for a, b in zip(qz, mz)) ** 0.5
        dists.append((d, name))
    dists.sort(key=lambda t: (t[0], t[1]))
    neighbors = dists[:max(1, k)]
    weight = {name: 1.0 / (1.0 + d) for d, name in neighbors}

    # (3) distance-weighted mean metric per config
    agg: dict[tuple[str, str], dict] = {}
    for e in task_entries:
        if e["dataset"] not in weight:
            continue
        key = (e["algorithm"], canon(e["parameters"]))
        slot = agg.setdefault(key, {"w": 0.0, "v": 0.0, "delta": 0,
                                    "parameters": e["parameters"]})
        w = weight[e["dataset"]]
        slot["w"] += w
        slot["v"] += w * e["metric_value"]
        slot["delta"] += e.get("feedback_delta", 0)

    # (4) feedback multiplier and rules; (5) drop history
    scored = []
    for (algorithm, c), slot in agg.items():
        if (algorithm, c) in history:
            continue
        score = slot["v"] / slot["w"]
        score *= min(1.5, max(0.5, 1.0 + 0.1 * slot["delta"]))
        skip = False
        for r in rule_hits(algorithm, slot["parameters"]):
            kind = r["action"]["kind"]
            if kind == "exclude":
                skip = True
                break
            if kind == "boost":
                score *= 1.0 + r["weight"]
            else:
                score *= max(0.0, 1.0 - r["weight"])
        if skip:
            continue
        idx = order.index(algorithm) if algorithm in order else len(order)
        scored.append((score, idx, c, algorithm))

    # (6) top n with deterministic tie-breaks
    scored.sort(key=lambda t: (-t[0], t[1], t[2]))
    return [(algorithm, c, score) for score, _, c, algorithm in scored[:n]]
