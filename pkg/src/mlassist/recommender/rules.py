"""Expert rules: developer-provided heuristics over dataset meta-features.

A rule is a conjunction of field comparisons plus an action that boosts,
penalizes, or excludes an algorithm (optionally narrowed to one parameter
value).  Rules apply in a single forward pass in weight-descending order;
there is no chaining.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from mlassist.datasets.meta_features import META_FEATURE_NAMES, MetaFeatures
from mlassist.errors import FormatError
from mlassist.ml.algorithms import ALGORITHM_ORDER

_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=": lambda a, b: a == b,
    "==": lambda a, b: a == b,
}
_ACTIONS = ("boost", "penalize", "exclude")
_KNOWN_ALGORITHMS = set(ALGORITHM_ORDER["classification"]) | set(ALGORITHM_ORDER["regression"])


@dataclass(frozen=True)
class Condition:
    feature: str
    op: str
    value: float

    def holds(self, meta: MetaFeatures) -> bool:
        return _OPS[self.op](float(getattr(meta, self.feature)), self.value)


@dataclass(frozen=True)
class ExpertRule:
    rule_id: str
    condition: tuple[Condition, ...]
    action: str  # boost | penalize | exclude
    algorithm: str
    param: str | None = None
    value: object = None
    weight: float = 0.0

    def matches(self, meta: MetaFeatures) -> bool:
        return all(c.holds(meta) for c in self.condition)

    def targets(self, algorithm: str, parameters: dict) -> bool:
        if algorithm != self.algorithm:
            return False
        if self.param is None:
            return True
        return parameters.get(self.param) == self.value

    def multiplier(self) -> float:
        if self.action == "boost":
            return 1.0 + self.weight
        if self.action == "penalize":
            return max(0.0, 1.0 - self.weight)
        return 0.0  # exclude removes the config outright

    def to_dict(self) -> dict:
        action: dict = {"kind": self.action, "algorithm": self.algorithm}
        if self.param is not None:
            action["param"] = self.param
            action["value"] = self.value
        return {
            "rule_id": self.rule_id,
            "condition": [{"field": c.feature, "op": c.op, "value": c.value}
                          for c in self.condition],
            "action": action,
            "weight": self.weight,
        }


def parse_rule(doc: dict) -> ExpertRule:
    try:
        conditions = []
        for c in doc["condition"]:
            if c["field"] not in META_FEATURE_NAMES:
                raise FormatError(f"rule {doc.get('rule_id')}: unknown field {c['field']!r}")
            if c["op"] not in _OPS:
                raise FormatError(f"rule {doc.get('rule_id')}: unknown op {c['op']!r}")
            conditions.append(Condition(c["field"], c["op"], float(c["value"])))
        action = doc["action"]
        if action["kind"] not in _ACTIONS:
            raise FormatError(f"rule {doc.get('rule_id')}: unknown action {action['kind']!r}")
        if action["algorithm"] not in _KNOWN_ALGORITHMS:
            raise FormatError(
                f"rule {doc.get('rule_id')}: unknown algorithm {action['algorithm']!r}")
        weight = float(doc.get("weight", 0.0))
        if weight < 0:
            raise FormatError(f"rule {doc.get('rule_id')}: weight must be >= 0")
        return ExpertRule(
            rule_id=str(doc["rule_id"]),
            condition=tuple(conditions),
            action=action["kind"],
            algorithm=action["algorithm"],
            param=action.get("param"),
            value=action.get("value"),
            weight=weight,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed rule {doc.get('rule_id')!r}: {exc}") from None


def load_rules(path) -> list[ExpertRule]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            docs = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"rule file is not valid JSON: {exc}") from None
    if not isinstance(docs, list):
        raise FormatError("rule file must be a JSON array of rules")
    return [parse_rule(doc) for doc in docs]


def ordered_for_application(rules) -> list[ExpertRule]:
    """Weight-descending, rule_id as the deterministic tie-break."""
    return sorted(rules, key=lambda r: (-r.weight, r.rule_id))
