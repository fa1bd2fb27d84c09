"""Interval rules and rule sets.

A Rule is a conjunction of per-attribute intervals plus a predicted label and
coverage statistics. Intervals use the half-open convention (lower, upper]:
splitting at t sends x <= t left and x > t right, so the leaves of one binary
interval tree always partition feature space. A rule's length is the number
of distinct constrained attributes; repeated splits on the same attribute
merge into one interval and do not add length.

Rules and RuleSets are immutable values; learners build new ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf

RULESET_FORMAT = "ruleset"
RULESET_VERSION = 1


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lower: float  # may be -inf; exclusive
    upper: float  # may be +inf; inclusive

    def __post_init__(self):
        if not self.lower < self.upper:
            raise RuleError(f"empty interval ({self.lower}, {self.upper}]")

    def contains(self, x: float) -> bool:
        return self.lower < x <= self.upper


@dataclass(frozen=True)
class Rule:
    predicates: dict[int, Interval]  # attribute index -> interval; absent = unconstrained
    label: int
    n_covered: int
    class_histogram: tuple[int, ...]

    def length(self) -> int:
        return len(self.predicates)


def make_rule(predicates: dict[int, Interval], histogram) -> Rule:
    """Rule with label and coverage derived from its class histogram.

    Label ties break toward the smaller class id, so an even split defaults
    to inlier.
    """
    hist = tuple(int(c) for c in histogram)
    return Rule(
        predicates=dict(predicates),
        label=int(np.argmax(hist)),
        n_covered=sum(hist),
        class_histogram=hist,
    )


def rule_length(r: Rule) -> int:
    """Number of distinct constrained attributes."""
    return r.length()


def refine(r: Rule, attr: int, threshold: float) -> tuple[Rule, Rule]:
    """Split a rule's interval on one attribute at a threshold.

    Returns (left, right) with left taking (lower, threshold] and right
    (threshold, upper]. Coverage statistics are reset to empty; the caller
    recomputes them from the covered training subset (see attach_stats).
    """
    current = r.predicates.get(attr, Interval(-INF, INF))
    if not (current.lower < threshold < current.upper):
        raise RuleError(
            f"threshold {threshold} outside interval "
            f"({current.lower}, {current.upper}] of attribute {attr}"
        )
    left_preds = dict(r.predicates)
    left_preds[attr] = Interval(current.lower, threshold)
    right_preds = dict(r.predicates)
    right_preds[attr] = Interval(threshold, current.upper)
    k = len(r.class_histogram)
    empty = (0,) * k
    return (
        Rule(left_preds, label=0, n_covered=0, class_histogram=empty),
        Rule(right_preds, label=0, n_covered=0, class_histogram=empty),
    )


def attach_stats(r: Rule, covered_labels: np.ndarray, class_count: int) -> Rule:
    """Fill a rule's histogram/label/coverage from the labels it covers."""
    hist = np.bincount(covered_labels, minlength=class_count)
    return make_rule(r.predicates, hist)


def covers(r: Rule, x) -> bool:
    """True iff every predicate interval contains the matching coordinate."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise RuleError("covers expects a single feature vector")
    for attr, iv in r.predicates.items():
        if attr >= x.shape[0]:
            raise RuleError(f"point has {x.shape[0]} dimensions, rule uses attribute {attr}")
        if not iv.contains(float(x[attr])):
            return False
    return True


def coverage_mask(r: Rule, features: np.ndarray) -> np.ndarray:
    """Boolean mask of rows covered by the rule."""
    mask = np.ones(features.shape[0], dtype=bool)
    for attr, iv in r.predicates.items():
        col = features[:, attr]
        mask &= (col > iv.lower) & (col <= iv.upper)
    return mask


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    attributes: tuple[str, ...]

    def total_length(self) -> int:
        return sum(r.length() for r in self.rules)

    def __len__(self) -> int:
        return len(self.rules)


def make_ruleset(rules, attributes) -> RuleSet:
    return RuleSet(tuple(rules), tuple(attributes))


def predict(rs: RuleSet, x) -> int:
    """Label of the unique covering rule; raises if no rule covers x."""
    for r in rs.rules:
        if covers(r, x):
            return r.label
    raise RuleError(f"no rule covers point {x!r} (rule set is not a partition)")


def assign_rules(rs: RuleSet, features: np.ndarray) -> np.ndarray:
    """Index of the covering rule for every row; -1 marks uncovered rows."""
    out = np.full(features.shape[0], -1, dtype=np.int64)
    for i, r in enumerate(rs.rules):
        mask = coverage_mask(r, features) & (out == -1)
        out[mask] = i
    return out


def predict_many(rs: RuleSet, features: np.ndarray) -> np.ndarray:
    idx = assign_rules(rs, features)
    if np.any(idx < 0):
        bad = int(np.argmax(idx < 0))
        raise RuleError(f"no rule covers row {bad} (rule set is not a partition)")
    labels = np.array([r.label for r in rs.rules], dtype=np.int64)
    return labels[idx]


def _label_name(label: int, class_count_hint: int) -> str:
    if class_count_hint <= 2:
        return "inlier" if label == 0 else "outlier"
    return f"class {label}"


def render(rs: RuleSet) -> str:
    """One human-readable line per rule, e.g. '-2 < x1 <= 2 => inlier'."""
    k = max((len(r.class_histogram) for r in rs.rules), default=2)
    lines = []
    for r in rs.rules:
        parts = []
        for attr in sorted(r.predicates):
            iv = r.predicates[attr]
            name = rs.attributes[attr]
            if iv.lower == -INF:
                parts.append(f"{name} <= {iv.upper:g}")
            elif iv.upper == INF:
                parts.append(f"{name} > {iv.lower:g}")
            else:
                parts.append(f"{iv.lower:g} < {name} <= {iv.upper:g}")
        body = " and ".join(parts) if parts else "true"
        lines.append(f"{body} => {_label_name(r.label, k)}  [n={r.n_covered}]")
    return "\n".join(lines)


def _bound_to_doc(v: float):
    if v == -INF:
        return "-inf"
    if v == INF:
        return "+inf"
    return v


def _bound_from_doc(v) -> float:
    if v == "-inf":
        return -INF
    if v == "+inf":
        return INF
    return float(v)


def ruleset_to_doc(rs: RuleSet) -> dict:
    """JSON-safe document; bounds use -inf/+inf sentinels, floats round-trip."""
    return {
        "format": RULESET_FORMAT,
        "version": RULESET_VERSION,
        "attributes": list(rs.attributes),
        "rules": [
            {
                "id": i,
                "predicates": [
                    {
                        "attr": attr,
                        "lower": _bound_to_doc(iv.lower),
                        "upper": _bound_to_doc(iv.upper),
                    }
                    for attr, iv in sorted(r.predicates.items())
                ],
                "label": r.label,
                "n_covered": r.n_covered,
                "histogram": list(r.class_histogram),
            }
            for i, r in enumerate(rs.rules)
        ],
    }


def ruleset_from_doc(doc: dict) -> RuleSet:
    if not isinstance(doc, dict) or doc.get("format") != RULESET_FORMAT:
        raise RuleError("not a rule set document")
    if doc.get("version") != RULESET_VERSION:
        raise RuleError(f"unsupported rule set version {doc.get('version')!r}")
    attributes = tuple(doc["attributes"])
    seen_ids = set()
    rules = []
    for rec in doc["rules"]:
        rid = rec.get("id")
        if rid in seen_ids:
            raise RuleError(f"duplicate rule id {rid}")
        seen_ids.add(rid)
        preds = {}
        for p in rec["predicates"]:
            attr = int(p["attr"])
            if attr < 0 or attr >= len(attributes):
                raise RuleError(f"rule {rid}: attribute index {attr} out of range")
            if attr in preds:
                raise RuleError(f"rule {rid}: duplicate predicate for attribute {attr}")
            preds[attr] = Interval(_bound_from_doc(p["lower"]), _bound_from_doc(p["upper"]))
        hist = tuple(int(c) for c in rec["histogram"])
        rule = Rule(
            predicates=preds,
            label=int(rec["label"]),
            n_covered=int(rec["n_covered"]),
            class_histogram=hist,
        )
        if sum(hist) != rule.n_covered:
            raise RuleError(f"rule {rid}: histogram does not sum to n_covered")
        rules.append(rule)
    return make_ruleset(rules, attributes)


def save_ruleset(rs: RuleSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ruleset_to_doc(rs), fh, indent=1)


def load_ruleset(path) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        return ruleset_from_doc(json.load(fh))
