"""Greedy information-gain decision trees: ID3 depth sweep and CART-style
score-targeted post-pruning. Both emit the same RuleSet type as the main
learner so total-length comparisons are apples-to-apples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .metrics import EPSILON, score_labels
from .rules import Rule, RuleSet, attach_stats, make_rule, make_ruleset, refine
from .splitter import split_deltas

MAX_SWEEP_DEPTH = 64


@dataclass
class _Node:
    rule: Rule
    indices: np.ndarray
    attr: int | None = None
    threshold: float | None = None
    left: "_Node | None" = None
    right: "_Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def best_gain_split(ds: Dataset, rule: Rule, covered: np.ndarray, epsilon: float = EPSILON):
    """Max information-gain (attr, threshold, gain) over midpoint thresholds,
    or None when no split reduces entropy. Ties break toward the smaller
    attribute index, then the smaller threshold."""
    n0 = covered.shape[0]
    if n0 < 2:
        return None
    labels = ds.labels[covered]
    best = None
    for attr in range(ds.d):
        thresholds, delta_e, _ = split_deltas(
            rule, attr, ds.features[covered, attr], labels, ds.class_count
        )
        if thresholds.size == 0:
            continue
        gains = delta_e / n0
        ok = gains > epsilon
        if not np.any(ok):
            continue
        g = gains[ok]
        thr = thresholds[ok]
        pick = np.lexsort((thr, -g))[0]
        if best is None or g[pick] > best[2]:
            best = (attr, float(thr[pick]), float(g[pick]))
    return best


def _grow(
    ds: Dataset,
    rule: Rule,
    indices: np.ndarray,
    depth_limit: int | None,
    epsilon: float,
    record: list | None = None,
) -> _Node:
    node = _Node(rule=rule, indices=indices)
    if depth_limit is not None and depth_limit <= 0:
        return node
    hist = rule.class_histogram
    if sum(1 for c in hist if c > 0) <= 1:
        return node
    found = best_gain_split(ds, rule, indices, epsilon)
    if found is None:
        return node
    attr, threshold, _ = found
    if record is not None:
        record.append((indices.copy(), attr, threshold))
    left, right = refine(rule, attr, threshold)
    go_left = ds.features[indices, attr] <= threshold
    li, ri = indices[go_left], indices[~go_left]
    left = attach_stats(left, ds.labels[li], ds.class_count)
    right = attach_stats(right, ds.labels[ri], ds.class_count)
    child_limit = None if depth_limit is None else depth_limit - 1
    node.attr = attr
    node.threshold = threshold
    node.left = _grow(ds, left, li, child_limit, epsilon, record)
    node.right = _grow(ds, right, ri, child_limit, epsilon, record)
    return node


def _grow_root(ds: Dataset, depth_limit: int | None, epsilon: float, record: list | None = None) -> _Node:
    root_rule = make_rule({}, np.bincount(ds.labels, minlength=ds.class_count))
    return _grow(ds, root_rule, np.arange(ds.n), depth_limit, epsilon, record)


def _leaves(node: _Node) -> list[_Node]:
    if node.is_leaf:
        return [node]
    return _leaves(node.left) + _leaves(node.right)


def _depth(node: _Node) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(_depth(node.left), _depth(node.right))


def _to_ruleset(ds: Dataset, root: _Node) -> RuleSet:
    return make_ruleset([leaf.rule for leaf in _leaves(root)], ds.attributes)


def _tree_predictions(ds: Dataset, root: _Node) -> np.ndarray:
    preds = np.empty(ds.n, dtype=np.int64)
    for leaf in _leaves(root):
        preds[leaf.indices] = leaf.rule.label
    return preds


def id3_fit_depth(ds: Dataset, depth: int, record: list | None = None) -> RuleSet:
    """Greedy information-gain tree of at most the given depth (edges from
    root to deepest leaf), converted to a rule set with merged intervals."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    return _to_ruleset(ds, _grow_root(ds, depth, EPSILON, record))


def id3_sweep(
    ds: Dataset, f1_min: float, depth_start: int = 3, score: str = "f1"
) -> tuple[RuleSet, bool]:
    """Smallest-depth ID3 tree whose training score beats f1_min.

    Returns (ruleset, reached). Stops unreached when the tree saturates
    (extra depth changes nothing) or the depth cap is hit.
    """
    depth = max(1, depth_start)
    while True:
        root = _grow_root(ds, depth, EPSILON)
        value = score_labels(score, ds.labels, _tree_predictions(ds, root))
        if value > f1_min:
            return _to_ruleset(ds, root), True
        if _depth(root) < depth or depth >= MAX_SWEEP_DEPTH:
            return _to_ruleset(ds, root), False
        depth += 1


def _collapse_candidates(root: _Node) -> list[_Node]:
    out = []

    def walk(node: _Node):
        if node.is_leaf:
            return
        out.append(node)
        walk(node.left)
        walk(node.right)

    walk(root)
    return out


def _collapse(node: _Node) -> None:
    node.attr = None
    node.threshold = None
    node.left = None
    node.right = None


def cart_fit(ds: Dataset, f1_min: float, score: str = "f1") -> tuple[RuleSet, bool]:
    """Grow a full information-gain tree, then greedily collapse the internal
    node whose removal costs the least training score, stopping right above
    the score threshold.

    Returns (ruleset, reached). If even the full tree scores at or below
    f1_min it is returned unpruned and flagged.
    """
    root = _grow_root(ds, None, EPSILON)
    preds = _tree_predictions(ds, root)
    value = score_labels(score, ds.labels, preds)
    if value <= f1_min:
        return _to_ruleset(ds, root), False

    while not root.is_leaf:
        best = None
        for node in _collapse_candidates(root):
            trial = preds.copy()
            trial[node.indices] = node.rule.label
            trial_score = score_labels(score, ds.labels, trial)
            removed = len(_leaves(node))
            if best is None or (trial_score, removed) > (best[0], best[1]):
                best = (trial_score, removed, node)
        if best is None or best[0] <= f1_min:
            break
        _, _, node = best
        preds[node.indices] = node.rule.label
        _collapse(node)
    return _to_ruleset(ds, root), True


def cart_prune_to_length(ds: Dataset, max_total_length: int, score: str = "f1") -> RuleSet:
    """Grow a full tree, then collapse least-damaging nodes until the rule
    set's total length fits the budget (used by score-vs-length benchmarks)."""
    root = _grow_root(ds, None, EPSILON)
    preds = _tree_predictions(ds, root)
    while _to_ruleset(ds, root).total_length() > max_total_length and not root.is_leaf:
        best = None
        for node in _collapse_candidates(root):
            trial = preds.copy()
            trial[node.indices] = node.rule.label
            trial_score = score_labels(score, ds.labels, trial)
            removed = len(_leaves(node))
            if best is None or (trial_score, removed) > (best[0], best[1]):
                best = (trial_score, removed, node)
        _, _, node = best
        preds[node.indices] = node.rule.label
        _collapse(node)
    return _to_ruleset(ds, root)
