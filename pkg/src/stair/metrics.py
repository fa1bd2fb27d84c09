"""Entropy, purity, classification scores, and the ratio objective.

All functions are pure. Entropy is computed from integer class counts in a
canonical (sorted) order so that histograms with identical count multisets
produce bit-identical values, which keeps tie-breaking deterministic across
independent code paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPSILON = 1e-9


def entropy(histogram) -> float:
    """Shannon entropy in bits of a class-count histogram; 0*log0 = 0."""
    counts = sorted(int(c) for c in histogram if c > 0)
    if any(c < 0 for c in histogram):
        raise ValueError("negative class count")
    total = sum(counts)
    if total == 0:
        raise ValueError("entropy of an empty histogram is undefined")
    # H = log2(n) - sum(c*log2(c))/n, exact for pure sets and stable for ties
    return math.log2(total) - sum(c * math.log2(c) for c in counts) / total


def purity(histogram) -> float:
    """1 - entropy; can go negative for more than two classes."""
    return 1.0 - entropy(histogram)


def rule_purity(r) -> float:
    if r.n_covered < 1:
        raise ValueError("purity of an empty rule is undefined")
    return purity(r.class_histogram)


def info_gain(parent, left, right) -> float:
    """Entropy reduction of a binary split, weighted by branch sizes."""
    if left.n_covered + right.n_covered != parent.n_covered:
        raise ValueError("child coverage does not sum to parent coverage")
    n = parent.n_covered
    return entropy(parent.class_histogram) - (
        left.n_covered * entropy(left.class_histogram)
        + right.n_covered * entropy(right.class_histogram)
    ) / n


def f1(truth, pred, positive: int = 1) -> float:
    """F1 on the positive class. With no true and no predicted positives the
    score is vacuously 1.0; with predicted-but-no-true positives it is 0.0."""
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if truth.shape != pred.shape:
        raise ValueError(f"length mismatch: {truth.shape} vs {pred.shape}")
    if truth.size < 1:
        raise ValueError("empty label vectors")
    tp = int(np.sum((truth == positive) & (pred == positive)))
    fp = int(np.sum((truth != positive) & (pred == positive)))
    fn = int(np.sum((truth == positive) & (pred != positive)))
    if tp == 0 and fp == 0 and fn == 0:
        return 1.0
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def accuracy(truth, pred) -> float:
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if truth.shape != pred.shape:
        raise ValueError(f"length mismatch: {truth.shape} vs {pred.shape}")
    if truth.size < 1:
        raise ValueError("empty label vectors")
    return float(np.mean(truth == pred))


SCORERS = {"f1": f1, "accuracy": accuracy}


def score_labels(kind: str, truth, pred) -> float:
    try:
        fn = SCORERS[kind]
    except KeyError:
        raise ValueError(f"unknown score '{kind}' (expected one of {sorted(SCORERS)})") from None
    return fn(truth, pred)


@dataclass
class ObjectiveState:
    """Running sums of the ratio objective over a rule set.

    weighted_purity is sum(n_r * (1 - entropy(r))) over rules, total_length
    is sum(length(r)), and stabilizer is the learnable denominator offset.
    """

    weighted_purity: float  # A0
    total_length: float  # B0
    stabilizer: float = 0.0  # M

    def copy(self) -> "ObjectiveState":
        return ObjectiveState(self.weighted_purity, self.total_length, self.stabilizer)


def stair_objective(state: ObjectiveState) -> float:
    """weighted_purity / (total_length + stabilizer)."""
    denom = state.total_length + state.stabilizer
    if denom <= 0.0:
        raise ValueError(f"objective denominator {denom} is not positive")
    return state.weighted_purity / denom
