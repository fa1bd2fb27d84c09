"""Candidate split enumeration and the min-heap that drives rule generation.

For a rule r0 split into r1, r2:
    delta_L = L(r1) + L(r2) - L(r0)   (L(r0) if the attribute is already
                                       constrained, else L(r0) + 2)
    delta_E = n1*E(r1) + n2*E(r2) - n0*E(r0),  E = 1 - entropy
Only entropy-reducing candidates (delta_E > epsilon) qualify; the heap key is
delta_L / delta_E and smaller is better.

Thresholds are midpoints between consecutive distinct sorted values of the
covered points. Ties on the key break toward (smaller attribute index,
smaller threshold), which makes enumeration order irrelevant.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .metrics import EPSILON


@dataclass(frozen=True)
class CandidateSplit:
    rule_id: int
    attr: int
    threshold: float
    delta_L: int
    delta_E: float
    key: float  # delta_L / delta_E


def _entropy_rows(counts: np.ndarray, totals: np.ndarray) -> np.ndarray:
    """Entropy of each row of a class-count matrix, canonical count order."""
    c = np.sort(counts, axis=1)
    clogc = c * np.log2(np.maximum(c, 1.0))
    return np.log2(totals) - clogc.sum(axis=1) / totals


def candidate_thresholds(values: np.ndarray) -> np.ndarray:
    """Midpoints between consecutive distinct sorted values.

    A midpoint that rounds up onto the larger value is clamped down to the
    smaller one so the left child always keeps exactly the lower group.
    """
    u = np.unique(values)
    if u.size < 2:
        return np.empty(0)
    mids = (u[:-1] + u[1:]) / 2.0
    return np.where(mids >= u[1:], u[:-1], mids)


def split_deltas(rule, attr: int, values: np.ndarray, labels: np.ndarray, class_count: int):
    """Vectorized (thresholds, delta_E, n_left) for one attribute of one rule.

    values/labels are the covered subset. Returns empty arrays when the
    attribute is constant over the subset.
    """
    n0 = values.shape[0]
    order = np.argsort(values, kind="stable")
    sv = values[order]
    sl = labels[order]
    cut = np.nonzero(sv[:-1] != sv[1:])[0]
    if cut.size == 0:
        return np.empty(0), np.empty(0), np.empty(0, dtype=np.int64)

    mids = (sv[cut] + sv[cut + 1]) / 2.0
    thresholds = np.where(mids >= sv[cut + 1], sv[cut], mids)

    onehot = np.zeros((n0, class_count))
    onehot[np.arange(n0), sl] = 1.0
    cum = np.cumsum(onehot, axis=0)
    left_counts = cum[cut]
    total = cum[-1]
    right_counts = total - left_counts
    n_left = (cut + 1).astype(np.int64)
    n_right = n0 - n_left

    e_left = 1.0 - _entropy_rows(left_counts, n_left)
    e_right = 1.0 - _entropy_rows(right_counts, n_right)
    e_parent = 1.0 - _entropy_rows(total[None, :], np.array([n0]))[0]
    delta_e = n_left * e_left + n_right * e_right - n0 * e_parent
    return thresholds, delta_e, n_left


def best_candidate(
    rule,
    ds,
    covered: np.ndarray,
    len_max: int,
    rule_id: int = 0,
    epsilon: float = EPSILON,
) -> CandidateSplit | None:
    """Minimal-key candidate split of one rule, or None if no split qualifies.

    covered must be exactly the indices the rule covers. Candidates must
    reduce weighted entropy by more than epsilon, keep both children
    nonempty, and keep child lengths within len_max.
    """
    if covered.shape[0] < 2:
        return None
    labels = ds.labels[covered]
    length = rule.length()
    best: CandidateSplit | None = None
    for attr in range(ds.d):
        constrained = attr in rule.predicates
        if not constrained and length + 1 > len_max:
            continue
        delta_l = length if constrained else length + 2
        thresholds, delta_e, _ = split_deltas(
            rule, attr, ds.features[covered, attr], labels, ds.class_count
        )
        if thresholds.size == 0:
            continue
        ok = delta_e > epsilon
        if not np.any(ok):
            continue
        keys = delta_l / delta_e[ok]
        thr = thresholds[ok]
        pick = np.lexsort((thr, keys))[0]
        if best is None or keys[pick] < best.key:
            best = CandidateSplit(
                rule_id=rule_id,
                attr=attr,
                threshold=float(thr[pick]),
                delta_L=int(delta_l),
                delta_E=float(delta_e[ok][pick]),
                key=float(keys[pick]),
            )
    return best


class SplitHeap:
    """Min-heap of per-rule best candidates keyed by delta_L/delta_E.

    Holds at most one live candidate per rule id; key ties pop in rule-id
    order, which keeps training deterministic.
    """

    def __init__(self):
        self._heap: list[tuple[float, int]] = []
        self._candidates: dict[int, CandidateSplit] = {}

    def __len__(self) -> int:
        return len(self._candidates)

    def __bool__(self) -> bool:
        return bool(self._candidates)

    def push(self, cand: CandidateSplit) -> None:
        self._candidates[cand.rule_id] = cand
        heapq.heappush(self._heap, (cand.key, cand.rule_id))

    def _skip_stale(self) -> None:
        while self._heap and self._heap[0][1] not in self._candidates:
            heapq.heappop(self._heap)

    def peek(self) -> CandidateSplit:
        self._skip_stale()
        if not self._heap:
            raise IndexError("peek on empty heap")
        return self._candidates[self._heap[0][1]]

    def peek_key(self) -> float:
        return self.peek().key

    def pop_min(self) -> CandidateSplit:
        self._skip_stale()
        if not self._heap:
            raise IndexError("pop on empty heap")
        _, rule_id = heapq.heappop(self._heap)
        return self._candidates.pop(rule_id)
