"""STAIR rule learning: greedy rule splitting driven by a ratio objective.

The learner maximizes  weighted_purity / (total_length + M)  over rule sets,
where M is a stabilizer learned during training rather than a tuned
hyperparameter. Splitting rule r0 into r1, r2 changes the objective from
A0/(B0+M) to (A0+dE)/(B0+dL+M), which is an improvement exactly when
M > A0*(dL/dE) - B0. That pivot value is the split's *boundary* stabilizer:
each outer iteration raises M to the smallest boundary on the heap, then
performs every split whose boundary is within M, so the cheapest split per
unit of length is always executed first and M only ever grows.

Training stops when the training score beats the configured threshold, the
heap runs out of entropy-reducing splits, or the score stalls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .metrics import EPSILON, ObjectiveState, purity, score_labels
from .rules import Rule, RuleSet, assign_rules, attach_stats, make_rule, make_ruleset, refine
from .splitter import CandidateSplit, SplitHeap, best_candidate, split_deltas


@dataclass
class StairConfig:
    f1_min: float = 0.8  # minimal acceptable training score
    len_max: int = 10  # maximal rule length
    stall_limit: int = 5  # outer iterations without improvement before abort
    score: str = "f1"  # "f1" (binary) or "accuracy" (multi-class)
    epsilon: float = EPSILON
    # Diagnostic variant that drops the n_r factors from the running
    # weighted-purity update; breaks the objective's bookkeeping guarantees
    # and exists only for comparison.
    unweighted_updates: bool = False

    def validate(self) -> None:
        # f1_min above 1 is allowed: it is simply unreachable and the learner
        # returns its best flagged result instead of erroring.
        if self.f1_min < 0.0:
            raise ValueError(f"f1_min must be non-negative, got {self.f1_min}")
        if self.len_max < 1:
            raise ValueError(f"len_max must be positive, got {self.len_max}")
        if self.stall_limit < 1:
            raise ValueError(f"stall_limit must be >= 1, got {self.stall_limit}")
        if self.score not in ("f1", "accuracy"):
            raise ValueError(f"score must be 'f1' or 'accuracy', got {self.score!r}")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    stabilizer: float
    rule_count: int
    total_length: int
    score: float


@dataclass
class TrainingTrace:
    rows: list[TraceRow] = field(default_factory=list)
    reached_target: bool = False
    stalled: bool = False

    def to_tsv(self) -> str:
        lines = ["iteration\tM\trule_count\ttotal_length\tscore"]
        for r in self.rows:
            lines.append(
                f"{r.iteration}\t{r.stabilizer!r}\t{r.rule_count}\t{r.total_length}\t{r.score!r}"
            )
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_tsv())


@dataclass(frozen=True)
class SplitEvent:
    """Snapshot taken just before a split executes (test instrumentation)."""

    candidate: CandidateSplit
    leaves: dict[int, tuple[Rule, np.ndarray]]
    state: ObjectiveState


def boundary_M(state: ObjectiveState, cand: CandidateSplit) -> float:
    """Stabilizer value at which the candidate leaves the objective unchanged."""
    return state.weighted_purity * cand.key - state.total_length


def stair_fit(
    ds: Dataset,
    cfg: StairConfig,
    *,
    max_total_length: int | None = None,
    record_splits: list[SplitEvent] | None = None,
) -> tuple[RuleSet, TrainingTrace]:
    """Learn a rule set (one interval tree's leaves) for a labeled dataset.

    When max_total_length is given, the score-based stop is replaced by a
    total-length budget: training halts once the rule set's total length
    reaches it (used by the score-versus-length benchmarks).
    """
    cfg.validate()
    k = ds.class_count
    n = ds.n

    root = make_rule({}, np.bincount(ds.labels, minlength=k))
    leaves: dict[int, tuple[Rule, np.ndarray]] = {0: (root, np.arange(n))}
    next_id = 1
    preds = np.full(n, root.label, dtype=np.int64)

    a0 = n * purity(root.class_histogram)
    b0 = 0.0
    stabilizer = 0.0

    heap = SplitHeap()
    first = best_candidate(root, ds, leaves[0][1], cfg.len_max, rule_id=0, epsilon=cfg.epsilon)
    if first is not None:
        heap.push(first)

    score = score_labels(cfg.score, ds.labels, preds)
    best_score = score
    best_rules = [rule for rule, _ in leaves.values()]
    stall = 0
    trace = TrainingTrace()
    iteration = 0
    budget_hit = max_total_length is not None and b0 >= max_total_length

    while True:
        if max_total_length is None and score > cfg.f1_min:
            break
        if budget_hit or not heap:
            break
        if stall >= cfg.stall_limit:
            trace.stalled = True
            break

        iteration += 1
        stabilizer = max(stabilizer, a0 * heap.peek_key() - b0)

        while heap:
            cand = heap.peek()
            if a0 * cand.key - b0 > stabilizer + cfg.epsilon:
                break
            cand = heap.pop_min()
            if record_splits is not None:
                record_splits.append(
                    SplitEvent(
                        candidate=cand,
                        leaves={rid: (r, idx.copy()) for rid, (r, idx) in leaves.items()},
                        state=ObjectiveState(a0, b0, stabilizer),
                    )
                )
            rule0, idx0 = leaves.pop(cand.rule_id)
            left, right = refine(rule0, cand.attr, cand.threshold)
            go_left = ds.features[idx0, cand.attr] <= cand.threshold
            li, ri = idx0[go_left], idx0[~go_left]
            left = attach_stats(left, ds.labels[li], k)
            right = attach_stats(right, ds.labels[ri], k)
            leaves[next_id] = (left, li)
            leaves[next_id + 1] = (right, ri)
            preds[li] = left.label
            preds[ri] = right.label

            if cfg.unweighted_updates:
                a0 += (
                    purity(left.class_histogram)
                    + purity(right.class_histogram)
                    - purity(rule0.class_histogram)
                )
            else:
                a0 += cand.delta_E
            b0 += cand.delta_L

            for rid, (rule, idx) in ((next_id, (left, li)), (next_id + 1, (right, ri))):
                child = best_candidate(rule, ds, idx, cfg.len_max, rule_id=rid, epsilon=cfg.epsilon)
                if child is not None:
                    heap.push(child)
            next_id += 2

            if max_total_length is not None and b0 >= max_total_length:
                budget_hit = True
                break

        score = score_labels(cfg.score, ds.labels, preds)
        trace.rows.append(TraceRow(iteration, stabilizer, len(leaves), int(round(b0)), score))
        if score > best_score:
            best_score = score
            best_rules = [rule for rule, _ in leaves.values()]
            stall = 0
        else:
            stall += 1

    rules = best_rules if trace.stalled else [rule for rule, _ in leaves.values()]
    final_score = best_score if trace.stalled else score
    trace.reached_target = final_score > cfg.f1_min
    return make_ruleset(rules, ds.attributes), trace


@dataclass(frozen=True)
class ValidSplit:
    rule_index: int
    attr: int
    threshold: float
    delta_L: int
    delta_E: float
    objective: float


def _ruleset_leaves(ds: Dataset, ruleset: RuleSet | None) -> list[tuple[Rule, np.ndarray]]:
    if ruleset is None:
        root = make_rule({}, np.bincount(ds.labels, minlength=ds.class_count))
        return [(root, np.arange(ds.n))]
    assignment = assign_rules(ruleset, ds.features)
    if np.any(assignment < 0):
        raise ValueError("rule set does not cover the dataset")
    return [(r, np.flatnonzero(assignment == i)) for i, r in enumerate(ruleset.rules)]


def best_valid_split(
    ds: Dataset,
    stabilizer: float,
    *,
    ruleset: RuleSet | None = None,
    len_max: int | None = None,
    epsilon: float = EPSILON,
) -> ValidSplit | None:
    """Objective-maximizing valid split of a rule set at a fixed stabilizer.

    Enumerates every (rule, attribute, threshold) candidate, evaluates the
    post-split objective, and returns the maximizer if it strictly improves
    on the current objective; None otherwise.
    """
    leaves = _ruleset_leaves(ds, ruleset)
    len_bound = len_max if len_max is not None else ds.d
    a0 = sum(r.n_covered * purity(r.class_histogram) for r, _ in leaves)
    b0 = float(sum(r.length() for r, _ in leaves))
    if b0 + stabilizer <= 0.0:
        current = -np.inf  # bare root at M = 0: any valid split improves
    else:
        current = a0 / (b0 + stabilizer)

    best: ValidSplit | None = None
    for rule_index, (rule, idx) in enumerate(leaves):
        if idx.shape[0] < 2:
            continue
        labels = ds.labels[idx]
        for attr in range(ds.d):
            constrained = attr in rule.predicates
            if not constrained and rule.length() + 1 > len_bound:
                continue
            delta_l = rule.length() if constrained else rule.length() + 2
            thresholds, delta_e, _ = split_deltas(
                rule, attr, ds.features[idx, attr], labels, ds.class_count
            )
            ok = delta_e > epsilon
            if not np.any(ok):
                continue
            objs = (a0 + delta_e[ok]) / (b0 + delta_l + stabilizer)
            thr = thresholds[ok]
            pick = np.lexsort((thr, -objs))[0]
            if best is None or objs[pick] > best.objective:
                best = ValidSplit(
                    rule_index=rule_index,
                    attr=attr,
                    threshold=float(thr[pick]),
                    delta_L=int(delta_l),
                    delta_E=float(delta_e[ok][pick]),
                    objective=float(objs[pick]),
                )
    if best is None or best.objective <= current:
        return None
    return best


def verify_monotonicity(
    ds: Dataset,
    m_a: float,
    m_b: float,
    *,
    ruleset: RuleSet | None = None,
    len_max: int | None = None,
) -> bool:
    """Check that raising the stabilizer lowers the best achievable objective.

    With m_a > m_b and both objective-maximizing valid splits existing, the
    post-split objective under m_a must come out strictly below the one under
    m_b. Vacuously true when either split is missing.
    """
    split_a = best_valid_split(ds, m_a, ruleset=ruleset, len_max=len_max)
    split_b = best_valid_split(ds, m_b, ruleset=ruleset, len_max=len_max)
    if split_a is None or split_b is None:
        return True
    if m_a == m_b:
        return split_a.objective == split_b.objective
    return split_a.objective < split_b.objective
