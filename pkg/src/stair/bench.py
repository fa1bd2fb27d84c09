"""Benchmark harness: complexity-versus-score comparisons at desk scale.

Each run produces a BenchReport whose rows are fully recomputable from the
artifacts (rule-set/model exports and training traces) written next to the
report. Reports go out as TSV plus a rendered text table.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baselines import MAX_SWEEP_DEPTH, cart_fit, cart_prune_to_length, id3_fit_depth, id3_sweep
from .dataset import Dataset
from .lstair import lstair_fit, model_to_doc
from .metrics import score_labels
from .rules import RuleSet, make_rule, make_ruleset, predict_many, ruleset_to_doc
from .stair import StairConfig, stair_fit

LSTAIR_INITS = (2, 4, 8)


@dataclass
class BenchRow:
    method: str
    dataset: str
    f1_min: float
    len_max: int | None
    total_length: int
    rule_count: int
    partition_count: int
    score: float
    wall_time: float
    budget: int | None = None
    flags: str = ""
    artifact: str = ""


@dataclass
class BenchReport:
    name: str
    rows: list[BenchRow] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    artifacts: dict[str, object] = field(default_factory=dict)

    COLUMNS = (
        "method",
        "dataset",
        "f1_min",
        "len_max",
        "budget",
        "total_length",
        "rule_count",
        "partition_count",
        "score",
        "wall_time",
        "flags",
        "artifact",
    )

    def row(self, method: str) -> BenchRow:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)

    def to_tsv(self) -> str:
        lines = ["\t".join(self.COLUMNS)]
        for r in self.rows:
            rec = asdict(r)
            lines.append(
                "\t".join("" if rec[c] is None else str(rec[c]) for c in self.COLUMNS)
            )
        return "\n".join(lines) + "\n"

    def render(self) -> str:
        cells = [list(self.COLUMNS)]
        for r in self.rows:
            rec = asdict(r)
            cells.append(
                [
                    f"{rec[c]:.4f}" if isinstance(rec[c], float) else str(rec[c] or "")
                    for c in self.COLUMNS
                ]
            )
        widths = [max(len(row[i]) for row in cells) for i in range(len(self.COLUMNS))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
        lines.insert(1, "-" * len(lines[0]))
        return "\n".join(lines) + "\n"

    def save(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.tsv").write_text(self.to_tsv(), encoding="utf-8")
        (out / "report.txt").write_text(self.render(), encoding="utf-8")
        payload = {"name": self.name, "config": self.config, "notes": self.notes}
        (out / "config.json").write_text(json.dumps(payload, indent=1), encoding="utf-8")
        for fname, doc in self.artifacts.items():
            path = out / fname
            if isinstance(doc, str):
                path.write_text(doc, encoding="utf-8")
            else:
                path.write_text(json.dumps(doc, indent=1), encoding="utf-8")


def _score_ruleset(ds: Dataset, rs: RuleSet, score: str) -> float:
    return score_labels(score, ds.labels, predict_many(rs, ds.features))


def _ruleset_row(
    report: BenchReport,
    method: str,
    ds: Dataset,
    name: str,
    rs: RuleSet,
    f1_min: float,
    len_max: int | None,
    score_kind: str,
    wall: float,
    reached: bool,
    budget: int | None = None,
    trace_text: str | None = None,
) -> BenchRow:
    artifact = f"rules_{method}.json".replace("[", "_").replace("]", "").replace("=", "")
    report.artifacts[artifact] = ruleset_to_doc(rs)
    if trace_text is not None:
        report.artifacts[artifact.replace("rules_", "trace_").replace(".json", ".tsv")] = trace_text
    row = BenchRow(
        method=method,
        dataset=name,
        f1_min=f1_min,
        len_max=len_max,
        total_length=rs.total_length(),
        rule_count=len(rs),
        partition_count=1,
        score=_score_ruleset(ds, rs, score_kind),
        wall_time=wall,
        budget=budget,
        flags="" if reached else "below_threshold",
        artifact=artifact,
    )
    report.rows.append(row)
    return row


def run_length_comparison(
    ds: Dataset,
    name: str = "data",
    f1_min: float = 0.8,
    len_max: int = 10,
    seed: int = 0,
    score: str = "f1",
    lstair_inits: tuple[int, ...] = LSTAIR_INITS,
    out_dir=None,
) -> BenchReport:
    """Total rule length of every method at a shared score threshold.

    The localized learner runs once per initial partition count; the summary
    'lstair' row is the best of those (lowest total length among runs that
    reached the threshold, else the highest score).
    """
    report = BenchReport(
        name=f"length-comparison[{name}]",
        config={
            "dataset": name,
            "f1_min": f1_min,
            "len_max": len_max,
            "seed": seed,
            "score": score,
            "lstair_inits": list(lstair_inits),
        },
    )
    cfg = StairConfig(f1_min=f1_min, len_max=len_max, score=score)

    t0 = time.perf_counter()
    rs, reached = id3_sweep(ds, f1_min, score=score)
    _ruleset_row(report, "id3", ds, name, rs, f1_min, None, score, time.perf_counter() - t0, reached)

    t0 = time.perf_counter()
    rs, reached = cart_fit(ds, f1_min, score=score)
    _ruleset_row(report, "cart", ds, name, rs, f1_min, None, score, time.perf_counter() - t0, reached)

    t0 = time.perf_counter()
    rs, trace = stair_fit(ds, cfg)
    _ruleset_row(
        report,
        "stair",
        ds,
        name,
        rs,
        f1_min,
        len_max,
        score,
        time.perf_counter() - t0,
        trace.reached_target,
        trace_text=trace.to_tsv(),
    )

    lstair_rows = []
    for n_init in lstair_inits:
        t0 = time.perf_counter()
        model, ltrace = lstair_fit(ds, cfg, n_init=n_init, seed=seed)
        wall = time.perf_counter() - t0
        method = f"lstair[n={n_init}]"
        artifact = f"model_lstair_n{n_init}.json"
        report.artifacts[artifact] = model_to_doc(model)
        row = BenchRow(
            method=method,
            dataset=name,
            f1_min=f1_min,
            len_max=len_max,
            total_length=model.total_length(),
            rule_count=model.rule_count(),
            partition_count=model.partitioning.count,
            score=ltrace.rows[-1].score if ltrace.rows else 0.0,
            wall_time=wall,
            flags="" if ltrace.reached_target else "below_threshold",
            artifact=artifact,
        )
        report.rows.append(row)
        lstair_rows.append(row)

    reached_rows = [r for r in lstair_rows if not r.flags]
    pool = reached_rows or lstair_rows
    best = min(pool, key=lambda r: r.total_length) if reached_rows else max(pool, key=lambda r: r.score)
    report.rows.append(
        BenchRow(
            method="lstair",
            dataset=name,
            f1_min=f1_min,
            len_max=len_max,
            total_length=best.total_length,
            rule_count=best.rule_count,
            partition_count=best.partition_count,
            score=best.score,
            wall_time=sum(r.wall_time for r in lstair_rows),
            flags=best.flags,
            artifact=best.artifact,
        )
    )

    if out_dir is not None:
        report.save(out_dir)
    return report


def _root_ruleset(ds: Dataset) -> RuleSet:
    root = make_rule({}, np.bincount(ds.labels, minlength=ds.class_count))
    return make_ruleset([root], ds.attributes)


def _id3_within_budget(ds: Dataset, budget: int) -> RuleSet:
    """Deepest greedy-gain tree whose total rule length stays within budget."""
    best = _root_ruleset(ds)
    prev = None
    for depth in range(1, MAX_SWEEP_DEPTH + 1):
        rs = id3_fit_depth(ds, depth)
        if rs.total_length() > budget:
            break
        best = rs
        if prev is not None and rs.total_length() == prev.total_length() and len(rs) == len(prev):
            break  # saturated: extra depth changes nothing
        prev = rs
    return best


def run_f1_vs_length(
    ds: Dataset,
    budgets: list[int],
    name: str = "data",
    score: str = "f1",
    len_max: int = 10,
    out_dir=None,
) -> BenchReport:
    """Training score of each method at a series of total-length budgets.

    The depth-swept tree takes the deepest build that stays within budget,
    the pruned tree collapses down to the budget, and the ratio-objective
    learner stops as soon as its total length reaches the budget.
    """
    report = BenchReport(
        name=f"f1-vs-length[{name}]",
        config={"dataset": name, "budgets": list(budgets), "score": score, "len_max": len_max},
    )
    stair_scores: list[float] = []
    for budget in budgets:
        t0 = time.perf_counter()
        rs = _id3_within_budget(ds, budget)
        _ruleset_row(
            report, f"id3@{budget}", ds, name, rs, 0.0, None, score,
            time.perf_counter() - t0, True, budget=budget,
        )

        t0 = time.perf_counter()
        rs = cart_prune_to_length(ds, budget, score=score)
        _ruleset_row(
            report, f"cart@{budget}", ds, name, rs, 0.0, None, score,
            time.perf_counter() - t0, True, budget=budget,
        )

        t0 = time.perf_counter()
        cfg = StairConfig(f1_min=1.0, len_max=len_max, score=score)
        rs, trace = stair_fit(ds, cfg, max_total_length=budget)
        row = _ruleset_row(
            report, f"stair@{budget}", ds, name, rs, 0.0, len_max, score,
            time.perf_counter() - t0, True, budget=budget,
            trace_text=trace.to_tsv(),
        )
        stair_scores.append(row.score)

    for prev, cur, budget in zip(stair_scores, stair_scores[1:], budgets[1:]):
        if cur < prev - 1e-12:
            report.notes.append(
                f"stair score decreased from {prev} to {cur} at budget {budget}"
            )

    if out_dir is not None:
        report.save(out_dir)
    return report


def run_sweeps(
    ds: Dataset,
    lm_values=(2, 4, 6, 8, 10, 12),
    f1m_values=(0.70, 0.75, 0.80, 0.85, 0.90, 0.95),
    name: str = "data",
    f1_min: float = 0.8,
    len_max: int = 10,
    seed: int = 0,
    score: str = "f1",
    out_dir=None,
) -> BenchReport:
    """Grid sweep: rule-length bound for the ratio-objective learners at a
    fixed score threshold, then score threshold for every method at a fixed
    length bound. Cells that miss their threshold are flagged, not dropped."""
    report = BenchReport(
        name=f"sweeps[{name}]",
        config={
            "dataset": name,
            "lm_values": list(lm_values),
            "f1m_values": list(f1m_values),
            "f1_min": f1_min,
            "len_max": len_max,
            "seed": seed,
            "score": score,
        },
    )

    stair_by_lm: list[tuple[int, BenchRow]] = []
    for lm in lm_values:
        cfg = StairConfig(f1_min=f1_min, len_max=lm, score=score)
        t0 = time.perf_counter()
        rs, trace = stair_fit(ds, cfg)
        row = _ruleset_row(
            report, f"stair@lm{lm}", ds, name, rs, f1_min, lm, score,
            time.perf_counter() - t0, trace.reached_target,
        )
        stair_by_lm.append((lm, row))

        t0 = time.perf_counter()
        model, ltrace = lstair_fit(ds, cfg, seed=seed)
        artifact = f"model_lstair_lm{lm}.json"
        report.artifacts[artifact] = model_to_doc(model)
        report.rows.append(
            BenchRow(
                method=f"lstair@lm{lm}",
                dataset=name,
                f1_min=f1_min,
                len_max=lm,
                total_length=model.total_length(),
                rule_count=model.rule_count(),
                partition_count=model.partitioning.count,
                score=ltrace.rows[-1].score if ltrace.rows else 0.0,
                wall_time=time.perf_counter() - t0,
                flags="" if ltrace.reached_target else "below_threshold",
                artifact=artifact,
            )
        )

    feasible = [(lm, row) for lm, row in stair_by_lm if not row.flags]
    for (lm_a, row_a), (lm_b, row_b) in zip(feasible, feasible[1:]):
        if row_b.total_length > row_a.total_length:
            report.notes.append(
                f"total length grew from {row_a.total_length} (len_max {lm_a}) "
                f"to {row_b.total_length} (len_max {lm_b})"
            )

    for f1m in f1m_values:
        cfg = StairConfig(f1_min=f1m, len_max=len_max, score=score)
        t0 = time.perf_counter()
        rs, reached = id3_sweep(ds, f1m, score=score)
        _ruleset_row(
            report, f"id3@f1m{f1m}", ds, name, rs, f1m, None, score,
            time.perf_counter() - t0, reached,
        )
        t0 = time.perf_counter()
        rs, reached = cart_fit(ds, f1m, score=score)
        _ruleset_row(
            report, f"cart@f1m{f1m}", ds, name, rs, f1m, None, score,
            time.perf_counter() - t0, reached,
        )
        t0 = time.perf_counter()
        rs, trace = stair_fit(ds, cfg)
        _ruleset_row(
            report, f"stair@f1m{f1m}", ds, name, rs, f1m, len_max, score,
            time.perf_counter() - t0, trace.reached_target,
        )
        t0 = time.perf_counter()
        model, ltrace = lstair_fit(ds, cfg, seed=seed)
        artifact = f"model_lstair_f1m{f1m}.json"
        report.artifacts[artifact] = model_to_doc(model)
        report.rows.append(
            BenchRow(
                method=f"lstair@f1m{f1m}",
                dataset=name,
                f1_min=f1m,
                len_max=len_max,
                total_length=model.total_length(),
                rule_count=model.rule_count(),
                partition_count=model.partitioning.count,
                score=ltrace.rows[-1].score if ltrace.rows else 0.0,
                wall_time=time.perf_counter() - t0,
                flags="" if ltrace.reached_target else "below_threshold",
                artifact=artifact,
            )
        )

    if out_dir is not None:
        report.save(out_dir)
    return report
