"""Localized rule learning: joint data partitioning and per-partition trees.

Each partition carries its own rule set. The partitioning objective charges a
point its tree's squared prediction error plus lambda times its squared
distance to the partition center, with distances taken in standardized
feature space so the two terms stay scale-commensurate. Reassignment moves
every point to the partition minimizing that per-point cost, which can only
lower the objective; partitions whose training score stays below the
threshold get split by k-means, which also never raises either term.

The rule sets themselves are learned on raw (unstandardized) features so the
reported rules stay in the original units.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, StandardizationParams, standardize
from .metrics import score_labels
from .rules import RuleSet, make_ruleset, predict, predict_many, ruleset_from_doc, ruleset_to_doc
from .stair import StairConfig, stair_fit

LSTAIR_FORMAT = "lstair"
LSTAIR_VERSION = 1

_DESCENT_TOL = 1e-9


@dataclass
class Partitioning:
    assignments: np.ndarray  # (N,) partition id per point
    centers: np.ndarray  # (P, d) means in standardized space

    @property
    def count(self) -> int:
        return self.centers.shape[0]

    def members(self, p: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == p)


@dataclass
class LStairModel:
    partitioning: Partitioning
    trees: list[RuleSet]
    standardization: StandardizationParams
    lam: float

    def total_length(self) -> int:
        return sum(t.total_length() for t in self.trees)

    def rule_count(self) -> int:
        return sum(len(t) for t in self.trees)


@dataclass(frozen=True)
class LStairTraceRow:
    iteration: int
    objective_after_trees: float
    objective_after_reassign: float
    objective_after_cleanup: float
    objective_after_split: float | None
    partition_count: int
    score: float
    total_length: int


@dataclass
class LStairTrace:
    rows: list[LStairTraceRow] = field(default_factory=list)
    reached_target: bool = False


def kmeans(points: np.ndarray, k: int, rng: np.random.Generator, max_iter: int = 100):
    """Plain k-means with k-means++ seeding; empty clusters are dropped.

    Returns (assignments, centers) with at most k clusters. Deterministic for
    a given generator state.
    """
    n = points.shape[0]
    k = min(k, n)
    centers = [points[rng.integers(n)]]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            break
        centers.append(points[rng.choice(n, p=d2 / total)])
        d2 = np.minimum(d2, np.sum((points - centers[-1]) ** 2, axis=1))
    centers = np.array(centers)

    assignments = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        dists = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_assign = np.argmin(dists, axis=1)
        live = np.unique(new_assign)
        if live.size < centers.shape[0]:
            remap = {old: new for new, old in enumerate(live)}
            new_assign = np.array([remap[a] for a in new_assign], dtype=np.int64)
            centers = centers[live]
        centers = np.array([points[new_assign == p].mean(axis=0) for p in range(centers.shape[0])])
        if np.array_equal(new_assign, assignments):
            break
        assignments = new_assign
    return assignments, centers


def _mis_cost(class_count: int) -> float:
    # squared distance between the label encodings: scalar 0/1 for binary,
    # one-hot for multi-class
    return 1.0 if class_count <= 2 else 2.0


def _tree_errors(model: LStairModel, ds: Dataset) -> np.ndarray:
    """(N, P) matrix of squared prediction errors of every tree on every point."""
    cost = _mis_cost(ds.class_count)
    errors = np.empty((ds.n, len(model.trees)))
    for p, tree in enumerate(model.trees):
        preds = predict_many(tree, ds.features)
        errors[:, p] = cost * (preds != ds.labels)
    return errors


def partition_objective(model: LStairModel, ds: Dataset) -> float:
    """Sum over points of tree error plus lambda-weighted squared distance to
    the assigned partition's center (standardized space)."""
    z = model.standardization.transform(ds.features)
    if z.shape[1] != model.partitioning.centers.shape[1]:
        raise ValueError("model and dataset dimensionality differ")
    cost = _mis_cost(ds.class_count)
    assign = model.partitioning.assignments
    total = 0.0
    for p, tree in enumerate(model.trees):
        members = np.flatnonzero(assign == p)
        if members.size == 0:
            continue
        preds = predict_many(tree, ds.features[members])
        err = cost * np.sum(preds != ds.labels[members])
        loc = np.sum((z[members] - model.partitioning.centers[p]) ** 2)
        total += err + model.lam * loc
    return float(total)


def reassign(model: LStairModel, ds: Dataset) -> Partitioning:
    """Move each point to its cost-minimizing partition (ties go to the
    smaller id), then recompute centers. Empty partitions keep their center
    and are cleaned up by the caller."""
    z = model.standardization.transform(ds.features)
    centers = model.partitioning.centers
    dist2 = np.sum((z[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    costs = _tree_errors(model, ds) + model.lam * dist2
    assignments = np.argmin(costs, axis=1).astype(np.int64)
    new_centers = centers.copy()
    for p in range(centers.shape[0]):
        members = assignments == p
        if np.any(members):
            new_centers[p] = z[members].mean(axis=0)
    return Partitioning(assignments, new_centers)


def _drop_empty(part: Partitioning, trees: list[RuleSet]) -> tuple[Partitioning, list[RuleSet]]:
    live = [p for p in range(part.count) if np.any(part.assignments == p)]
    if len(live) == part.count:
        return part, trees
    remap = {old: new for new, old in enumerate(live)}
    assignments = np.array([remap[a] for a in part.assignments], dtype=np.int64)
    return Partitioning(assignments, part.centers[live]), [trees[p] for p in live]


def _global_predictions(model: LStairModel, ds: Dataset) -> np.ndarray:
    preds = np.empty(ds.n, dtype=np.int64)
    for p, tree in enumerate(model.trees):
        members = model.partitioning.members(p)
        if members.size:
            preds[members] = predict_many(tree, ds.features[members])
    return preds


def _check_descent(before: float, after: float, step: str) -> None:
    if after > before + _DESCENT_TOL * max(1.0, abs(before)):
        raise AssertionError(
            f"partition objective increased during {step}: {before!r} -> {after!r}"
        )


def lstair_fit(
    ds: Dataset,
    cfg: StairConfig,
    n_init: int = 2,
    lam: float = 0.1,
    max_iter: int = 10,
    seed: int = 0,
    *,
    split_count: int = 2,
    merge_redundant: bool = False,
) -> tuple[LStairModel, LStairTrace]:
    """Alternate per-partition rule learning, point reassignment, empty-
    partition cleanup, and splitting of partitions that score too low.

    split_count controls how many pieces a low-scoring partition splits into.
    """
    cfg.validate()
    if n_init < 1:
        raise ValueError(f"n_init must be >= 1, got {n_init}")
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must be in (0, 1), got {lam}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")

    _, params = standardize(ds)
    z = params.transform(ds.features)
    rng = np.random.default_rng(seed)
    assignments, centers = kmeans(z, n_init, rng)
    part = Partitioning(assignments, centers)
    trees: list[RuleSet] = [make_ruleset([], ds.attributes) for _ in range(part.count)]
    model = LStairModel(part, trees, params, lam)
    trace = LStairTrace()

    for iteration in range(1, max_iter + 1):
        model.trees = [
            stair_fit(ds.subset(model.partitioning.members(p)), cfg)[0]
            for p in range(model.partitioning.count)
        ]
        obj_trees = partition_objective(model, ds)

        model.partitioning = reassign(model, ds)
        obj_reassign = partition_objective(model, ds)
        _check_descent(obj_trees, obj_reassign, "reassign")

        model.partitioning, model.trees = _drop_empty(model.partitioning, model.trees)
        obj_cleanup = partition_objective(model, ds)
        _check_descent(obj_reassign, obj_cleanup, "empty-partition removal")

        preds = _global_predictions(model, ds)
        score = score_labels(cfg.score, ds.labels, preds)

        obj_split = None
        if score > cfg.f1_min:
            trace.reached_target = True
        else:
            if _split_bad_partitions(model, ds, z, preds, cfg, split_count, rng):
                obj_split = partition_objective(model, ds)
                _check_descent(obj_cleanup, obj_split, "partition split")

        trace.rows.append(
            LStairTraceRow(
                iteration=iteration,
                objective_after_trees=obj_trees,
                objective_after_reassign=obj_reassign,
                objective_after_cleanup=obj_cleanup,
                objective_after_split=obj_split,
                partition_count=model.partitioning.count,
                score=score,
                total_length=model.total_length(),
            )
        )
        if trace.reached_target:
            break

    if merge_redundant:
        merge_redundant_partitions(model, ds)
    return model, trace


def _split_bad_partitions(
    model: LStairModel,
    ds: Dataset,
    z: np.ndarray,
    preds: np.ndarray,
    cfg: StairConfig,
    split_count: int,
    rng: np.random.Generator,
) -> bool:
    """Split every partition whose own score stays at or below the threshold
    into split_count k-means sub-partitions. New sub-partitions inherit the
    parent's tree until the next rebuild, so the error term is unchanged and
    the locality term can only shrink. Returns True if anything split."""
    part = model.partitioning
    changed = False
    assignments = part.assignments.copy()
    centers = list(part.centers)
    trees = list(model.trees)
    next_id = part.count
    for p in range(part.count):
        members = part.members(p)
        if members.size < 2:
            continue
        pscore = score_labels(cfg.score, ds.labels[members], preds[members])
        if pscore > cfg.f1_min:
            continue
        sub_assign, sub_centers = kmeans(z[members], split_count, rng)
        if sub_centers.shape[0] < 2:
            continue
        changed = True
        centers[p] = sub_centers[0]
        for s in range(1, sub_centers.shape[0]):
            centers.append(sub_centers[s])
            trees.append(trees[p])
            assignments[members[sub_assign == s]] = next_id
            next_id += 1
    if changed:
        model.partitioning = Partitioning(assignments, np.array(centers))
        model.trees = trees
    return changed


def merge_redundant_partitions(model: LStairModel, ds: Dataset) -> int:
    """Optional post-pass: try to dissolve each partition by reassigning its
    points to the best remaining partition; keep the merge only if the
    partitioning objective does not increase. Returns merges performed."""
    merged = 0
    z = model.standardization.transform(ds.features)
    p = 0
    while model.partitioning.count > 1 and p < model.partitioning.count:
        base = partition_objective(model, ds)
        part = model.partitioning
        dist2 = np.sum((z[:, None, :] - part.centers[None, :, :]) ** 2, axis=2)
        costs = _tree_errors(model, ds) + model.lam * dist2
        costs[:, p] = np.inf
        assignments = np.argmin(costs, axis=1).astype(np.int64)
        keep = part.assignments != p
        trial_assign = part.assignments.copy()
        trial_assign[~keep] = assignments[~keep]
        trial = LStairModel(
            Partitioning(trial_assign, part.centers.copy()),
            list(model.trees),
            model.standardization,
            model.lam,
        )
        for q in range(part.count):
            members = trial_assign == q
            if np.any(members):
                trial.partitioning.centers[q] = z[members].mean(axis=0)
        trial.partitioning, trial.trees = _drop_empty(trial.partitioning, trial.trees)
        if partition_objective(trial, ds) <= base:
            model.partitioning = trial.partitioning
            model.trees = trial.trees
            merged += 1
        else:
            p += 1
    return merged


def lstair_predict(model: LStairModel, x) -> int:
    """Assign to the nearest center (standardized distance only), then
    predict with that partition's rule set."""
    x = np.asarray(x, dtype=np.float64)
    z = model.standardization.transform(x[None, :])[0]
    d2 = np.sum((model.partitioning.centers - z) ** 2, axis=1)
    return predict(model.trees[int(np.argmin(d2))], x)


def lstair_predict_many(model: LStairModel, features: np.ndarray) -> np.ndarray:
    z = model.standardization.transform(features)
    d2 = np.sum((z[:, None, :] - model.partitioning.centers[None, :, :]) ** 2, axis=2)
    nearest = np.argmin(d2, axis=1)
    preds = np.empty(features.shape[0], dtype=np.int64)
    for p in range(model.partitioning.count):
        members = nearest == p
        if np.any(members):
            preds[members] = predict_many(model.trees[p], features[members])
    return preds


def model_to_doc(model: LStairModel) -> dict:
    return {
        "format": LSTAIR_FORMAT,
        "version": LSTAIR_VERSION,
        "lambda": model.lam,
        "standardization": {
            "mean": model.standardization.mean.tolist(),
            "std": model.standardization.std.tolist(),
        },
        "centers": model.partitioning.centers.tolist(),
        "assignments": model.partitioning.assignments.tolist(),
        "trees": [ruleset_to_doc(t) for t in model.trees],
    }


def model_from_doc(doc: dict) -> LStairModel:
    if not isinstance(doc, dict) or doc.get("format") != LSTAIR_FORMAT:
        raise ValueError("not a localized model document")
    if doc.get("version") != LSTAIR_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    trees = [ruleset_from_doc(t) for t in doc["trees"]]
    centers = np.asarray(doc["centers"], dtype=np.float64)
    if len(trees) != centers.shape[0]:
        raise ValueError("tree count does not match partition count")
    return LStairModel(
        partitioning=Partitioning(
            assignments=np.asarray(doc["assignments"], dtype=np.int64),
            centers=centers,
        ),
        trees=trees,
        standardization=StandardizationParams(
            mean=np.asarray(doc["standardization"]["mean"], dtype=np.float64),
            std=np.asarray(doc["standardization"]["std"], dtype=np.float64),
        ),
        lam=float(doc["lambda"]),
    )


def save_model(model: LStairModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_doc(model), fh, indent=1)


def load_model(path) -> LStairModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_doc(json.load(fh))


def export_assignments(model: LStairModel, path) -> None:
    """Partition id per training row as a one-column CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("partition\n")
        for a in model.partitioning.assignments:
            fh.write(f"{int(a)}\n")
