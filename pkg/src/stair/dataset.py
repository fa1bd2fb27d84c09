"""Labeled numeric datasets: CSV loading, standardization, synthetic generators.

A Dataset is an immutable bundle of named numeric features plus integer class
labels (0 = inlier, 1 = outlier for the binary case). All learners in this
package consume Datasets; none of them mutate one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed input files or invariant violations."""


@dataclass(frozen=True)
class Dataset:
    attributes: tuple[str, ...]
    features: np.ndarray  # (N, d) float64, finite
    labels: np.ndarray  # (N,) int64 in [0, class_count)
    class_count: int

    def __post_init__(self):
        if self.features.ndim != 2:
            raise DatasetError("features must be a 2-d matrix")
        n, d = self.features.shape
        if n < 1 or d < 1:
            raise DatasetError("dataset needs at least one row and one column")
        if d != len(self.attributes):
            raise DatasetError(
                f"{len(self.attributes)} attribute names for {d} feature columns"
            )
        if not np.all(np.isfinite(self.features)):
            i, j = np.argwhere(~np.isfinite(self.features))[0]
            raise DatasetError(
                f"non-finite feature value at row {i}, column '{self.attributes[j]}'"
            )
        if self.labels.shape != (n,):
            raise DatasetError("labels must be a vector with one entry per row")
        if self.class_count < 2:
            raise DatasetError("class_count must be at least 2")
        if self.labels.min() < 0 or self.labels.max() >= self.class_count:
            raise DatasetError(
                f"labels must lie in [0, {self.class_count}); "
                f"found range [{self.labels.min()}, {self.labels.max()}]"
            )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "Dataset":
        """Row subset sharing attribute names and class_count."""
        return Dataset(
            self.attributes,
            self.features[indices],
            self.labels[indices],
            self.class_count,
        )


@dataclass(frozen=True)
class StandardizationParams:
    """Per-attribute mean/std for z-scoring; std stored as 1 for constant columns."""

    mean: np.ndarray
    std: np.ndarray

    def transform(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.std


def make_dataset(attributes, features, labels, class_count: int | None = None) -> Dataset:
    """Build a Dataset from array-likes, inferring class_count when omitted."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if class_count is None:
        class_count = max(2, int(labels.max()) + 1) if labels.size else 2
    return Dataset(tuple(attributes), features, labels, class_count)


def load_csv(path, label_column: str = "label") -> Dataset:
    """Load an RFC-4180 style CSV with a header row into a Dataset.

    The label column is removed from the features; remaining column order is
    preserved. Errors carry row/column context.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: file is empty") from None
        if label_column not in header:
            raise DatasetError(f"{path}: no column named '{label_column}' in header")
        label_idx = header.index(label_column)
        attributes = [h for i, h in enumerate(header) if i != label_idx]
        if not attributes:
            raise DatasetError(f"{path}: no feature columns besides '{label_column}'")

        rows: list[list[float]] = []
        labels: list[int] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}"
                )
            raw_label = row[label_idx]
            try:
                label = int(raw_label)
            except ValueError:
                raise DatasetError(
                    f"{path}: row {lineno}, column '{label_column}': "
                    f"label '{raw_label}' is not an integer"
                ) from None
            if label < 0:
                raise DatasetError(
                    f"{path}: row {lineno}: negative label {label}"
                )
            feats = []
            for i, cell in enumerate(row):
                if i == label_idx:
                    continue
                name = header[i]
                try:
                    value = float(cell)
                except ValueError:
                    raise DatasetError(
                        f"{path}: row {lineno}, column '{name}': "
                        f"'{cell}' is not numeric"
                    ) from None
                if not np.isfinite(value):
                    raise DatasetError(
                        f"{path}: row {lineno}, column '{name}': "
                        f"non-finite value '{cell}'"
                    )
                feats.append(value)
            rows.append(feats)
            labels.append(label)

    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return make_dataset(attributes, rows, labels)


def save_csv(ds: Dataset, path, label_column: str = "label") -> None:
    """Write a Dataset back to CSV with full round-trip float precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.attributes) + [label_column])
        for i in range(ds.n):
            writer.writerow([repr(float(v)) for v in ds.features[i]] + [int(ds.labels[i])])


def standardize(ds: Dataset) -> tuple[Dataset, StandardizationParams]:
    """Z-score each column (population std); constant columns map to zeros."""
    mean = ds.features.mean(axis=0)
    std = ds.features.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    params = StandardizationParams(mean=mean, std=std)
    return (
        Dataset(ds.attributes, params.transform(ds.features), ds.labels, ds.class_count),
        params,
    )


def gen_band2d(n_in: int, n_out: int, seed: int) -> Dataset:
    """Two-dimensional band dataset: inliers in a central x1 band, outliers in
    two flanking bands, x2 uninformative. Linearly separable on x1 at +/-2."""
    if n_in < 1 or n_out < 1:
        raise ValueError("need at least one inlier and one outlier")
    rng = np.random.default_rng(seed)
    n_right = (n_out + 1) // 2
    n_left = n_out - n_right
    x1 = np.concatenate(
        [
            rng.uniform(-2.0, 2.0, size=n_in),
            rng.uniform(2.0, 6.0, size=n_right),
            rng.uniform(-6.0, -2.0, size=n_left),
        ]
    )
    x2 = rng.uniform(-5.0, 5.0, size=n_in + n_out)
    labels = np.concatenate([np.zeros(n_in, dtype=np.int64), np.ones(n_out, dtype=np.int64)])
    return Dataset(("x1", "x2"), np.column_stack([x1, x2]), labels, 2)


def gen_blobs(n_per_class: int, class_count: int, seed: int, d: int = 2, spread: float = 6.0) -> Dataset:
    """Well-separated Gaussian blobs, one per class, for multi-class smoke tests."""
    if n_per_class < 1 or class_count < 2 or d < 1:
        raise ValueError("invalid blob shape")
    rng = np.random.default_rng(seed)
    feats, labels = [], []
    for c in range(class_count):
        center = np.zeros(d)
        center[c % d] = spread * (1 + c // d)
        feats.append(rng.normal(center, 1.0, size=(n_per_class, d)))
        labels.append(np.full(n_per_class, c, dtype=np.int64))
    return Dataset(
        tuple(f"x{j + 1}" for j in range(d)),
        np.vstack(feats),
        np.concatenate(labels),
        class_count,
    )


def gen_pima_like(seed: int = 0) -> Dataset:
    """Synthetic stand-in for a 768x8 diabetes-style benchmark (~35% outliers).

    Inliers come from two overlapping blobs. Outliers form three subgroups:
    one separable on a single attribute, one needing a two-attribute
    conjunction, and one sitting closer to the inlier mass so that shallow
    trees misclassify part of it. A small slice of boundary outliers is kept
    deliberately ambiguous, which keeps greedy depth-limited trees busy.
    """
    rng = np.random.default_rng(seed)
    d = 8
    n_in, n_g1, n_g2, n_g3 = 500, 96, 96, 76

    def background(n, which=None):
        if which is None:
            which = np.where(rng.random(n) < 0.5, -0.8, 0.8)[:, None]
        return which + rng.normal(0.0, 1.0, size=(n, d))

    inliers = background(n_in)

    g1 = background(n_g1, which=0.8)
    g1[:, 0] = rng.uniform(3.5, 6.5, size=n_g1)

    g2 = background(n_g2, which=-0.8)
    g2[:, 1] = rng.uniform(3.0, 6.0, size=n_g2)
    g2[:, 2] = rng.uniform(-6.0, -3.0, size=n_g2)

    g3 = background(n_g3, which=0.8)
    g3[:, 3] = rng.uniform(2.2, 4.2, size=n_g3)
    g3[:, 4] = rng.uniform(1.8, 3.8, size=n_g3)

    features = np.vstack([inliers, g1, g2, g3])
    labels = np.concatenate(
        [
            np.zeros(n_in, dtype=np.int64),
            np.ones(n_g1 + n_g2 + n_g3, dtype=np.int64),
        ]
    )
    return Dataset(tuple(f"x{j + 1}" for j in range(d)), features, labels, 2)
