"""Shared test helpers: random dataset factories and brute-force oracles.

The oracles deliberately recompute everything from scratch with plain loops
and masks (no cumulative counts, no heaps) so they stay independent of the
library's fast paths.
"""

from __future__ import annotations

import numpy as np
import pytest

from stair.dataset import make_dataset
from stair.metrics import entropy


def random_dataset(rng, n=None, d=None, class_count=2, structured=True):
    """Random labeled dataset. With structured=True the labels correlate with
    a couple of feature thresholds (plus noise), so entropy-reducing splits
    exist; the class balance is forced away from 50/50."""
    n = n or int(rng.integers(30, 200))
    d = d or int(rng.integers(2, 6))
    X = rng.normal(size=(n, d))
    if structured:
        t = rng.normal(scale=0.5)
        raw = (X[:, 0] > t + 0.4) | ((X[:, min(1, d - 1)] < t - 0.9) & (X[:, 0] < t))
        flip = rng.random(n) < 0.08
        y = (raw ^ flip).astype(np.int64)
    else:
        y = (rng.random(n) < 0.3).astype(np.int64)
    if class_count > 2:
        y = rng.integers(0, class_count, size=n)
    # keep at least one point per class so scores are non-degenerate
    for c in range(min(class_count, n)):
        y[c] = c
    return make_dataset([f"x{j+1}" for j in range(d)], X, y, class_count)


def oracle_thresholds(values):
    """Midpoints between consecutive distinct sorted values, clamped so the
    left group is exactly the lower block (same grid as the library)."""
    u = np.unique(values)
    out = []
    for a, b in zip(u[:-1], u[1:]):
        t = (a + b) / 2.0
        out.append(a if t >= b else t)
    return out


def oracle_best_candidate(rule, ds, covered, len_max, epsilon=1e-9):
    """Exhaustive minimal-key candidate: every (attr, threshold) pair, with
    histograms recounted from scratch per candidate."""
    k = ds.class_count
    n0 = covered.shape[0]
    parent_hist = np.bincount(ds.labels[covered], minlength=k)
    e_parent = 1.0 - entropy(parent_hist)
    length = len(rule.predicates)
    best = None
    for attr in range(ds.d):
        constrained = attr in rule.predicates
        if not constrained and length + 1 > len_max:
            continue
        delta_l = length if constrained else length + 2
        vals = ds.features[covered, attr]
        for t in oracle_thresholds(vals):
            left = covered[vals <= t]
            right = covered[vals > t]
            hl = np.bincount(ds.labels[left], minlength=k)
            hr = np.bincount(ds.labels[right], minlength=k)
            delta_e = (
                left.size * (1.0 - entropy(hl))
                + right.size * (1.0 - entropy(hr))
                - n0 * e_parent
            )
            if delta_e <= epsilon:
                continue
            key = delta_l / delta_e
            cand = (key, attr, t, delta_l, delta_e)
            if best is None or (key, attr, t) < (best[0], best[1], best[2]):
                best = cand
    return best


def oracle_best_gain(ds, covered, epsilon=1e-9):
    """Exhaustive max-information-gain split for a node's covered subset."""
    k = ds.class_count
    n0 = covered.shape[0]
    parent_hist = np.bincount(ds.labels[covered], minlength=k)
    h_parent = entropy(parent_hist)
    best = None
    for attr in range(ds.d):
        vals = ds.features[covered, attr]
        for t in oracle_thresholds(vals):
            left = covered[vals <= t]
            right = covered[vals > t]
            hl = np.bincount(ds.labels[left], minlength=k)
            hr = np.bincount(ds.labels[right], minlength=k)
            gain = h_parent - (left.size * entropy(hl) + right.size * entropy(hr)) / n0
            if gain <= epsilon:
                continue
            cand = (gain, attr, t)
            if best is None or (-gain, attr, t) < (-best[0], best[1], best[2]):
                best = cand
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
