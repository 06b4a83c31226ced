"""Permutation tests for a difference between two groups of diagrams.

The test statistic is the mean within-group distance, averaged over the two
groups; small values mean tight groups. A re-labelling counts against the
null when its loss is at most the observed one.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .metrics import Metric, distance_matrix

# slack for comparing losses that are equal up to summation order
LOSS_RTOL = 1e-12
DEFAULT_EXACT_CAP = 10**6


@dataclass(frozen=True)
class TestResult:
    observed_loss: float
    count_leq: int
    total: int
    p_value: float
    mode: str
    metric: str
    n1: int
    n2: int
    seed: int | None = None

    __test__ = False  # not a pytest class

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mode", "metric", "n1", "n2", "observed_loss", "count", "total", "p_value", "seed"])
        w.writerow([
            self.mode, self.metric, self.n1, self.n2, format(self.observed_loss, ".17g"),
            self.count_leq, self.total, format(self.p_value, ".17g"),
            "" if self.seed is None else self.seed,
        ])
        return buf.getvalue()


def _avg(dm, idx):
    n = len(idx)
    if n < 2:
        return 0.0
    sub = dm[np.ix_(idx, idx)]
    return float(sub.sum() / (n * (n - 1)))


def loss_from_matrix(dm, group1, group2) -> float:
    """Loss of a split given index lists into a full distance matrix."""
    if len(group1) == 0 or len(group2) == 0:
        raise ValueError("groups must be non-empty")
    return 0.5 * (_avg(dm, list(group1)) + _avg(dm, list(group2)))


def group_loss(d1, d2, metric: Metric | None = None) -> float:
    """Loss computed directly from two lists of diagrams."""
    metric = metric or Metric()
    if not d1 or not d2:
        raise ValueError("groups must be non-empty")

    def avg(group):
        n = len(group)
        if n < 2:
            return 0.0
        tot = sum(metric(group[i], group[j]) for i in range(n) for j in range(n) if i != j)
        return tot / (n * (n - 1))

    return 0.5 * (avg(list(d1)) + avg(list(d2)))


def _leq(x, ref):
    return x <= ref + LOSS_RTOL * max(1.0, abs(ref))


def _matrix(d1, d2, metric, workers=1):
    items = [(i, d) for i, d in enumerate(list(d1) + list(d2))]
    return distance_matrix(items, metric, workers=workers).values


def permutation_test_matrix(dm, n1: int, n_shuffles: int = 100, seed: int = 0, metric_name: str = "") -> TestResult:
    """Randomised test on a precomputed matrix ordered group 1 then group 2.

    Each shuffle draws a uniformly random re-labelling into sizes
    ``(n1, n2)`` that splits the samples differently from the observed
    groups. The p-value is ``(Z + 1) / (N + 1)`` with ``Z`` the number of
    shuffles whose loss does not exceed the observed loss.
    """
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[0]
    n2 = n - n1
    if n_shuffles < 1:
        raise ValueError("need at least one shuffle")
    if n1 < 1 or n2 < 1:
        raise ValueError("groups must be non-empty")
    trivial = 2 if n1 == n2 else 1
    if math.comb(n, n1) <= trivial:
        raise ValueError("no re-labelling differs from the observed split")
    observed = loss_from_matrix(dm, range(n1), range(n1, n))
    first = frozenset(range(n1))
    second = frozenset(range(n1, n))
    rng = np.random.default_rng(seed)
    z = 0
    for _ in range(n_shuffles):
        while True:
            perm = rng.permutation(n)
            g1 = frozenset(perm[:n1].tolist())
            if g1 != first and not (n1 == n2 and g1 == second):
                break
        if _leq(loss_from_matrix(dm, sorted(g1), sorted(perm[n1:].tolist())), observed):
            z += 1
    return TestResult(observed, z, n_shuffles, (z + 1) / (n_shuffles + 1), "randomized", metric_name, n1, n2, seed)


def exact_test_matrix(dm, n1: int, cap: int = DEFAULT_EXACT_CAP, metric_name: str = "") -> TestResult:
    """Exact test over all ``C(n, n1)`` labelled splits (observed one included)."""
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[0]
    n2 = n - n1
    if n1 < 1 or n2 < 1:
        raise ValueError("groups must be non-empty")
    total = math.comb(n, n1)
    if total > cap:
        raise ValueError(f"{total} splits exceed the cap of {cap}; use the randomized test")
    observed = loss_from_matrix(dm, range(n1), range(n1, n))
    everyone = set(range(n))
    count = 0
    for g1 in combinations(range(n), n1):
        g2 = sorted(everyone.difference(g1))
        if _leq(loss_from_matrix(dm, g1, g2), observed):
            count += 1
    return TestResult(observed, count, total, count / total, "exact", metric_name, n1, n2)


def permutation_test(d1, d2, metric: Metric | None = None, n_shuffles: int = 100, seed: int = 0, workers: int = 1) -> TestResult:
    metric = metric or Metric()
    dm = _matrix(d1, d2, metric, workers)
    return permutation_test_matrix(dm, len(d1), n_shuffles, seed, metric.describe())


def exact_permutation_test(d1, d2, metric: Metric | None = None, cap: int = DEFAULT_EXACT_CAP, workers: int = 1) -> TestResult:
    metric = metric or Metric()
    dm = _matrix(d1, d2, metric, workers)
    return exact_test_matrix(dm, len(d1), cap, metric.describe())


def grouped_matrix(labeled, group1, group2):
    """Reorder a LabeledMatrix so ``group1`` labels come first."""
    missing = [x for x in list(group1) + list(group2) if x not in labeled.labels]
    if missing:
        raise KeyError(f"labels not in the distance matrix: {missing}")
    return labeled.sub(list(group1) + list(group2)).values
