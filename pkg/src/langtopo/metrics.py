"""Wasserstein and bottleneck distances between persistence diagrams.

Each diagram is completed with the diagonal projections of the other
diagram's points, making the two sides the same size; any bijection between
the completed sets is a matching. Projection-to-projection pairs cost 0.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .assignment import has_perfect_matching, linear_assignment
from .persistence import PersistenceDiagram


@dataclass(frozen=True, eq=False)
class MatchingProblem:
    left: np.ndarray
    right: np.ndarray
    cost: np.ndarray
    ground: str
    q: float
    n1: int
    n2: int


def as_points(dgm) -> np.ndarray:
    """(n, 2) birth/death array from a diagram or array-like."""
    if isinstance(dgm, PersistenceDiagram):
        if len(set(dgm.dims.tolist())) > 1:
            raise ValueError("diagram mixes homology degrees; select one with in_dim()")
        return dgm.points
    return np.asarray(dgm, dtype=float).reshape(-1, 2)


def strip_essential(dgm, cap: float | None = None) -> np.ndarray:
    """Drop infinite-death points, or replace their death by ``cap``."""
    pts = as_points(dgm).copy()
    inf = ~np.isfinite(pts[:, 1])
    if cap is None:
        return pts[~inf]
    pts[inf, 1] = cap
    return pts


def _check(pts):
    if not np.all(np.isfinite(pts)):
        raise ValueError("diagram has infinite deaths; strip_essential() or cap them first")


def _ground(diff, ground, q):
    if ground == "Linf":
        return np.max(np.abs(diff), axis=-1)
    if ground == "Lq":
        return np.sum(np.abs(diff) ** q, axis=-1) ** (1.0 / q)
    raise ValueError(f"unknown ground metric {ground!r}")


def projection(pts):
    mid = 0.5 * (pts[:, 0] + pts[:, 1])
    return np.column_stack([mid, mid])


def _canonical(a1, a2):
    """Rows sorted and the pair put in a fixed order.

    Distances then do the same floating-point work whatever the argument
    order or the point order, so symmetry holds exactly.
    """
    a1 = a1[np.lexsort((a1[:, 1], a1[:, 0]))] if len(a1) else a1
    a2 = a2[np.lexsort((a2[:, 1], a2[:, 0]))] if len(a2) else a2
    k1 = (len(a1), a1.ravel().tolist())
    k2 = (len(a2), a2.ravel().tolist())
    return (a2, a1) if k2 < k1 else (a1, a2)


def matching_problem(d1, d2, q: float = 2.0, ground: str = "Lq") -> MatchingProblem:
    a1, a2 = as_points(d1), as_points(d2)
    _check(a1)
    _check(a2)
    a1, a2 = _canonical(a1, a2)
    n1, n2 = len(a1), len(a2)
    left = np.vstack([a1, projection(a2)])
    right = np.vstack([a2, projection(a1)])
    cost = _ground(left[:, None, :] - right[None, :, :], ground, q)
    cost[n1:, n2:] = 0.0
    return MatchingProblem(left, right, cost, ground, q, n1, n2)


def wasserstein(d1, d2, q: float = 2.0, ground: str = "Lq") -> float:
    """q-Wasserstein distance; ``ground`` is ``"Lq"`` (same q) or ``"Linf"``."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if math.isinf(q):
        return bottleneck(d1, d2)
    prob = matching_problem(d1, d2, q, ground)
    if prob.cost.size == 0:
        return 0.0
    w = prob.cost**q
    rows, cols = linear_assignment(w)
    return float(np.sum(w[rows, cols]) ** (1.0 / q))


def bottleneck(d1, d2) -> float:
    """Bottleneck distance with the L-infinity ground metric.

    Binary search over the distinct matching costs for the smallest one that
    still admits a perfect matching using only cheaper-or-equal edges.
    """
    prob = matching_problem(d1, d2, math.inf, "Linf")
    if prob.cost.size == 0:
        return 0.0
    candidates = np.unique(prob.cost)
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if has_perfect_matching(prob.cost <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


@dataclass(frozen=True)
class Metric:
    """A diagram distance: ``kind`` is "wasserstein" or "bottleneck"."""

    kind: str = "wasserstein"
    q: float = 2.0
    ground: str = "Lq"

    def __call__(self, d1, d2):
        if self.kind == "bottleneck":
            return bottleneck(d1, d2)
        if self.kind == "wasserstein":
            return wasserstein(d1, d2, self.q, self.ground)
        raise ValueError(f"unknown metric {self.kind!r}")

    def describe(self):
        if self.kind == "bottleneck":
            return "bottleneck"
        return f"wasserstein(q={self.q:g},ground={self.ground})"


@dataclass(frozen=True, eq=False)
class LabeledMatrix:
    labels: tuple
    values: np.ndarray

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["", *self.labels])
        for lab, row in zip(self.labels, self.values):
            w.writerow([lab, *(format(x, ".17g") for x in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))
        labels = tuple(rows[0][1:])
        if [r[0] for r in rows[1:]] != list(labels):
            raise ValueError("row labels do not match the header")
        values = np.array([[float(x) for x in r[1:]] for r in rows[1:]], dtype=float)
        return cls(labels, values.reshape(len(labels), len(labels)))

    def sub(self, labels):
        idx = [self.labels.index(x) for x in labels]
        return LabeledMatrix(tuple(labels), self.values[np.ix_(idx, idx)])


def distance_matrix(diagrams, metric: Metric | None = None, essential: str = "drop", cap=None, workers: int = 1):
    """Pairwise diagram distances.

    Parameters
    ----------
    diagrams : mapping or sequence of (label, diagram)
    metric : Metric
    essential : {"drop", "cap", "error"}
        Handling of infinite deaths before matching.
    workers : int
        Thread pool size for the unordered pairs.
    """
    metric = metric or Metric()
    items = list(diagrams.items()) if isinstance(diagrams, dict) else list(diagrams)
    if len(items) < 2:
        raise ValueError("need at least two diagrams")
    labels = tuple(lab for lab, _ in items)
    pts = []
    for _, d in items:
        if essential == "drop":
            pts.append(strip_essential(d))
        elif essential == "cap":
            if cap is None:
                raise ValueError("essential='cap' needs a cap value")
            pts.append(strip_essential(d, cap))
        elif essential == "error":
            pts.append(as_points(d))
        else:
            raise ValueError(f"unknown essential policy {essential!r}")
    n = len(items)
    pairs = list(combinations(range(n), 2))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            vals = list(ex.map(lambda ij: metric(pts[ij[0]], pts[ij[1]]), pairs))
    else:
        vals = [metric(pts[i], pts[j]) for i, j in pairs]
    out = np.zeros((n, n))
    for (i, j), v in zip(pairs, vals):
        out[i, j] = out[j, i] = v
    return LabeledMatrix(labels, out)
