"""Exact bipartite matching: min-cost assignment and perfect-matching tests."""
from __future__ import annotations

import numpy as np


def linear_assignment(cost):
    """Minimum-cost perfect matching of a square cost matrix.

    Shortest augmenting paths with vertex potentials (Hungarian method),
    O(n^3). Returns ``(rows, cols)`` like ``scipy.optimize.linear_sum_assignment``.
    """
    c = np.asarray(cost, dtype=float)
    n = c.shape[0]
    if c.ndim != 2 or c.shape[1] != n:
        raise ValueError("cost matrix must be square")
    if n == 0:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix must be finite")

    # 1-based bookkeeping; column 0 is a virtual start
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=int)  # match[col] = row
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            free = ~used[1:]
            cur = c[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            cand = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            u[match[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    rows = np.empty(n, dtype=int)
    rows[match[1:] - 1] = np.arange(n)
    return np.arange(n), rows


def has_perfect_matching(allowed) -> bool:
    """Whether a boolean square adjacency matrix admits a perfect matching."""
    a = np.asarray(allowed, dtype=bool)
    n = a.shape[0]
    nbrs = [np.flatnonzero(a[i]).tolist() for i in range(n)]
    owner = [-1] * n

    def augment(i, seen):
        for j in nbrs[i]:
            if seen[j]:
                continue
            seen[j] = True
            if owner[j] < 0 or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in range(n):
        if not nbrs[i] or not augment(i, [False] * n):
            return False
    return True
