"""Adjusted multiple correspondence analysis on the Burt matrix."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .ingest import MISSING, CategoricalTable, TableError
from .linalg import symmetric_eigen

__all__ = [
    "IndicatorMatrix",
    "McaModel",
    "indicator_matrix",
    "burt_matrix",
    "mca_adjusted",
    "symmetric_eigen",
    "variance_percentages",
    "fit",
]


@dataclass(frozen=True, eq=False)
class IndicatorMatrix:
    entries: np.ndarray
    row_ids: tuple
    column_ids: tuple  # (feature_id, code) per column
    Q: int
    column_labels: tuple = ()  # "feature:value" display strings

    @property
    def J(self):
        return self.entries.shape[1]


@dataclass(frozen=True, eq=False)
class McaModel:
    row_masses: np.ndarray
    eigenvalues: np.ndarray
    adjusted_inertias: np.ndarray
    eigenvectors: np.ndarray
    coordinates: np.ndarray
    adjusted_total: float
    Q: int
    column_ids: tuple
    column_labels: tuple = ()

    @property
    def J(self):
        return len(self.row_masses)

    def row_of(self, feature_id, code):
        return self.column_ids.index((feature_id, code))

    def category_values(self):
        """Value label of each column (the text after ``feature:``)."""
        if not self.column_labels:
            return [str(c) for _, c in self.column_ids]
        return [lab[len(str(f)) + 1:] for (f, _), lab in zip(self.column_ids, self.column_labels)]

    def coordinates_csv(self):
        """Category coordinates keyed by feature id and value label."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["feature_id", "category_code", *(f"dim{k + 1}" for k in range(self.J))])
        for (f, _), val, row in zip(self.column_ids, self.category_values(), self.coordinates):
            w.writerow([f, val, *(format(x, ".17g") for x in row)])
        return buf.getvalue()

    def scree_csv(self):
        pct = variance_percentages(self)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["component", "adjusted_inertia", "percentage", "cumulative_percentage"])
        cum = np.cumsum(pct)
        for j, (a, p, c) in enumerate(zip(self.adjusted_inertias, pct, cum)):
            w.writerow([j + 1, format(a, ".17g"), format(100 * p, ".17g"), format(100 * c, ".17g")])
        return buf.getvalue()


def indicator_matrix(table: CategoricalTable) -> IndicatorMatrix:
    """Complete disjunctive coding; categories never observed get no column."""
    if (table.cells == MISSING).any():
        raise TableError("table has missing cells; impute before building the indicator matrix")
    cols, ids, labels = [], [], []
    for q, f in enumerate(table.feature_ids):
        col = table.cells[:, q]
        for code in range(len(table.category_labels[q])):
            hit = col == code
            if hit.any():
                cols.append(hit.astype(np.int64))
                ids.append((f, code))
                labels.append(f"{f}:{table.category_labels[q][code]}")
    z = np.column_stack(cols) if cols else np.zeros((len(table.sample_ids), 0), dtype=np.int64)
    return IndicatorMatrix(z, table.sample_ids, tuple(ids), len(table.feature_ids), tuple(labels))


def burt_matrix(z) -> np.ndarray:
    entries = z.entries if isinstance(z, IndicatorMatrix) else np.asarray(z)
    return entries.T @ entries


def mca_adjusted(b, Q: int, column_ids=None, column_labels=()) -> McaModel:
    """Fit adjusted MCA from a Burt matrix ``b`` of ``Q`` features.

    Coordinates are ``D_r^{-1/2} V diag(sqrt(adjusted inertia))``; row ``j``
    holds the principal coordinates of category ``j``.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("Burt matrix must be square")
    if not np.allclose(b, b.T, rtol=0.0, atol=1e-10):
        raise ValueError("Burt matrix is not symmetric")
    if Q < 1:
        raise ValueError("need at least one feature")
    J = b.shape[0]
    p = b / b.sum()
    r = p.sum(axis=1)
    if np.any(r <= 0):
        raise ValueError("zero row mass; drop unobserved categories first")
    sr = np.sqrt(r)
    s = (p - np.outer(r, r)) / np.outer(sr, sr)
    lam, v = symmetric_eigen(s)

    if Q == 1:
        # a single feature carries no association; the adjustment factor is undefined
        adj = np.zeros(J)
        tau = 0.0
    else:
        ratio = Q / (Q - 1.0)
        adj = np.where(lam > 1.0 / Q, (ratio * (lam - 1.0 / Q)) ** 2, 0.0)
        tau = ratio * (np.sum(lam**2) - (J - Q) / Q**2)
    f = (v / sr[:, None]) * np.sqrt(adj)[None, :]
    if column_ids is None:
        column_ids = tuple((None, j) for j in range(J))
    return McaModel(r, lam, adj, v, f, float(tau), Q, tuple(column_ids), tuple(column_labels))


def variance_percentages(model: McaModel) -> np.ndarray:
    """Adjusted inertia shares (fractions, not multiplied by 100)."""
    if model.adjusted_total <= 0:
        raise ValueError("adjusted total inertia is not positive (degenerate table)")
    return model.adjusted_inertias / model.adjusted_total


def fit(table: CategoricalTable) -> McaModel:
    z = indicator_matrix(table)
    return mca_adjusted(burt_matrix(z), z.Q, z.column_ids, z.column_labels)
