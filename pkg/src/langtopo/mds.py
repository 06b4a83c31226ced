"""Classical (Torgerson) multidimensional scaling."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .linalg import symmetric_eigen


@dataclass(frozen=True, eq=False)
class Embedding:
    labels: tuple
    coordinates: np.ndarray
    eigenvalues_used: np.ndarray
    stress: float
    padded: bool = False
    all_eigenvalues: np.ndarray | None = None

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        k = self.coordinates.shape[1]
        w.writerow(["label", *(f"dim{i + 1}" for i in range(k))])
        for lab, row in zip(self.labels, self.coordinates):
            w.writerow([lab, *(format(x, ".17g") for x in row)])
        return buf.getvalue()

    def eigenvalues_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["component", "eigenvalue", "used"])
        k = len(self.eigenvalues_used)
        for i, lam in enumerate(self.all_eigenvalues if self.all_eigenvalues is not None else []):
            used = i < k and self.eigenvalues_used[i] > 0
            w.writerow([i + 1, format(lam, ".17g"), int(used)])
        w.writerow(["stress", format(self.stress, ".17g"), ""])
        return buf.getvalue()


def classical_mds(dm, k: int = 2, labels=None) -> Embedding:
    """Embed a distance matrix in ``k`` dimensions.

    The doubly centred matrix ``-1/2 J D^2 J`` is diagonalised and the
    top ``k`` positive eigenpairs give coordinates ``V_k sqrt(L_k)``. Axes
    with non-positive eigenvalues are zero-filled and ``padded`` is set.
    """
    d = np.asarray(dm, dtype=float)
    n = d.shape[0]
    if d.ndim != 2 or d.shape[1] != n:
        raise ValueError("distance matrix must be square")
    if not np.allclose(d, d.T, rtol=0.0, atol=1e-12) or np.any(np.diag(d) != 0) or np.any(d < 0):
        raise ValueError("expected a symmetric non-negative matrix with zero diagonal")
    if not 1 <= k <= max(n - 1, 1):
        raise ValueError(f"k must lie in [1, {n - 1}]")
    labels = tuple(range(n)) if labels is None else tuple(labels)

    centre = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * centre @ (d**2) @ centre
    lam, vec = symmetric_eigen(0.5 * (b + b.T))
    floor = 1e-10 * max(np.max(np.abs(lam)), 0.0)
    top = lam[:k]
    keep = top > floor
    coords = np.zeros((n, k))
    coords[:, keep] = vec[:, :k][:, keep] * np.sqrt(top[keep])
    used = np.where(keep, top, 0.0)

    diff = coords[:, None, :] - coords[None, :, :]
    fitted = np.sqrt(np.sum(diff**2, axis=-1))
    stress = float(np.linalg.norm(d - fitted))
    return Embedding(labels, coords, used, stress, bool((~keep).any()), lam)
