"""Dense symmetric eigensolver (cyclic Jacobi)."""
from __future__ import annotations

import numpy as np


class ConvergenceError(ArithmeticError):
    pass


def _off(a):
    # summed directly: subtracting the diagonal from the full norm cancels badly
    return float(np.sqrt(np.sum(np.triu(a, 1) ** 2) * 2.0))


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive."""
    v = np.array(vectors, dtype=float, copy=True)
    if v.size == 0:
        return v
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def symmetric_eigen(s, tol: float = 1e-12, max_sweeps: int = 100, sym_tol: float = 1e-10):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    s : (n, n) array_like
        Symmetric matrix.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        ``tol * max(1, ||s||_F)``.
    max_sweeps : int
        Iteration budget; exceeding it raises :class:`ConvergenceError`.

    Returns
    -------
    eigenvalues : (n,) ndarray
        Sorted descending; ties keep their diagonal order.
    eigenvectors : (n, n) ndarray
        Orthonormal columns, each with its largest-magnitude entry positive.
    """
    a = np.array(s, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(a, a.T, rtol=0.0, atol=sym_tol):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    if n == 0:
        return np.zeros(0), v

    scale = max(1.0, float(np.linalg.norm(a)))
    target = tol * scale
    tiny = np.finfo(float).tiny
    for _ in range(max_sweeps):
        if _off(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tiny:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - sn * cq
                a[:, q] = sn * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - sn * rq
                a[q, :] = sn * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    else:
        if _off(a) > target:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps; "
                f"off-diagonal norm {_off(a):.3e}"
            )

    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], fix_signs(v[:, order])
