"""Cyclic Jacobi eigenvalues for batches of small symmetric matrices."""
from __future__ import annotations

import numpy as np


def jacobi_eigenvalues(a, tol: float = 1e-13, max_sweeps: int = 50) -> np.ndarray:
    """Eigenvalues (ascending) of every symmetric matrix in ``a[..., n, n]``.

    Rotations sweep the (p, q) pairs cyclically for the whole batch at once
    until the off-diagonal Frobenius norm falls below ``tol`` times the
    matrix norm.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[-1]
    batch = a.reshape(-1, n, n)
    scale = np.sqrt(np.sum(batch ** 2, axis=(1, 2)))
    scale[scale == 0] = 1.0
    offdiag = 1.0 - np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum((batch * offdiag) ** 2, axis=(1, 2)))
        if np.all(off <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = batch[:, p, q]
                active = np.abs(apq) > 1e-300
                if not np.any(active):
                    continue
                app = batch[:, p, p]
                aqq = batch[:, q, q]
                with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                    theta = np.where(active, (aqq - app) / (2.0 * apq), 0.0)
                    t = np.where(active, np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
                t = np.where(active & (theta == 0), 1.0, t)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) rotation
                col_p = batch[:, :, p].copy()
                col_q = batch[:, :, q].copy()
                batch[:, :, p] = c[:, None] * col_p - s[:, None] * col_q
                batch[:, :, q] = s[:, None] * col_p + c[:, None] * col_q
                row_p = batch[:, p, :].copy()
                row_q = batch[:, q, :].copy()
                batch[:, p, :] = c[:, None] * row_p - s[:, None] * row_q
                batch[:, q, :] = s[:, None] * row_p + c[:, None] * row_q
    eig = np.sort(np.diagonal(batch, axis1=1, axis2=2), axis=1)
    return eig.reshape(a.shape[:-1])
