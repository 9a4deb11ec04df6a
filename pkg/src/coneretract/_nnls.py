"""Active-set nonnegative least squares (Lawson-Hanson)."""

from __future__ import annotations

import numpy as np

from .errors import MaxIterations


def _passive_solve(A: np.ndarray, b: np.ndarray, P: np.ndarray) -> np.ndarray:
    z = np.zeros(A.shape[1])
    if P.any():
        # lstsq gives the minimum-norm solution when the passive columns are
        # (numerically) dependent, which is where a ridge term would be needed
        z[P] = np.linalg.lstsq(A[:, P], b, rcond=1e-12)[0]
    return z


def nnls(A, b, maxiter: int | None = None, tol: float | None = None):
    """Minimize ``||A x - b||`` subject to ``x >= 0``.

    Parameters
    ----------
    A : array_like, shape (m, n)
    b : array_like, shape (m,)
    maxiter : int, optional
        Inner-iteration cap, default ``100 * n``.
    tol : float, optional
        Dual feasibility tolerance on ``A.T @ (b - A x)``.

    Returns
    -------
    x : ndarray, shape (n,)
    rnorm : float
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if maxiter is None:
        maxiter = 100 * max(n, 1)
    if tol is None:
        eps = np.finfo(float).eps
        tol = 10 * eps * max(m, n) * max(1.0, np.abs(A).max(initial=0.0)) * max(1.0, np.abs(b).max(initial=0.0))

    x = np.zeros(n)
    P = np.zeros(n, dtype=bool)
    # columns whose positive gradient was round-off: entering them gave a
    # nonpositive coefficient; they stay out until x changes
    blocked = np.zeros(n, dtype=bool)
    w = A.T @ b
    it = 0
    while True:
        free = ~P & ~blocked
        if not free.any() or np.max(np.where(free, w, -np.inf)) <= tol:
            break
        j = int(np.argmax(np.where(free, w, -np.inf)))
        P[j] = True
        z = _passive_solve(A, b, P)
        if z[j] <= 0:
            P[j] = False
            blocked[j] = True
            continue
        while z[P].min() <= 0:
            it += 1
            if it > maxiter:
                raise MaxIterations(f"nnls did not converge in {maxiter} iterations")
            mask = P & (z <= 0)
            alpha = np.min(x[mask] / (x[mask] - z[mask]))
            x = x + alpha * (z - x)
            P &= x > tol
            x[~P] = 0.0
            z = _passive_solve(A, b, P)
            if not P.any():
                break
        x = np.where(P, z, 0.0)
        blocked[:] = False
        w = A.T @ (b - A @ x)
        it += 1
        if it > maxiter:
            raise MaxIterations(f"nnls did not converge in {maxiter} iterations")
    return x, float(np.linalg.norm(A @ x - b))
