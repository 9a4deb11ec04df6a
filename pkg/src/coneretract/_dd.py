"""Double description: generators of {x : A x <= 0}.

Incremental insertion of one inequality at a time. The running cone is kept
as L + cone(R) with L an orthonormal lineality basis and R unit rays that lie
in the orthogonal complement of L. Adjacency of rays is decided by the
algebraic (rank) test, which stays valid when the cone is not full-dimensional.
"""

from __future__ import annotations

import numpy as np

from .errors import ConversionOverflow

ZERO_TOL = 1e-10
RANK_TOL = 1e-8


def _normalize_rows(M: np.ndarray) -> np.ndarray:
    if M.size == 0:
        return M
    n = np.linalg.norm(M, axis=1)
    keep = n > ZERO_TOL
    return M[keep] / n[keep, None]


def _dedupe(R: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    out: list[np.ndarray] = []
    for r in R:
        if all(np.linalg.norm(r - q) > tol for q in out):
            out.append(r)
    return np.array(out).reshape(-1, R.shape[1]) if R.ndim == 2 else R


def _orthonormal_rows(L: np.ndarray) -> np.ndarray:
    if L.shape[0] == 0:
        return L
    u, s, vt = np.linalg.svd(L, full_matrices=False)
    k = int(np.sum(s > ZERO_TOL * max(1.0, s[0])))
    return vt[:k]


def _rank(M: np.ndarray) -> int:
    if M.shape[0] == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > RANK_TOL))


def cone_generators(A, dim: int, budget: int = 20000) -> tuple[np.ndarray, np.ndarray]:
    """Extreme rays and lineality basis of ``{x in R^dim : A @ x <= 0}``.

    Returns ``(rays, lineality)``, both as row arrays of unit vectors. The
    cone equals ``span(lineality) + cone(rays)``.
    """
    A = np.asarray(A, dtype=float).reshape(-1, dim)
    A = _normalize_rows(A)
    lin = np.eye(dim)
    rays = np.zeros((0, dim))
    done: list[np.ndarray] = []

    for a in A:
        if lin.shape[0]:
            vals = lin @ a
            k = int(np.argmax(np.abs(vals)))
            if abs(vals[k]) > ZERO_TOL:
                l = lin[k]
                al = vals[k]
                if al > 0:
                    l, al = -l, -al
                others = np.delete(lin, k, axis=0)
                others = others - np.outer(others @ a / al, l)
                rays = rays - np.outer(rays @ a / al, l)
                rays = np.vstack([rays, l])
                lin = _orthonormal_rows(others)
                if lin.shape[0]:
                    rays = rays - (rays @ lin.T) @ lin
                rays = _dedupe(_normalize_rows(rays))
                done.append(a)
                continue
        vals = rays @ a
        pos = vals > ZERO_TOL
        neg = vals < -ZERO_TOL
        if not pos.any():
            done.append(a)
            continue
        P = np.array(done).reshape(-1, dim)
        need = dim - lin.shape[0] - 2
        Z = np.abs(rays @ P.T) <= ZERO_TOL if P.shape[0] else np.zeros((rays.shape[0], 0), bool)
        new = []
        pi = np.flatnonzero(pos)
        ni = np.flatnonzero(neg)
        for i in pi:
            for j in ni:
                common = Z[i] & Z[j]
                if common.sum() < need:
                    continue
                if _rank(P[common]) != need:
                    continue
                w = vals[i] * rays[j] - vals[j] * rays[i]
                new.append(w / np.linalg.norm(w))
        rays = np.vstack([rays[~pos]] + ([np.array(new)] if new else []))
        rays = _dedupe(rays)
        if rays.shape[0] > budget:
            raise ConversionOverflow(
                f"double description produced {rays.shape[0]} rays (budget {budget})")
        done.append(a)

    # drop anything that is not extreme (safety net against round-off)
    if rays.shape[0] and done:
        P = np.array(done)
        need = dim - lin.shape[0] - 1
        Z = np.abs(rays @ P.T) <= 1e-8
        keep = [i for i in range(rays.shape[0]) if _rank(P[Z[i]]) == need]
        rays = rays[keep]
    return rays.reshape(-1, dim), lin.reshape(-1, dim)


def generators_with_lineality(A, dim: int, budget: int = 20000) -> np.ndarray:
    """Generators of ``{A x <= 0}`` as a single list, lineality given as +/- pairs."""
    rays, lin = cone_generators(A, dim, budget)
    return np.vstack([rays, lin, -lin]).reshape(-1, dim)
