"""Lattice operations for the order induced by a simplicial cone."""

from __future__ import annotations

import numpy as np

from .cones import PolyhedralCone
from .retractions import MapPair


class SimplicialCone:
    """cone{b_1, ..., b_d} for a basis of R^d (the columns of ``basis``).

    In the chart ``c = B^{-1} x`` the induced order is the coordinatewise one,
    so every lattice operation is a coordinatewise max/min mapped back by B.
    """

    def __init__(self, basis):
        B = np.asarray(basis, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("basis must be a square matrix")
        scale = np.abs(B).max()
        if scale == 0 or abs(np.linalg.det(B)) <= 1e-10 * scale ** B.shape[0]:
            raise ValueError("basis vectors are linearly dependent")
        self.basis = B
        self.inverse = np.linalg.inv(B)
        if np.max(np.abs(B @ self.inverse - np.eye(B.shape[0]))) > 1e-10:
            raise ValueError("basis is too ill-conditioned")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def orthant(cls, dim: int) -> "SimplicialCone":
        return cls(np.eye(dim))

    def as_polyhedral(self) -> PolyhedralCone:
        # facets are the rows of -B^{-1}
        return PolyhedralCone(generators=self.basis.T, facets=-self.inverse, dim=self.dim)

    def coords(self, x) -> np.ndarray:
        return self.inverse @ np.asarray(x, dtype=float)

    def from_coords(self, c) -> np.ndarray:
        return self.basis @ c

    def positive_part(self, x) -> np.ndarray:
        return self.basis @ np.maximum(self.coords(x), 0.0)

    def negative_part(self, x) -> np.ndarray:
        return self.positive_part(-np.asarray(x, dtype=float))

    def sup(self, x, y) -> np.ndarray:
        return self.basis @ np.maximum(self.coords(x), self.coords(y))

    def inf(self, x, y) -> np.ndarray:
        return self.basis @ np.minimum(self.coords(x), self.coords(y))

    def abs(self, x) -> np.ndarray:
        return self.basis @ np.abs(self.coords(x))

    def leq(self, x, y, tol: float = 1e-9) -> bool:
        """x <= y in the cone order."""
        c = self.coords(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))
        return bool(np.all(c >= -tol * max(1.0, np.abs(c).max())))


def coords(S: SimplicialCone, x):
    return S.coords(x)


def positive_part(S: SimplicialCone, x):
    return S.positive_part(x)


def sup(S: SimplicialCone, x, y):
    return S.sup(x, y)


def inf(S: SimplicialCone, x, y):
    return S.inf(x, y)


def abs_(S: SimplicialCone, x):
    return S.abs(x)


def positive_part_pair(S: SimplicialCone) -> MapPair:
    """``Q = x -> x^+`` with range S and ``R = x -> -x^-`` with range -S."""
    K = S.as_polyhedral()
    return MapPair(S.positive_part, lambda x: -S.negative_part(x), K, -K, "positive-part")
