"""Small dense linear algebra: vectors, 2-planes through the origin, 2x2 solves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ToleranceConfig, resolve
from .errors import DegeneratePlane, NotInPlane, SingularSystem


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Return ``x`` as a finite 1-D float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if dim is not None and v.size != dim:
        raise ValueError(f"expected dimension {dim}, got {v.size}")
    return v


@dataclass(frozen=True, eq=False)
class Plane2D:
    """A 2-dimensional linear subspace of R^d with an orthonormal basis."""

    basis_a: np.ndarray
    basis_b: np.ndarray

    def __post_init__(self):
        a = as_vector(self.basis_a)
        b = as_vector(self.basis_b, a.size)
        gram = np.array([[a @ a, a @ b], [b @ a, b @ b]])
        if np.max(np.abs(gram - np.eye(2))) > 1e-12:
            raise ValueError("plane basis must be orthonormal")
        object.__setattr__(self, "basis_a", a)
        object.__setattr__(self, "basis_b", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis_a.size

    @property
    def matrix(self) -> np.ndarray:
        """The d x 2 matrix whose columns are the basis vectors."""
        return np.column_stack([self.basis_a, self.basis_b])


def plane_through(x, delta_dir, tol: ToleranceConfig | None = None) -> Plane2D:
    """The plane span{x, delta_dir}.

    The first basis vector is always ``delta_dir`` normalized; the second is
    the Gram-Schmidt remainder of ``x``. Fixing the orientation this way makes
    slices through a common line agree on that line.
    """
    tol = resolve(tol)
    x = as_vector(x)
    d = as_vector(delta_dir, x.size)
    nd = np.linalg.norm(d)
    nx = np.linalg.norm(x)
    if nd == 0 or nx == 0:
        raise DegeneratePlane("zero vector cannot span a plane")
    a = d / nd
    rest = x - (a @ x) * a
    # re-orthogonalize once; cheap and removes cancellation error
    rest = rest - (a @ rest) * a
    nr = np.linalg.norm(rest)
    if nr <= tol.parallel * nx:
        raise DegeneratePlane("x and delta_dir are parallel")
    return Plane2D(a, rest / nr)


def plane_coords(P: Plane2D, x, tol: ToleranceConfig | None = None) -> tuple[float, float]:
    """Coordinates (s, t) of an in-plane vector with x = s*a + t*b."""
    tol = resolve(tol)
    x = as_vector(x, P.ambient_dim)
    s = float(P.basis_a @ x)
    t = float(P.basis_b @ x)
    resid = np.linalg.norm(x - s * P.basis_a - t * P.basis_b)
    if resid > 1e-9 * np.linalg.norm(x):
        raise NotInPlane(f"vector is {resid:.3g} away from the plane")
    return s, t


def lift(P: Plane2D, s: float, t: float) -> np.ndarray:
    return s * P.basis_a + t * P.basis_b


def solve2x2(a11, a12, a21, a22, b1, b2) -> tuple[float, float]:
    """Solve [[a11, a12], [a21, a22]] @ (lam, mu) = (b1, b2) by Cramer's rule."""
    det = a11 * a22 - a12 * a21
    scale = max(abs(a11), abs(a12), abs(a21), abs(a22))
    if scale == 0 or abs(det) <= 1e-12 * scale * scale:
        raise SingularSystem("2x2 system is singular")
    lam = (b1 * a22 - a12 * b2) / det
    mu = (a11 * b2 - b1 * a21) / det
    return lam, mu


def cross2(a, b) -> float:
    """z-component of the cross product of two plane vectors."""
    return a[0] * b[1] - a[1] * b[0]


def angle_of(v) -> float:
    return math.atan2(v[1], v[0])


def ccw_angle(a, b) -> float:
    """Counterclockwise angle in [0, 2*pi) turning direction a into direction b."""
    return (angle_of(b) - angle_of(a)) % (2 * math.pi)


def unit2(v) -> tuple[float, float]:
    x, y = float(v[0]), float(v[1])
    n = math.hypot(x, y)
    if n == 0:
        raise ValueError("zero plane vector")
    return (x / n, y / n)
