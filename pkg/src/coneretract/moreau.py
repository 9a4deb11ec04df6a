"""Metric projection onto closed convex cones and the Moreau decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._nnls import nnls
from .cones import PolyhedralCone, polar
from .geometry import as_vector
from .retractions import MapPair


def project_polyhedral(K: PolyhedralCone, x, maxiter: int | None = None) -> np.ndarray:
    """Nearest point of K to x: ``G lam*`` with ``lam* = argmin ||x - G lam||, lam >= 0``."""
    x = as_vector(x, K.ambient_dim)
    G = K.generators
    if G.shape[0] == 0:
        return np.zeros_like(x)
    if maxiter is None:
        maxiter = 100 * G.shape[0]
    lam, _ = nnls(G.T, x, maxiter=maxiter)
    return G.T @ lam


def kkt_residual(K: PolyhedralCone, x, p) -> float:
    """Largest violation of the optimality conditions of ``p = P_K x``.

    With ``q = x - p``: every generator must satisfy ``<g, q> <= 0`` and
    ``<p, q> = 0``.
    """
    x = np.asarray(x, dtype=float)
    q = x - p
    dual = float(np.max(K.generators @ q, initial=0.0))
    return max(dual, 0.0, abs(float(p @ q)))


@dataclass(frozen=True, eq=False)
class MoreauDecomposition:
    """``x = p + q`` with ``p`` in K, ``q`` in the polar of K, ``<p, q> = 0``."""

    x: np.ndarray
    p: np.ndarray
    q: np.ndarray
    inner: float
    residuals: dict = field(default_factory=dict)

    def failures(self, tol: float = 1e-9) -> list[str]:
        scale = 1 + float(np.linalg.norm(self.x))
        bound = {"sum": tol * scale, "inner": tol * scale ** 2,
                 "p_membership": tol * scale, "q_membership": tol * scale,
                 "q_reprojection": tol * scale}
        return [k for k, v in self.residuals.items() if v > bound.get(k, tol * scale)]

    @property
    def ok(self) -> bool:
        return not self.failures()

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "p": self.p.tolist(), "q": self.q.tolist(),
                "inner": self.inner, "residuals": dict(self.residuals)}


def decompose(K, x) -> MoreauDecomposition:
    """Split x into its projections on K and on the polar cone.

    Also re-projects ``q`` onto the polar and records how far that moves it,
    which checks the uniqueness half of Moreau's theorem on this instance.
    """
    if isinstance(K, CircularCone):
        x = as_vector(x, K.axis.size)
        p = project_circular(K, x)
        q = x - p
        Kp = K.polar()
        res = {
            "sum": float(np.linalg.norm(p + q - x)),
            "inner": abs(float(p @ q)),
            "p_membership": K.violation(p),
            "q_membership": Kp.violation(q),
            "q_reprojection": float(np.linalg.norm(project_circular(Kp, q) - q)),
        }
        return MoreauDecomposition(x, p, q, float(p @ q), res)
    x = as_vector(x, K.ambient_dim)
    p = project_polyhedral(K, x)
    q = x - p
    Kp = polar(K)
    res = {
        "sum": float(np.linalg.norm(p + q - x)),
        "inner": abs(float(p @ q)),
        "p_membership": K.violation(p),
        "q_membership": Kp.violation(q),
        "q_reprojection": float(np.linalg.norm(project_polyhedral(Kp, q) - q)),
    }
    return MoreauDecomposition(x, p, q, float(p @ q), res)


class CircularCone:
    """``{x : <axis, x> >= ||x|| cos(half_angle)}`` -- an ice-cream cone."""

    def __init__(self, axis, half_angle: float):
        a = as_vector(axis)
        self.axis = a / np.linalg.norm(a)
        if not 0 < half_angle < math.pi / 2:
            raise ValueError("half_angle must lie in (0, pi/2)")
        self.half_angle = float(half_angle)
        self.ambient_dim = self.axis.size

    def __repr__(self):
        return f"CircularCone(axis={self.axis.tolist()}, half_angle={self.half_angle!r})"

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        s = float(self.axis @ x)
        w = x - s * self.axis
        return s, w, float(np.linalg.norm(w))

    def contains(self, x, strict: bool = False, tol: float = 1e-9) -> bool:
        gap = self.boundary_gap(x)
        nx = float(np.linalg.norm(x))
        if strict:
            return nx > 0 and gap > tol * nx
        return gap >= -tol * nx

    def boundary_gap(self, x) -> float:
        """Signed distance to the boundary surface, positive inside."""
        s, _, r = self._split(x)
        th = self.half_angle
        return s * math.sin(th) - r * math.cos(th)

    def violation(self, z) -> float:
        return float(np.linalg.norm(np.asarray(z, dtype=float) - project_circular(self, z)))

    def polar(self) -> "CircularCone":
        return CircularCone(-self.axis, math.pi / 2 - self.half_angle)

    def boundary_ray(self, phi: float) -> np.ndarray:
        """Unit boundary direction at azimuth ``phi`` (first two complement axes)."""
        E = np.linalg.qr(np.column_stack([self.axis, np.eye(self.ambient_dim)]))[0][:, 1:]
        w = math.cos(phi) * E[:, 0] + (math.sin(phi) * E[:, 1] if E.shape[1] > 1 else 0)
        return math.cos(self.half_angle) * self.axis + math.sin(self.half_angle) * w

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        d = self.ambient_dim
        z = rng.standard_normal((n, d))
        z -= np.outer(z @ self.axis, self.axis)
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        frac = np.sqrt(rng.random(n))
        ang = frac * self.half_angle
        dirs = np.cos(ang)[:, None] * self.axis + np.sin(ang)[:, None] * z
        return dirs * rng.exponential(size=n)[:, None]


def project_circular(C: CircularCone, x) -> np.ndarray:
    """Closed-form projection onto a circular cone."""
    x = np.asarray(x, dtype=float)
    s, w, r = C._split(x)
    th = C.half_angle
    if r <= s * math.tan(th):
        return x.copy()
    if r <= -s / math.tan(th):
        return np.zeros_like(x)
    d = math.cos(th) * C.axis + math.sin(th) * (w / r)
    return max(float(x @ d), 0.0) * d


def projection_pair(K) -> MapPair:
    """(P, I - P) for a polyhedral or circular cone."""
    if isinstance(K, CircularCone):
        Kp = K.polar()
        return MapPair(lambda x: project_circular(K, x),
                       lambda x: x - project_circular(K, x), K, Kp, "projection")
    Kp = polar(K)
    return MapPair(lambda x: project_polyhedral(K, x),
                   lambda x: x - project_polyhedral(K, x), K, Kp, "projection")
