"""Mutually polar retraction pairs.

Three constructions are provided:

* :func:`build_2d` / :func:`eval_2d` -- the explicit planar formula on the
  four sectors cut out by two transversal planar cones;
* :func:`build_transversal` / :func:`eval_transversal` -- the same formula
  applied in every plane through a transversal line;
* :func:`build_one_range` -- ``Rx = q(x) u`` with ``q(t, y) = (t + g(y))^+``
  and ``g`` the gauge of a translated cross-section of M.

Every pair object exposes ``Q(x)``, ``R(x)`` and ``evaluate(x) -> (Qx, Rx)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import ToleranceConfig, resolve
from .cones import (
    ConeBasisData,
    PolyhedralCone,
    PolytopeInHyperplane,
    SectorCone2D,
    TransversalCertificate,
    basis_on_hyperplane,
    certificate_failures,
    cones_meet,
    contains,
    intersect_with_plane,
)
from .errors import (
    ConeRetractError,
    DegeneratePlane,
    HypothesisNotMet,
    NotTransversal2D,
    SingularSystem,
    SliceDegenerate,
)
from .geometry import Plane2D, as_vector, ccw_angle, cross2, lift, plane_through, solve2x2

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class MapPair:
    """A pair of maps given as plain callables, with their range cones."""

    q_map: Callable[[np.ndarray], np.ndarray]
    r_map: Callable[[np.ndarray], np.ndarray]
    range_Q: object = None
    range_R: object = None
    name: str = "pair"

    def Q(self, x):
        return self.q_map(np.asarray(x, dtype=float))

    def R(self, x):
        return self.r_map(np.asarray(x, dtype=float))

    def evaluate(self, x):
        return self.Q(x), self.R(x)


# -- planar construction ------------------------------------------------------


@dataclass(frozen=True)
class RetractionPair2D:
    """Planar pair with K1 = cone{e1, e2} (range of Q) and K3 = cone{u1, u2} (range of R).

    Going counterclockwise the generators appear as e1, e2, u1, u2, so the
    mixed sectors are K2 = cone{e2, u1} and K4 = cone{u2, e1}.
    """

    e1: tuple[float, float]
    e2: tuple[float, float]
    u1: tuple[float, float]
    u2: tuple[float, float]
    degenerate: bool = False
    m_degenerate: bool = False
    plane: Plane2D | None = field(default=None, compare=False)

    @property
    def sector_angles(self) -> tuple[float, float, float, float]:
        """Angles of K1, K2, K3, K4."""
        a1 = 0.0 if self.m_degenerate else ccw_angle(self.e1, self.e2)
        a3 = 0.0 if self.degenerate else ccw_angle(self.u1, self.u2)
        return a1, ccw_angle(self.e2, self.u1), a3, ccw_angle(self.u2, self.e1)

    @property
    def range_Q(self) -> PolyhedralCone:
        gens = [self.e1] if self.m_degenerate else [self.e1, self.e2]
        return PolyhedralCone(generators=gens, dim=2)

    @property
    def range_R(self) -> PolyhedralCone:
        gens = [self.u1] if self.degenerate else [self.u1, self.u2]
        return PolyhedralCone(generators=gens, dim=2)

    def evaluate(self, x):
        return eval_2d(self, x)

    def Q(self, x):
        return eval_2d(self, x)[0]

    def R(self, x):
        return eval_2d(self, x)[1]


def build_2d(K1: SectorCone2D, K3: SectorCone2D) -> RetractionPair2D:
    """Arrange two transversal planar cones into the four-sector picture.

    Either cone may be a single ray, but not both.
    """
    if K1.degenerate_ray and K3.degenerate_ray:
        raise NotTransversal2D("two rays cannot cover the plane")
    pair = RetractionPair2D(K1.g1, K1.g2, K3.g1, K3.g2,
                            degenerate=K3.degenerate_ray,
                            m_degenerate=K1.degenerate_ray,
                            plane=K1.plane)
    a1, a2, a3, a4 = pair.sector_angles
    gap = 1e-12
    if a2 <= gap or a4 <= gap:
        raise NotTransversal2D("the cones share a boundary ray")
    if abs(a1 + a2 + a3 + a4 - TWO_PI) > 1e-9:
        raise NotTransversal2D("the cones overlap")
    if a2 >= math.pi or a4 >= math.pi:
        raise NotTransversal2D("a mixed sector is not pointed")
    return pair


def _coeffs(a, b, x0, x1):
    return solve2x2(a[0], b[0], a[1], b[1], x0, x1)


def _on_ray(e, x0, x1, eps):
    return abs(e[0] * x1 - e[1] * x0) <= eps and e[0] * x0 + e[1] * x1 > 0


def eval_2d(pair: RetractionPair2D, x) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate (Qx, Rx) for a plane vector.

    Sectors are tried in the order K1, K3, K4, K2; on shared boundary rays
    the candidate formulas agree, so the order only settles round-off.
    """
    x0, x1 = float(x[0]), float(x[1])
    nx = math.hypot(x0, x1)
    if nx == 0:
        return np.zeros(2), np.zeros(2)
    eps = 1e-12 * nx
    e1, e2, u1, u2 = pair.e1, pair.e2, pair.u1, pair.u2

    if pair.m_degenerate:
        in_k1 = _on_ray(e1, x0, x1, eps)
    else:
        lam, mu = _coeffs(e1, e2, x0, x1)
        in_k1 = lam >= -eps and mu >= -eps
    if in_k1:
        return np.array([x0, x1]), np.zeros(2)

    if pair.degenerate:
        in_k3 = _on_ray(u1, x0, x1, eps)
    else:
        lam, mu = _coeffs(u1, u2, x0, x1)
        in_k3 = lam >= -eps and mu >= -eps
    if in_k3:
        return np.zeros(2), np.array([x0, x1])

    best = None
    for e, u in ((e1, u2), (e2, u1)):
        lam, mu = _coeffs(e, u, x0, x1)
        if lam >= -eps and mu >= -eps:
            best = (e, lam)
            break
        score = min(lam, mu)
        if best is None or score > best[2]:
            best = (e, lam, score)
    e, lam = best[0], max(best[1], 0.0)
    q = np.array([lam * e[0], lam * e[1]])
    return q, np.array([x0, x1]) - q


# -- transversal construction in R^d -----------------------------------------


def _slice_pair(M: PolyhedralCone, N: PolyhedralCone, P: Plane2D) -> RetractionPair2D:
    MP = intersect_with_plane(M, P)
    NP = intersect_with_plane(N, P)
    if MP is None or NP is None:
        raise SliceDegenerate("a plane through the transversal line meets a cone only at 0")
    return build_2d(MP, NP)


@dataclass(frozen=True, eq=False)
class TransversalRetractionPair:
    """Pair obtained by running the planar construction in every plane through a line."""

    M: PolyhedralCone
    N: PolyhedralCone
    delta_dir: np.ndarray
    config: ToleranceConfig = field(default_factory=ToleranceConfig)

    @property
    def range_Q(self):
        return self.M

    @property
    def range_R(self):
        return self.N

    def evaluate(self, x):
        return eval_transversal(self, x)

    def Q(self, x):
        return eval_transversal(self, x)[0]

    def R(self, x):
        return eval_transversal(self, x)[1]

    def slice_at(self, x) -> RetractionPair2D:
        """The planar pair acting on span{x, delta}."""
        return _slice_pair(self.M, self.N, plane_through(x, self.delta_dir, self.config))


def build_transversal(M: PolyhedralCone, N: PolyhedralCone,
                      cert: TransversalCertificate, seed: int = 0) -> TransversalRetractionPair:
    """Build the transversal pair for (M, N) with the certificate's line.

    Requires both cones solid, or N one-dimensional with M solid.
    """
    tol = M.tol
    if cert is None:
        raise HypothesisNotMet("no transversality certificate")
    fails = certificate_failures(M, N, cert)
    if fails:
        raise HypothesisNotMet("; ".join(fails))
    if cones_meet(M, N):
        raise HypothesisNotMet("M and N share a nonzero point")
    if not M.is_solid:
        raise HypothesisNotMet("M has empty interior")
    if not (N.is_solid or N.span_dim == 1):
        raise HypothesisNotMet("N is neither solid nor one-dimensional")
    pair = TransversalRetractionPair(M, N, np.asarray(cert.delta_dir, dtype=float), tol)

    rng = np.random.default_rng(seed)
    for x in rng.standard_normal((10, M.ambient_dim)):
        q, r = pair.evaluate(x)
        q2, r2 = pair.evaluate(q)
        q3, r3 = pair.evaluate(r)
        res = max(np.linalg.norm(q + r - x), np.linalg.norm(r2), np.linalg.norm(q3))
        if res > tol.violation * (1 + np.linalg.norm(x)):
            raise ConeRetractError(f"smoke evaluation failed with residual {res:.3g}")
    return pair


def eval_transversal(pair: TransversalRetractionPair, x) -> tuple[np.ndarray, np.ndarray]:
    x = as_vector(x, pair.M.ambient_dim)
    if not np.any(x):
        return np.zeros_like(x), np.zeros_like(x)
    if contains(pair.M, x):
        return x.copy(), np.zeros_like(x)
    if contains(pair.N, x):
        return np.zeros_like(x), x.copy()
    try:
        P = plane_through(x, pair.delta_dir, pair.config)
    except DegeneratePlane:
        # x lies on the transversal line itself, whose two halves are in M and N
        if x @ pair.delta_dir > 0:
            return x.copy(), np.zeros_like(x)
        return np.zeros_like(x), x.copy()
    p2 = _slice_pair(pair.M, pair.N, P)
    s, t = float(P.basis_a @ x), float(P.basis_b @ x)
    q2, _ = eval_2d(p2, (s, t))
    q = lift(P, q2[0], q2[1])
    return q, x - q


# -- one-range construction ---------------------------------------------------


def gauge_eval(D: PolytopeInHyperplane, y) -> float:
    """Gauge of D: the least t >= 0 with y in t*D."""
    return D.gauge(y)


@dataclass(frozen=True, eq=False)
class OneRangeRetraction:
    """``R x = q(x) u`` and ``Q = I - R`` for a solid M and N = ray{u}.

    Each x is split as ``x = t u + y`` with ``<f, y> = 0`` for the strictly
    positive functional ``f`` of the cone basis; then ``q(x) = (t + g(y))^+``
    with ``g`` the gauge of the translated basis.
    """

    u: np.ndarray
    basis_data: ConeBasisData
    M: PolyhedralCone

    @property
    def _fu(self) -> float:
        return float(self.basis_data.functional_f @ self.u)

    def chart(self, x) -> tuple[float, np.ndarray]:
        x = np.asarray(x, dtype=float)
        t = float(self.basis_data.functional_f @ x) / self._fu
        return t, x - t * self.u

    def g(self, y) -> float:
        return self.basis_data.base_D.gauge(y)

    def q(self, x) -> float:
        t, y = self.chart(x)
        rows = self.basis_data.base_D._gauge_amb
        return max(0.0, t + max(0.0, float(np.max(rows @ y))))

    def R(self, x):
        return self.q(x) * self.u

    def Q(self, x):
        x = np.asarray(x, dtype=float)
        return x - self.q(x) * self.u

    def evaluate(self, x):
        r = self.R(x)
        return np.asarray(x, dtype=float) - r, r

    def in_range_Q(self, x, tol: float | None = None) -> bool:
        """Membership in ``{t + g(y) <= 0}``, the range of Q."""
        tol = self.M.tol.base if tol is None else tol
        t, y = self.chart(x)
        return t + self.g(y) <= tol * float(np.linalg.norm(x))

    @property
    def range_Q(self) -> PolyhedralCone:
        return range_cone_of_Q(self)

    @property
    def range_R(self) -> PolyhedralCone:
        return PolyhedralCone.ray(self.u, tol=self.M.tol)


def build_one_range(M: PolyhedralCone, u) -> OneRangeRetraction:
    u = as_vector(u, M.ambient_dim)
    u = u / np.linalg.norm(u)
    return OneRangeRetraction(u, basis_on_hyperplane(M, u), M)


def range_cone_of_Q(r: OneRangeRetraction) -> PolyhedralCone:
    """Cone generated by the rays through ``-u + v`` for the vertices v of D."""
    return PolyhedralCone(generators=r.basis_data.base_D.vertices - r.u, tol=r.M.tol)
