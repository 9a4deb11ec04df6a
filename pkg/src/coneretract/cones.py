"""Polyhedral cones, planar sectors, transversality and cone bases."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import _dd
from ._nnls import nnls
from .config import ToleranceConfig, resolve
from .errors import (
    ConeRetractError,
    ConesIntersect,
    DimensionLimitExceeded,
    HypothesisNotMet,
    NoStrictFunctional,
    NotPointed,
    SliceDegenerate,
)
from .geometry import Plane2D, as_vector, cross2


def _clean_generators(G: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    """Rescale to unit length and merge directions closer than ``tol.parallel``."""
    out: list[np.ndarray] = []
    for g in G:
        n = np.linalg.norm(g)
        if n <= tol.absolute:
            raise ValueError("cone generators must be nonzero")
        g = g / n
        if any(np.linalg.norm(g - h) < tol.parallel for h in out):
            continue
        out.append(g)
    return np.array(out).reshape(-1, G.shape[1])


class PolyhedralCone:
    """A closed convex cone in R^d held in both V- and H-representation.

    ``x`` belongs to the cone iff ``<n, x> <= 0`` for every facet normal ``n``,
    equivalently iff ``x`` is a nonnegative combination of the generators.
    Whichever representation is missing is computed eagerly on construction
    (double description), so instances are immutable afterwards.
    """

    def __init__(self, generators=None, facets=None, dim: int | None = None,
                 tol: ToleranceConfig | None = None):
        self.tol = resolve(tol)
        if generators is None and facets is None:
            raise ValueError("need generators or facets")
        if dim is None:
            src = generators if generators is not None else facets
            arr = np.asarray(src, dtype=float)
            if arr.ndim != 2 or arr.shape[0] == 0:
                raise ValueError("cannot infer dimension; pass dim")
            dim = arr.shape[1]
        self.ambient_dim = int(dim)
        if self.ambient_dim < 1:
            raise ValueError("dimension must be positive")
        _check_dim(self.ambient_dim, self.tol)

        if generators is not None:
            G = np.asarray(generators, dtype=float).reshape(-1, self.ambient_dim)
            if not np.all(np.isfinite(G)):
                raise ValueError("generators must be finite")
            G = _clean_generators(G, self.tol)
        if facets is not None:
            F = np.asarray(facets, dtype=float).reshape(-1, self.ambient_dim)
            if not np.all(np.isfinite(F)):
                raise ValueError("facet normals must be finite")
            F = _dd._normalize_rows(F)

        if generators is None:
            G = _clean_generators(hrep_to_vrep_array(F, self.ambient_dim, self.tol), self.tol)
        elif facets is None:
            F = vrep_to_hrep_array(G, self.ambient_dim, self.tol)
        elif G.shape[0] and F.shape[0]:
            slack = (G @ F.T).max()
            if slack > 1e-9:
                raise ValueError(f"generator violates a facet inequality by {slack:.3g}")
        self.generators = G
        self.facets = F
        self.generators.setflags(write=False)
        self.facets.setflags(write=False)

    def __repr__(self):
        return (f"PolyhedralCone(dim={self.ambient_dim}, "
                f"generators={self.generators.shape[0]}, facets={self.facets.shape[0]})")

    @classmethod
    def orthant(cls, dim: int, tol: ToleranceConfig | None = None) -> "PolyhedralCone":
        return cls(generators=np.eye(dim), facets=-np.eye(dim), tol=tol)

    @classmethod
    def ray(cls, direction, tol: ToleranceConfig | None = None) -> "PolyhedralCone":
        d = as_vector(direction)
        return cls(generators=[d], tol=tol)

    def __neg__(self) -> "PolyhedralCone":
        return PolyhedralCone(generators=-self.generators, facets=-self.facets,
                              dim=self.ambient_dim, tol=self.tol)

    # -- queries -----------------------------------------------------------

    def contains(self, x, strict: bool = False, tol: float | None = None) -> bool:
        return contains(self, x, strict=strict, tol=tol)

    def facet_values(self, x) -> np.ndarray:
        return self.facets @ np.asarray(x, dtype=float)

    def violation(self, z) -> float:
        """How far ``z`` is outside the cone, measured on the unit facet normals."""
        if self.facets.shape[0] == 0:
            return 0.0
        return max(0.0, float(np.max(self.facets @ np.asarray(z, dtype=float))))

    def boundary_gap(self, x) -> float:
        """Distance-like margin of ``x`` from the boundary; 0 on the boundary."""
        if self.facets.shape[0] == 0:
            return math.inf
        return float(-np.max(self.facets @ np.asarray(x, dtype=float)))

    def contains_vrep(self, x, tol: float | None = None) -> bool:
        """Membership decided from generators alone (nonnegative least squares)."""
        x = as_vector(x, self.ambient_dim)
        tol = self.tol.base if tol is None else tol
        if self.generators.shape[0] == 0:
            return bool(np.linalg.norm(x) <= tol)
        _, rnorm = nnls(self.generators.T, x)
        return rnorm <= tol * max(1.0, np.linalg.norm(x))

    @property
    def is_solid(self) -> bool:
        G = self.generators
        return G.shape[0] > 0 and np.linalg.matrix_rank(G, tol=1e-9) == self.ambient_dim

    @property
    def span_dim(self) -> int:
        G = self.generators
        return 0 if G.shape[0] == 0 else int(np.linalg.matrix_rank(G, tol=1e-9))

    def is_pointed(self) -> bool:
        return is_pointed(self)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` random cone elements (random nonnegative generator mixtures)."""
        G = self.generators
        if G.shape[0] == 0:
            return np.zeros((n, self.ambient_dim))
        w = rng.exponential(size=(n, G.shape[0]))
        w *= rng.random((n, G.shape[0])) < 0.7
        w[np.arange(n), rng.integers(0, G.shape[0], n)] += rng.exponential(size=n)
        return w @ G

    def verify_representations(self, n: int = 1000, seed: int = 0) -> int:
        """Count sampled points on which H-rep and V-rep membership disagree."""
        rng = np.random.default_rng(seed)
        bad = 0
        for x in rng.standard_normal((n, self.ambient_dim)):
            h = self.contains(x, tol=1e-7)
            v = self.contains_vrep(x, tol=1e-7)
            margin = abs(self.boundary_gap(x)) if self.facets.shape[0] else 1.0
            if h != v and margin > 1e-6:
                bad += 1
        return bad


def contains(K: PolyhedralCone, x, strict: bool = False, tol: float | None = None) -> bool:
    """Membership test on the H-representation.

    The tolerance is relative to ``||x||`` so the answer is invariant under
    positive scaling. ``strict`` asks for the topological interior.
    """
    x = as_vector(x, K.ambient_dim)
    tol = K.tol.base if tol is None else tol
    nx = float(np.linalg.norm(x))
    vals = K.facets @ x
    if strict:
        if nx == 0:
            return K.facets.shape[0] == 0
        return bool(np.all(vals < -tol * nx))
    return bool(np.all(vals <= tol * nx))


def _check_dim(dim: int, tol: ToleranceConfig):
    if dim > tol.max_dim:
        raise DimensionLimitExceeded(f"dimension {dim} exceeds limit {tol.max_dim}")


def hrep_to_vrep_array(F, dim: int, tol: ToleranceConfig | None = None) -> np.ndarray:
    tol = resolve(tol)
    _check_dim(dim, tol)
    return _dd.generators_with_lineality(F, dim, tol.face_budget)


def vrep_to_hrep_array(G, dim: int, tol: ToleranceConfig | None = None) -> np.ndarray:
    # facet normals of cone(G) are the generators of its polar {y : G y <= 0}
    tol = resolve(tol)
    _check_dim(dim, tol)
    return _dd.generators_with_lineality(G, dim, tol.face_budget)


def vrep_to_hrep(K: PolyhedralCone) -> np.ndarray:
    return vrep_to_hrep_array(K.generators, K.ambient_dim, K.tol)


def hrep_to_vrep(K: PolyhedralCone) -> np.ndarray:
    return hrep_to_vrep_array(K.facets, K.ambient_dim, K.tol)


def polar(K: PolyhedralCone) -> PolyhedralCone:
    """Polar cone {y : <y, x> <= 0 for all x in K}.

    Its facet normals are the generators of K; its generators are K's facet
    normals, which already are the double-description output for that system.
    """
    return PolyhedralCone(generators=K.facets, facets=K.generators,
                          dim=K.ambient_dim, tol=K.tol)


def is_pointed(K: PolyhedralCone) -> bool:
    """True iff no nonzero x has both x and -x in K.

    Solved as the LP: find weights w >= 0, sum(w) = 1, G^T w = 0; a solution
    exists exactly when the cone contains a line.
    """
    G = K.generators
    m = G.shape[0]
    if m == 0:
        return True
    A_eq = np.vstack([G.T, np.ones((1, m))])
    b_eq = np.concatenate([np.zeros(K.ambient_dim), [1.0]])
    res = linprog(np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res.status != 0


def cones_meet(M: PolyhedralCone, N: PolyhedralCone) -> bool:
    """True iff M and N share a nonzero point (M assumed pointed)."""
    GM, GN = M.generators, N.generators
    if GM.shape[0] == 0 or GN.shape[0] == 0:
        return False
    m, n = GM.shape[0], GN.shape[0]
    A_eq = np.vstack([
        np.hstack([GM.T, -GN.T]),
        np.concatenate([np.ones(m), np.zeros(n)])[None, :],
    ])
    b_eq = np.concatenate([np.zeros(M.ambient_dim), [1.0]])
    res = linprog(np.zeros(m + n), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        return False
    # reject solutions that only meet at the origin up to LP round-off
    return bool(np.linalg.norm(GM.T @ res.x[:m]) > 1e-7)


# -- planar sectors ----------------------------------------------------------


@dataclass(frozen=True)
class SectorCone2D:
    """A pointed planar cone cone{g1, g2}, g1 -> g2 counterclockwise.

    Directions are unit vectors in the plane's (s, t) coordinates. A single
    ray is the degenerate case ``g1 == g2``.
    """

    plane: Plane2D | None
    g1: tuple[float, float]
    g2: tuple[float, float]
    degenerate_ray: bool = False

    def __post_init__(self):
        for g in (self.g1, self.g2):
            if abs(math.hypot(*g) - 1.0) > 1e-9:
                raise ValueError("sector generators must be unit vectors")
        if self.degenerate_ray:
            if math.hypot(self.g1[0] - self.g2[0], self.g1[1] - self.g2[1]) > 1e-9:
                raise ValueError("a degenerate sector needs g1 == g2")
        elif cross2(self.g1, self.g2) <= 0:
            raise ValueError("sector must turn counterclockwise by less than pi")

    @classmethod
    def from_vectors(cls, g1, g2=None, plane: Plane2D | None = None) -> "SectorCone2D":
        a = np.asarray(g1, dtype=float)
        a = tuple(float(v) for v in a / np.linalg.norm(a))
        if g2 is None:
            return cls(plane, a, a, True)
        b = np.asarray(g2, dtype=float)
        b = tuple(float(v) for v in b / np.linalg.norm(b))
        if cross2(a, b) < 0:
            a, b = b, a
        return cls(plane, a, b, False)

    @property
    def angle(self) -> float:
        if self.degenerate_ray:
            return 0.0
        return math.atan2(cross2(self.g1, self.g2), self.g1[0] * self.g2[0] + self.g1[1] * self.g2[1])


def _planar_generators(C: np.ndarray, tol: float = 1e-10):
    """Extreme rays of {w in R^2 : C w <= 0} for a pointed planar cone."""
    n = np.linalg.norm(C, axis=1)
    C = C[n > 1e-12] / n[n > 1e-12, None]
    if C.shape[0] == 0:
        raise SliceDegenerate("slice is the whole plane")
    perp = np.column_stack([-C[:, 1], C[:, 0]])
    cand = np.vstack([perp, -perp])
    ok = np.all(cand @ C.T <= tol, axis=1)
    W = cand[ok]
    if W.shape[0] == 0:
        return None
    w0 = W[0]
    rel = np.arctan2(W[:, 1] * w0[0] - W[:, 0] * w0[1], W @ w0)
    lo, hi = int(np.argmin(rel)), int(np.argmax(rel))
    span = rel[hi] - rel[lo]
    if span >= math.pi - 1e-12:
        raise SliceDegenerate("slice is not pointed")
    return W[lo], W[hi], span


def intersect_with_plane(K: PolyhedralCone, P: Plane2D) -> SectorCone2D | None:
    """Slice K by a plane through the origin.

    Returns a sector, a degenerate sector (single ray), or ``None`` when only
    the origin survives.
    """
    C = K.facets @ P.matrix
    if C.shape[0] == 0:
        raise SliceDegenerate("cone has no facets; slice is the whole plane")
    res = _planar_generators(C)
    if res is None:
        return None
    g1, g2, span = res
    if span <= 1e-12:
        return SectorCone2D.from_vectors(g1, plane=P)
    return SectorCone2D.from_vectors(g1, g2, plane=P)


# -- transversality ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TransversalCertificate:
    """A line through the origin meeting both cones, one of them in its interior.

    ``delta_dir`` is a unit vector pointing into M; ``-delta_dir`` lies in N.
    """

    delta_dir: np.ndarray
    witness_in_M: np.ndarray
    witness_in_N: np.ndarray
    interior_side: str

    def __post_init__(self):
        if self.interior_side not in ("M", "N"):
            raise ValueError("interior_side must be 'M' or 'N'")


def certificate_failures(M: PolyhedralCone, N: PolyhedralCone,
                         cert: TransversalCertificate) -> list[str]:
    """Re-check every condition of a certificate; return the failed ones."""
    fails = []
    d = np.asarray(cert.delta_dir, dtype=float)
    wm = np.asarray(cert.witness_in_M, dtype=float)
    wn = np.asarray(cert.witness_in_N, dtype=float)
    if abs(np.linalg.norm(d) - 1) > 1e-9:
        fails.append("delta_dir is not a unit vector")
    for name, w in (("witness_in_M", wm), ("witness_in_N", wn)):
        if np.linalg.norm(w) == 0:
            fails.append(f"{name} is zero")
        elif np.linalg.norm(w - (w @ d) * d) > 1e-9 * np.linalg.norm(w):
            fails.append(f"{name} is not on the transversal line")
    if not contains(M, wm):
        fails.append("witness_in_M is not in M")
    if not contains(N, wn):
        fails.append("witness_in_N is not in N")
    side = wm if cert.interior_side == "M" else wn
    cone = M if cert.interior_side == "M" else N
    if not contains(cone, side, strict=True):
        fails.append(f"transversal line does not meet the interior of {cert.interior_side}")
    return fails


def _certify(M, N, v) -> TransversalCertificate | None:
    nv = np.linalg.norm(v)
    if nv == 0:
        return None
    v = v / nv
    if not (contains(M, v) and contains(N, -v)):
        return None
    if contains(M, v, strict=True):
        side = "M"
    elif contains(N, -v, strict=True):
        side = "N"
    else:
        return None
    return TransversalCertificate(v, v.copy(), -v, side)


def is_transversal(M: PolyhedralCone, N: PolyhedralCone) -> TransversalCertificate | None:
    """Search for a transversal line of the pair (M, N).

    The candidate directions are finite: every generator of N (negated),
    every generator of M, and the normalized generator means. ``None`` means
    this search failed; it does not prove that no transversal line exists.

    Raises
    ------
    NotPointed
        If M or N contains a line.
    ConesIntersect
        If M and N share a nonzero point.
    """
    if M.ambient_dim != N.ambient_dim:
        raise ValueError("cones live in different dimensions")
    for name, K in (("M", M), ("N", N)):
        if not is_pointed(K):
            raise NotPointed(f"{name} is not pointed")
    if cones_meet(M, N):
        raise ConesIntersect("M and N share a nonzero point")
    candidates = [-u for u in N.generators]
    candidates += [g for g in M.generators]
    if M.generators.shape[0]:
        candidates.append(M.generators.mean(axis=0))
    if N.generators.shape[0]:
        candidates.append(-N.generators.mean(axis=0))
    for v in candidates:
        cert = _certify(M, N, np.asarray(v, dtype=float))
        if cert is not None:
            return cert
    return None


# -- bases of cones and gauges ------------------------------------------------


def _complement_basis(f: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the hyperplane orthogonal to f."""
    d = f.size
    q, _ = np.linalg.qr(np.column_stack([f, np.eye(d)]))
    return q[:, 1:d]


class PolytopeInHyperplane:
    """A polytope D given by vertices, lying in the hyperplane ``{<normal, y> = 0}``.

    With ``normal=None`` the polytope lives in the whole space. The origin must
    lie in the relative interior. Facets are derived once from the vertices by
    lifting D to the cone over {1} x D, which turns the gauge into a maximum
    of linear functionals.
    """

    def __init__(self, vertices, normal=None, tol: ToleranceConfig | None = None):
        self.tol = resolve(tol)
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] == 0:
            raise ValueError("need a non-empty vertex array")
        d = V.shape[1]
        self.vertices = V
        if normal is None:
            self.normal = None
            E = np.eye(d)
        else:
            f = as_vector(normal, d)
            f = f / np.linalg.norm(f)
            if np.max(np.abs(V @ f)) > 1e-9 * max(1.0, np.abs(V).max()):
                raise ValueError("vertices do not lie in the hyperplane")
            self.normal = f
            E = _complement_basis(f)
        self.frame = E
        k = E.shape[1]
        if k == 0:
            raise ValueError("hyperplane of R^1 is the origin only")
        lifted = np.hstack([np.ones((V.shape[0], 1)), V @ E])
        _check_dim(k + 1, self.tol)
        rays, lin = _dd.cone_generators(lifted, k + 1, self.tol.face_budget)
        if lin.shape[0] and np.max(np.abs(lin[:, 0])) > 1e-9:
            raise ValueError("origin is not in the affine hull of the polytope")
        if rays.shape[0] == 0 or np.max(rays[:, 0]) > -1e-9:
            raise ValueError("origin is not in the relative interior of the polytope")
        # facet a*t + <b, y> <= 0 with a < 0 gives  t >= <b, y> / (-a)
        self._gauge_rows = rays[:, 1:] / (-rays[:, :1])
        self._span_rows = lin[:, 1:]
        self._gauge_amb = self._gauge_rows @ E.T
        self._span_amb = self._span_rows @ E.T

    @property
    def origin_margin(self) -> float:
        """Distance from the origin to the relative boundary of D."""
        return float(1.0 / np.max(np.linalg.norm(self._gauge_rows, axis=1)))

    def gauge(self, y) -> float:
        """inf{t >= 0 : y in t*D}; +inf when y is outside the span of D."""
        y = np.asarray(y, dtype=float)
        ny = float(np.linalg.norm(y))
        if ny == 0:
            return 0.0
        if self.normal is not None and abs(self.normal @ y) > 1e-9 * ny:
            return math.inf
        if self._span_amb.shape[0] and np.max(np.abs(self._span_amb @ y)) > 1e-9 * ny:
            return math.inf
        return max(0.0, float(np.max(self._gauge_amb @ y)))

    def contains(self, y, tol: float | None = None) -> bool:
        tol = self.tol.base if tol is None else tol
        return self.gauge(y) <= 1.0 + tol

    def contains_hull(self, y, tol: float = 1e-9) -> bool:
        """Membership as a convex combination of vertices (LP); independent of the facets."""
        return self.contains_dilate(y, 1.0, tol)

    def contains_dilate(self, y, t: float, tol: float = 1e-9) -> bool:
        """Is y in t*D? LP ``V^T lam = y``, ``sum lam = t``, ``lam >= 0``.

        The feasibility tolerance acts on y itself, not on y / t, so the
        answer stays sharp when t is large.
        """
        V = self.vertices
        m = V.shape[0]
        A_eq = np.vstack([V.T, np.ones((1, m))])
        b_eq = np.concatenate([np.asarray(y, dtype=float), [float(t)]])
        res = linprog(np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs",
                      options={"primal_feasibility_tolerance": tol})
        return res.status == 0


@dataclass(frozen=True, eq=False)
class ConeBasisData:
    """A hyperplane cross-section of M and its translate D through the origin.

    ``functional_f`` is strictly positive on M minus the origin. The section
    ``B = M ∩ {<f, x> = <f, -u>}`` is shifted by ``u`` to give ``base_D``,
    which lies in ``{<f, x> = 0}`` and contains the origin in its relative
    interior.
    """

    functional_f: np.ndarray
    u: np.ndarray
    base_B: np.ndarray
    base_D: PolytopeInHyperplane
    level: float


def basis_on_hyperplane(M: PolyhedralCone, u) -> ConeBasisData:
    tol = M.tol
    u = as_vector(u, M.ambient_dim)
    if not M.is_solid:
        raise HypothesisNotMet("M has empty interior")
    if not is_pointed(M):
        raise HypothesisNotMet("M is not pointed")
    if not contains(M, -u, strict=True):
        raise HypothesisNotMet("-u is not in the interior of M")
    # inward normals span the dual cone; their sum is interior to it
    f = -M.facets.sum(axis=0)
    nf = np.linalg.norm(f)
    if nf <= tol.absolute:
        raise NoStrictFunctional("facet normals sum to zero")
    f = f / nf
    vals = M.generators @ f
    if np.min(vals) <= tol.base:
        raise NoStrictFunctional("functional is not strictly positive on every generator")
    level = float(f @ -u)
    B = M.generators * (level / vals)[:, None]
    D = PolytopeInHyperplane(B + u, normal=f, tol=tol)
    return ConeBasisData(f, u, B, D, level)
