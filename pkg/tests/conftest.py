import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from coneretract.cones import PolyhedralCone

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def square_cone():
    """Cone over the square [-1, 1]^2 x {1}; solid, pointed, not simplicial."""
    return PolyhedralCone(generators=[[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]])


def random_solid_cone(rng, dim, n_gen=None, axis=None):
    """Generators scattered around ``axis`` (default e_d), so the cone is pointed and solid."""
    n_gen = n_gen or dim + int(rng.integers(0, 3))
    axis = np.eye(dim)[-1] if axis is None else np.asarray(axis, float)
    while True:
        G = rng.standard_normal((n_gen, dim)) * 0.6 + 1.5 * axis
        K = PolyhedralCone(generators=G)
        if K.is_solid and K.is_pointed:
            return K


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def square():
    return square_cone()


def random_quadruple(rng, degenerate=False, min_gap=0.15):
    """Sector generators e1, e2, u1, u2 (counterclockwise) of a random transversal planar pair.

    Every sector angle is at least ``min_gap`` and below pi; with
    ``degenerate`` the cone K3 collapses to the ray u1 = u2.
    """
    from coneretract.cones import SectorCone2D

    while True:
        w = rng.dirichlet(np.ones(3 if degenerate else 4))
        angles = 2 * np.pi * w
        if angles.min() < min_gap or angles.max() > np.pi - min_gap:
            continue
        if degenerate:
            angles = np.array([angles[0], angles[1], 0.0, angles[2]])
        start = rng.uniform(0, 2 * np.pi)
        th = start + np.concatenate([[0.0], np.cumsum(angles[:3])])
        e1, e2, u1, u2 = (np.array([np.cos(t), np.sin(t)]) for t in th)
        K1 = SectorCone2D.from_vectors(e1, e2)
        K3 = SectorCone2D.from_vectors(u1) if degenerate else SectorCone2D.from_vectors(u1, u2)
        return K1, K3


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE = {}


def record_acceptance(number, title, ok, detail=""):
    line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
