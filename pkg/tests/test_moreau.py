import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import lsq_linear

from coneretract._nnls import nnls
from coneretract.analysis import (
    SampleSpec,
    check_mutual_polarity,
    check_retraction_axioms,
    oracle_project_circular_grid,
)
from coneretract.cones import PolyhedralCone, contains, polar
from coneretract.moreau import (
    CircularCone,
    decompose,
    kkt_residual,
    project_circular,
    project_polyhedral,
    projection_pair,
)

from conftest import random_solid_cone


def test_project_orthant_examples():
    O = PolyhedralCone.orthant(2)
    assert np.allclose(project_polyhedral(O, [1, -2]), [1, 0])
    assert np.allclose(project_polyhedral(O, [3, 4]), [3, 4])


def test_project_onto_ray():
    K = PolyhedralCone(generators=[[1, 1]])
    assert np.allclose(project_polyhedral(K, [1, 0]), [0.5, 0.5])
    assert np.allclose(project_polyhedral(K, [-1, 0]), [0, 0])


def test_decompose_examples():
    d = decompose(PolyhedralCone.orthant(2), [1, -2])
    assert np.allclose(d.p, [1, 0]) and np.allclose(d.q, [0, -2]) and d.inner == 0
    assert d.ok
    d = decompose(PolyhedralCone.orthant(3), [1, 2, 3])
    assert np.allclose(d.p, [1, 2, 3]) and np.allclose(d.q, 0)


def test_decompose_wedge():
    K = PolyhedralCone(generators=[[1, 1], [-1, 1]])
    d = decompose(K, [2, 0])
    assert np.allclose(d.p, [1, 1]) and np.allclose(d.q, [1, -1])
    assert abs(d.inner) < 1e-12
    assert contains(polar(K), d.q)


def test_nnls_matches_bvls(rng):
    for k in range(300):
        m, n = rng.integers(2, 6), rng.integers(1, 10)
        A = rng.standard_normal((m, n)) * (100 if k % 5 == 0 else 1)
        if k % 3 == 0:
            A[:, -1] = 2 * A[:, 0]  # a duplicated direction
        b = rng.standard_normal(m) * 10
        x, rnorm = nnls(A, b)
        y = lsq_linear(A, b, bounds=(0, np.inf), method="bvls", tol=1e-14).x
        s = 1 + np.linalg.norm(b)
        assert np.all(x >= 0)
        assert rnorm == pytest.approx(np.linalg.norm(A @ x - b))
        assert np.linalg.norm(A @ x - A @ y) < 1e-9 * s
        # KKT: no column can still decrease the residual
        assert np.max(A.T @ (b - A @ x)) < 1e-9 * np.abs(A).max() * s


def test_nnls_noise_level_gradient():
    # exact fit with large coefficients: the dual gradient left over is pure
    # round-off and must not make the active set cycle
    A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1e-3, 1e-3, 2e-3 + 1e-15]]).T
    b = A @ np.array([150.0, 0.0, 10.0])
    x, rnorm = nnls(A, b)
    assert rnorm < 1e-10 * np.linalg.norm(b)


def test_projection_independent_of_generator_order(rng):
    K = random_solid_cone(rng, 4, n_gen=6)
    K2 = PolyhedralCone(generators=K.generators[::-1])
    for x in rng.standard_normal((50, 4)):
        assert np.allclose(project_polyhedral(K, x), project_polyhedral(K2, x), atol=1e-10)


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.integers(2, 4))
def test_decompose_invariants(seed, d):
    rng = np.random.default_rng(seed)
    K = random_solid_cone(rng, d, n_gen=int(rng.integers(d, 7)))
    for x in rng.standard_normal((40, d)) * 3:
        dec = decompose(K, x)
        assert dec.failures(1e-9) == []
        assert kkt_residual(K, x, dec.p) < 1e-9 * (1 + np.linalg.norm(x))
        # one-sided optimality against sampled cone points
        Y = K.sample(rng, 500)
        assert np.linalg.norm(x - dec.p) <= np.min(np.linalg.norm(Y - x, axis=1)) + 1e-6


def test_moreau_uniqueness_direction(rng):
    # a hand-built orthogonal split with parts in K and its polar is the projection
    K = PolyhedralCone(generators=[[1, 0.2, 0], [0, 1, 0.3], [0.1, 0, 1]])
    P = polar(K)
    for _ in range(50):
        i = rng.integers(0, 3)
        u = rng.random() * K.generators[i]
        # pick v on the polar face orthogonal to generator i
        normals = [g for g in P.generators if abs(g @ K.generators[i]) < 1e-12]
        v = sum(rng.random() * g for g in normals)
        x = u + v
        assert np.allclose(project_polyhedral(K, x), u, atol=1e-9)


def test_projection_pair_is_mutually_polar():
    K = PolyhedralCone.orthant(3)
    pair = projection_pair(K)
    spec = SampleSpec(3, n=2000)
    assert check_mutual_polarity(pair.Q, pair.R, spec).violations == 0
    assert check_retraction_axioms(pair.Q, K, spec).violations == 0
    assert check_retraction_axioms(pair.R, pair.range_R, spec).violations == 0


# -- circular cone ----------------------------------------------------------------


def test_circular_examples():
    C = CircularCone([0, 0, 1], math.pi / 4)
    assert np.allclose(project_circular(C, [0, 0, 2]), [0, 0, 2])
    assert np.allclose(project_circular(C, [0, 0, -2]), 0)
    assert np.allclose(project_circular(C, [1, 0, 0]), [0.5, 0, 0.5])


def test_circular_polar():
    C = CircularCone([0, 0, 1], math.pi / 6)
    P = C.polar()
    assert np.allclose(P.axis, [0, 0, -1]) and P.half_angle == pytest.approx(math.pi / 3)
    for ray in (C.boundary_ray(phi) for phi in np.linspace(0, 6, 7)):
        assert ray @ P.boundary_ray(0.3) <= 1e-12


def test_circular_matches_grid_oracle(rng):
    C = CircularCone([0, 0, 1], math.radians(35))
    for x in rng.standard_normal((100, 3)):
        p = project_circular(C, x)
        o = oracle_project_circular_grid(C, x, n=4000)
        assert np.linalg.norm(x - p) <= np.linalg.norm(x - o) + 1e-6
        assert np.linalg.norm(p - o) < 1e-2 * (1 + np.linalg.norm(x))


def test_circular_decompose(rng):
    C = CircularCone(rng.standard_normal(4), math.radians(50))
    for x in rng.standard_normal((200, 4)):
        assert decompose(C, x).ok


def test_circular_rejects_bad_angle():
    with pytest.raises(ValueError):
        CircularCone([0, 1], math.pi / 2)
