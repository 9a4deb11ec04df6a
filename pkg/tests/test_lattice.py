import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from coneretract.analysis import (
    SampleSpec,
    check_isotone,
    check_mutual_polarity,
    check_retraction_axioms,
    check_subadditive,
)
from coneretract.cones import PolyhedralCone
from coneretract.lattice import SimplicialCone, abs_, coords, inf, positive_part, positive_part_pair, sup
from coneretract.moreau import project_polyhedral

SHEAR = SimplicialCone(np.array([[1.0, 1.0], [0.0, 1.0]]))  # basis (1,0), (1,1)


def test_coords_examples():
    O = SimplicialCone.orthant(2)
    assert np.allclose(coords(O, [3, -1]), [3, -1])
    assert np.allclose(coords(SHEAR, [0, 1]), [-1, 1])
    assert np.allclose(coords(SHEAR, [0, 0]), 0)


def test_positive_part_examples():
    assert np.allclose(positive_part(SimplicialCone.orthant(2), [3, -1]), [3, 0])
    assert np.allclose(positive_part(SHEAR, [0, 1]), [1, 1])
    assert np.allclose(SHEAR.negative_part([0, 1]), [1, 0])
    assert np.allclose(positive_part(SHEAR, [2, 1]), [2, 1])


def test_sup_inf_abs_examples():
    O = SimplicialCone.orthant(2)
    assert np.allclose(sup(O, [1, -1], [0, 3]), [1, 3])
    assert np.allclose(inf(O, [1, -1], [0, 3]), [0, -1])
    assert np.allclose(abs_(O, [3, -1]), [3, 1])
    assert np.allclose(sup(SHEAR, [0, 1], [1, 0]), [2, 1])


def test_positive_part_pair_examples():
    pair = positive_part_pair(SimplicialCone.orthant(2))
    assert np.allclose(pair.Q([3, -1]), [3, 0]) and np.allclose(pair.R([3, -1]), [0, -1])
    pair = positive_part_pair(SHEAR)
    q, r = pair.evaluate([0, 1])
    assert np.allclose(q, [1, 1]) and np.allclose(r, [-1, 0])
    assert np.allclose(pair.Q(r), 0)


def test_singular_basis_rejected():
    with pytest.raises(ValueError):
        SimplicialCone(np.array([[1.0, 2.0], [1.0, 2.0]]))


def random_simplicial(seed, d):
    rng = np.random.default_rng(seed)
    while True:
        B = rng.standard_normal((d, d))
        if abs(np.linalg.det(B)) > 0.2:
            return SimplicialCone(B)


vec = arrays(float, 3, elements=st.floats(-100, 100))


@settings(max_examples=40)
@given(st.integers(0, 1000), vec, vec)
def test_lattice_identities(seed, x, y):
    S = random_simplicial(seed, 3)
    K = S.as_polyhedral()
    s = 1 + np.linalg.norm(x) + np.linalg.norm(y)
    xp = S.positive_part(x)
    xm = S.negative_part(x)
    assert K.violation(xp) <= 1e-9 * s
    assert np.allclose(xp - xm, x, atol=1e-9 * s)
    assert np.linalg.norm(S.positive_part(x - xp)) <= 1e-9 * s
    assert np.allclose(S.abs(x), xp + xm, atol=1e-9 * s)
    hi = S.sup(x, y)
    assert K.violation(hi - x) <= 1e-9 * s and K.violation(hi - y) <= 1e-9 * s
    # sup is the least upper bound: sup(x, y) = x + (y - x)^+
    assert np.allclose(hi, x + S.positive_part(y - x), atol=1e-9 * s)
    assert np.allclose(S.inf(x, y), -S.sup(-x, -y), atol=1e-9 * s)
    assert S.leq(x, hi, tol=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_positive_part_suites(seed):
    S = random_simplicial(seed, 3)
    K = S.as_polyhedral()
    pair = positive_part_pair(S)
    spec = SampleSpec(3, n=2000, seed=seed)
    assert check_retraction_axioms(pair.Q, K, spec).violations == 0
    assert check_mutual_polarity(pair.Q, pair.R, spec).violations == 0
    assert check_isotone(pair.Q, K, spec).violations == 0
    assert check_subadditive(pair.Q, K, spec).violations == 0
    assert check_subadditive(pair.R, -K, spec).violations == 0


def test_orthant_positive_part_is_projection(rng):
    O = SimplicialCone.orthant(4)
    K = PolyhedralCone.orthant(4)
    for x in rng.standard_normal((200, 4)):
        assert np.allclose(O.positive_part(x), project_polyhedral(K, x), atol=1e-9)
