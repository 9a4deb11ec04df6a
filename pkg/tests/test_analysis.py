import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coneretract.analysis import (
    PropertyReport,
    SampleSpec,
    check_asymmetric_norm,
    check_generator_continuity,
    check_isotone,
    check_kernel_identity,
    check_mutual_polarity,
    check_retraction_axioms,
    check_subadditive,
    find_halo_witness,
    find_mprj_witness,
    interior_points,
    is_cartesian_orthant,
    oracle_gauge_bisection,
    oracle_project_sampling,
    subadditivity_residual,
)
from coneretract.cones import PolyhedralCone, PolytopeInHyperplane, SectorCone2D
from coneretract.errors import BracketFailure, BudgetExhausted
from coneretract.lattice import SimplicialCone, positive_part_pair
from coneretract.moreau import CircularCone
from coneretract.retractions import build_2d, build_one_range

O2 = PolyhedralCone.orthant(2)
S2 = SimplicialCone.orthant(2)


def clamp(x):
    return np.maximum(x, 0)


# -- planted failures and known passes -------------------------------------------------


def test_axioms_positive_part_pass():
    rep = check_retraction_axioms(S2.positive_part, O2, SampleSpec(2, n=10_000))
    assert rep.violations == 0 and rep.samples == 10_000 and rep.witness is None


def test_axioms_planted_idempotence_failure():
    rep = check_retraction_axioms(lambda x: 2 * np.asarray(x), O2, SampleSpec(2, n=200))
    assert rep.violations > 0
    assert rep.witness["breakdown"]["idempotence"] > 1e-8


def test_axioms_planar_pair_pass():
    pair = build_2d(SectorCone2D.from_vectors([1, 1], [-1, 1]), SectorCone2D.from_vectors([0, -1]))
    assert check_retraction_axioms(pair.Q, pair.range_Q, SampleSpec(2, n=2000)).violations == 0


def test_axioms_continuity_catches_steep_map():
    # homogeneous, range in the orthant, but wildly oscillating with the angle
    def steep(x):
        x = np.asarray(x, float)
        r, phi = np.hypot(*x), math.atan2(x[1], x[0])
        return r * np.array([1 + math.sin(5000 * phi), 1 + math.cos(5000 * phi)])

    rep = check_retraction_axioms(steep, O2, SampleSpec(2, n=300))
    assert rep.violations > 0
    assert any(rep.witness["breakdown"][k] > 0 for k in ("continuity", "idempotence"))


def test_polarity_planted_failure():
    rep = check_mutual_polarity(S2.positive_part, S2.positive_part, SampleSpec(2, n=100))
    assert rep.violations > 0 and rep.witness is not None


def test_polarity_one_range_pass():
    r = build_one_range(PolyhedralCone(generators=[[1, 1], [-1, 1]]), [0, -1])
    assert check_mutual_polarity(r.Q, r.R, SampleSpec(2, n=2000)).violations == 0


def test_subadditive_one_range_pass(square):
    r = build_one_range(square, [0, 0, -1])
    spec = SampleSpec(3, n=2000)
    assert check_subadditive(r.R, r.range_R, spec).violations == 0
    assert check_subadditive(r.Q, r.range_Q, spec).violations == 0


def test_subadditive_planted_failure():
    # T(x) = (min(x)^+, 0) is superadditive in min, hence not subadditive
    def T(x):
        return np.array([max(min(x[0], x[1]), 0.0), 0.0])

    rep = check_subadditive(T, O2, SampleSpec(2, n=500))
    assert rep.violations > 0
    x, y = rep.witness["inputs"]
    assert subadditivity_residual(T, O2, x, y) > 1e-8
    # composing the clamp with a rotation keeps it subadditive
    c, s = math.cos(0.7), math.sin(0.7)
    rot = np.array([[c, -s], [s, c]])
    assert check_subadditive(lambda v: clamp(rot @ v), O2, SampleSpec(2, n=500)).violations == 0


def test_isotone_passes_and_planted_failure(rng):
    S = SimplicialCone(np.array([[1.0, 0.4], [0.2, 1.0]]))
    assert check_isotone(S.positive_part, S.as_polyhedral(), SampleSpec(2, n=2000)).violations == 0
    assert check_isotone(clamp, O2, SampleSpec(2, n=2000)).violations == 0
    rep = check_isotone(lambda x: clamp(-np.asarray(x)), O2, SampleSpec(2, n=200))
    assert rep.violations > 0


def test_kernel_and_asymmetric_norm(square):
    r = build_one_range(square, [0.1, 0, -1])
    spec = SampleSpec(3, n=2000)
    assert check_kernel_identity(r.q, r.u, spec).violations == 0
    assert check_asymmetric_norm(r.q, spec).violations == 0


def test_asymmetric_norm_separation_planted():
    # the zero functional vanishes on every unit vector
    rep = check_asymmetric_norm(lambda x: 0.0, SampleSpec(2, n=50))
    assert rep.violations > 0


def test_generator_continuity():
    pair = build_2d(SectorCone2D.from_vectors([1, 0.2], [-0.3, 1]),
                    SectorCone2D.from_vectors([-1, -0.5], [0.4, -1]))
    pts = interior_points(pair, 200, seed=1)
    rep = check_generator_continuity(pair, pts)
    assert rep.violations == 0 and rep.worst_residual < 1e3


# -- reports ---------------------------------------------------------------------------


def test_report_determinism():
    a = check_subadditive(clamp, O2, SampleSpec(2, n=3000, seed=7))
    b = check_subadditive(clamp, O2, SampleSpec(2, n=3000, seed=7))
    assert a.to_json() == b.to_json()
    c, s = math.cos(0.5), math.sin(0.5)
    rot = np.array([[c, -s], [s, c]])
    f = lambda x: clamp(rot @ x)  # noqa: E731
    a = check_subadditive(f, O2, SampleSpec(2, n=3000, seed=7))
    b = check_subadditive(f, O2, SampleSpec(2, n=3000, seed=7))
    assert a.to_json() == b.to_json()


def test_chunk_partition_independent_of_total():
    spec = SampleSpec(3, n=2500, chunk=1000, seed=3)
    first = [rng.standard_normal(3) for _, _, rng in spec.chunk_rngs()]
    again = [rng.standard_normal(3) for _, _, rng in SampleSpec(3, n=5000, chunk=1000, seed=3).chunk_rngs()]
    assert all(np.array_equal(a, b) for a, b in zip(first, again))


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 3), st.floats(0, 1)), min_size=3, max_size=3))
def test_report_merge_associative(parts):
    reps = []
    for i, (s, v, w) in enumerate(parts):
        r = PropertyReport("p", samples=s + v, violations=v, worst_residual=w)
        if v:
            r.witness = {"chunk": i, "residual": w}
            r.status = "fail"
        reps.append(r)
    a, b, c = reps
    left = a.merge(b).merge(c)
    right = a.merge(b.merge(c))
    assert left.to_dict() == right.to_dict()
    assert (left.witness is not None) == (left.violations > 0)


def test_report_json_fields():
    rep = check_subadditive(clamp, O2, SampleSpec(2, n=10))
    d = json.loads(rep.to_json())
    for key in ("property", "samples", "violations", "worst_residual", "seed"):
        assert key in d
    assert "witness" not in d


# -- oracles -----------------------------------------------------------------------------


def test_gauge_bisection_examples():
    seg = PolytopeInHyperplane([[-1.0], [1.0]])
    assert oracle_gauge_bisection(seg.contains_dilate, [0.5]) == pytest.approx(0.5, abs=1e-6)
    seg2 = PolytopeInHyperplane([[-1.0], [3.0]])
    assert oracle_gauge_bisection(seg2.contains_dilate, [6.0]) == pytest.approx(2, abs=1e-6)
    assert oracle_gauge_bisection(seg2.contains_dilate, [0.0]) == 0


def test_gauge_bisection_bracket_failure():
    with pytest.raises(BracketFailure):
        oracle_gauge_bisection(lambda y, t: False, [1.0, 0.0])


def test_projection_oracle_examples():
    o = oracle_project_sampling(O2, np.array([1.0, -2.0]), n=2000)
    assert np.linalg.norm(o - [1, 0]) < 1e-9
    ray = PolyhedralCone(generators=[[1, 1]])
    assert np.allclose(oracle_project_sampling(ray, np.array([1.0, 0.0])), [0.5, 0.5])
    assert np.allclose(oracle_project_sampling(O2, np.array([2.0, 3.0])), [2, 3])


# -- witness searches -------------------------------------------------------------------------


def test_halo_square_witness(square):
    rep = find_halo_witness(square, SampleSpec(3, seed=0), max_pairs=20_000)
    assert rep.status == "fail"
    assert rep.witness["residual"] >= 10 * 1e-9
    assert rep.witness["reverified"]


def test_halo_orthant_plane_no_witness():
    rep = find_halo_witness(O2, SampleSpec(2), max_pairs=5000)
    assert rep.status == "pass" and rep.notes["expected_witness"] is False


def test_halo_lattice_pair_no_witness():
    S = SimplicialCone(np.array([[1, 0.3, 0], [0, 1, 0.2], [0.1, 0, 1.0]]))
    M = S.as_polyhedral()
    rep = find_halo_witness(M, SampleSpec(3), max_pairs=5000, pair=positive_part_pair(S))
    assert rep.status == "pass"


def test_halo_budget_exhausted(square):
    with pytest.raises(BudgetExhausted) as err:
        find_halo_witness(square, SampleSpec(3, seed=2), max_pairs=1)
    assert err.value.result.status == "inconclusive"


def test_mprj_orthant_pass():
    rep = find_mprj_witness(PolyhedralCone.orthant(3), SampleSpec(3), max_pairs=3000)
    assert rep.status == "pass"


def test_mprj_rotated_orthant_pass():
    c, s = math.cos(math.pi / 6), math.sin(math.pi / 6)
    K = PolyhedralCone(generators=[[c, s], [-s, c]])
    assert is_cartesian_orthant(K)
    rep = find_mprj_witness(K, SampleSpec(2), max_pairs=3000)
    assert rep.status == "pass"


def test_mprj_circular_witness():
    C = CircularCone([0, 0, 1], math.pi / 4)
    rep = find_mprj_witness(C, SampleSpec(3), max_pairs=20_000)
    assert rep.status == "fail" and rep.witness["reverified"]
