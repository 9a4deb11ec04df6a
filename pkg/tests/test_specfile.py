import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coneretract.cones import PolyhedralCone
from coneretract.moreau import CircularCone
from coneretract.specfile import ConeSpecFile, SpecError, load, loads, parse_spec

DATA = Path(__file__).parent / "data"


def test_single_cone_layout():
    spec = load(DATA / "orthant2.json")
    assert spec.dim == 2 and spec.names == ["K"]
    K = spec.build("K")
    assert isinstance(K, PolyhedralCone) and K.contains([1, 2]) and not K.contains([-1, 0.5])


def test_named_cones_and_kinds():
    spec = load(DATA / "space3.json")
    assert spec.names == ["SQ", "SQN", "DOWN", "O", "ON", "C"]
    assert spec.build("DOWN").span_dim == 1
    assert spec.build("O").generators.shape == (3, 3)
    assert spec.build("ON").contains([-1, -2, -3])
    C = spec.build("C")
    assert isinstance(C, CircularCone) and C.half_angle == pytest.approx(math.pi / 4)
    assert np.allclose(spec.simplicial("O").basis, np.eye(3))


@pytest.mark.parametrize("name", ["orthant2.json", "quadrant.json", "space3.json"])
def test_roundtrip_files(name):
    spec = load(DATA / name)
    again = loads(spec.dumps())
    assert again == spec
    assert loads(again.dumps()).dumps() == spec.dumps()


vectors = st.lists(st.floats(-1e6, 1e6, allow_nan=False, allow_subnormal=False), min_size=3, max_size=3)


@given(st.lists(vectors, min_size=1, max_size=5), st.sampled_from(["polyhedral", "ray", "circular"]),
       st.floats(1, 89))
def test_roundtrip_property(gens, kind, angle):
    if kind == "ray":
        entry = {"name": "A", "kind": "ray", "generators": gens[:1]}
    elif kind == "circular":
        entry = {"name": "A", "kind": "circular", "axis": gens[0], "half_angle_deg": angle}
    else:
        entry = {"name": "A", "generators": gens}
    spec = parse_spec({"dim": 3, "cones": [entry]})
    assert parse_spec(json.loads(spec.dumps())) == spec


@pytest.mark.parametrize("doc, msg", [
    ("not json", "invalid JSON"),
    ('{"dim": 2, "generators": [[1]]}', "length 2"),
    ('{"dim": 0, "generators": [[1]]}', "dim"),
    ('{"dim": 2, "generators": [[1, 0]], "colour": 1}', "unknown"),
    ('{"dim": 2, "cones": [{"name": "A", "generators": [[1, 0]], "weight": 2}]}', "unknown"),
    ('{"dim": 2, "cones": [{"name": "A", "kind": "pyramid", "generators": [[1, 0]]}]}', "kind"),
    ('{"dim": 2, "cones": [{"name": "A", "kind": "ray", "generators": [[1, 0], [0, 1]]}]}', "one generator"),
    ('{"dim": 2, "cones": [{"name": "A", "kind": "simplicial", "generators": [[1, 0]]}]}', "exactly 2"),
    ('{"dim": 2, "cones": [{"name": "A", "kind": "circular", "axis": [0, 1], "half_angle_deg": 95}]}', "half_angle"),
    ('{"dim": 2, "cones": [{"name": "A", "generators": [[1, 0]]}, {"name": "A", "generators": [[0, 1]]}]}', "unique"),
    ('{"dim": 2, "cones": [{"name": "A"}]}', "generators or facets"),
    ('{"dim": 2, "cones": [{"name": "A", "generators": [[1, "x"]]}]}', "non-numeric"),
])
def test_rejections(doc, msg):
    with pytest.raises(SpecError, match=msg):
        loads(doc)


def test_unknown_cone_name():
    with pytest.raises(SpecError, match="no cone named"):
        load(DATA / "quadrant.json").build("Z")


def test_missing_file(tmp_path):
    with pytest.raises(SpecError):
        load(tmp_path / "absent.json")


def test_spec_entries_are_immutable():
    spec = load(DATA / "quadrant.json")
    assert isinstance(spec, ConeSpecFile)
    with pytest.raises(Exception):
        spec.dim = 3
