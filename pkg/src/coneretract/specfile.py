"""JSON cone-spec files.

Two layouts are accepted::

    {"dim": 2, "generators": [[1, 0], [0, 1]]}            # one cone, named "K"
    {"dim": 3, "cones": [{"name": "M", "kind": "polyhedral", "generators": ...},
                         {"name": "C", "kind": "circular",
                          "axis": [0, 0, 1], "half_angle_deg": 30}]}

Kinds: ``polyhedral`` (generators and/or facets), ``simplicial`` (exactly
``dim`` independent generators), ``ray`` (one generator) and ``circular``.
Unknown keys are rejected so that typos surface as parse errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cones import PolyhedralCone
from .lattice import SimplicialCone
from .moreau import CircularCone

KINDS = ("polyhedral", "simplicial", "ray", "circular")
_ENTRY_KEYS = {"name", "kind", "generators", "facets", "axis", "half_angle_deg"}


class SpecError(ValueError):
    """Malformed cone-spec document."""


def _vectors(value, dim, what):
    if not isinstance(value, list) or not all(isinstance(v, list) for v in value):
        raise SpecError(f"{what} must be a list of vectors")
    out = []
    for v in value:
        out.append(_vector(v, dim, what))
    return out


def _vector(v, dim, what):
    if not isinstance(v, list) or len(v) != dim:
        raise SpecError(f"{what}: every vector must have length {dim}")
    try:
        vals = [float(c) for c in v]
    except (TypeError, ValueError):
        raise SpecError(f"{what}: non-numeric entry") from None
    if not all(math.isfinite(c) for c in vals):
        raise SpecError(f"{what}: non-finite entry")
    return vals


@dataclass(frozen=True)
class ConeEntry:
    name: str
    kind: str = "polyhedral"
    generators: tuple | None = None
    facets: tuple | None = None
    axis: tuple | None = None
    half_angle_deg: float | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "kind": self.kind}
        for key in ("generators", "facets"):
            val = getattr(self, key)
            if val is not None:
                d[key] = [list(v) for v in val]
        if self.axis is not None:
            d["axis"] = list(self.axis)
        if self.half_angle_deg is not None:
            d["half_angle_deg"] = self.half_angle_deg
        return d


@dataclass(frozen=True)
class ConeSpecFile:
    dim: int
    cones: tuple[ConeEntry, ...] = field(default_factory=tuple)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.cones]

    def entry(self, name: str) -> ConeEntry:
        for c in self.cones:
            if c.name == name:
                return c
        raise SpecError(f"no cone named {name!r}; available: {', '.join(self.names)}")

    def build(self, name: str, tol=None):
        """Instantiate a cone: PolyhedralCone, or CircularCone for that kind."""
        e = self.entry(name)
        if e.kind == "circular":
            return CircularCone(e.axis, math.radians(e.half_angle_deg))
        try:
            if e.kind == "simplicial":
                K = SimplicialCone(np.array(e.generators).T).as_polyhedral()
                return K if tol is None else PolyhedralCone(K.generators, K.facets, self.dim, tol)
            return PolyhedralCone(generators=e.generators, facets=e.facets, dim=self.dim, tol=tol)
        except ValueError as exc:
            raise SpecError(f"cone {name!r}: {exc}") from None

    def simplicial(self, name: str) -> SimplicialCone:
        e = self.entry(name)
        if e.kind != "simplicial":
            raise SpecError(f"cone {name!r} is not tagged simplicial")
        return SimplicialCone(np.array(e.generators).T)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "cones": [c.to_dict() for c in self.cones]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _parse_entry(raw, dim, index) -> ConeEntry:
    if not isinstance(raw, dict):
        raise SpecError(f"cone #{index} must be an object")
    extra = set(raw) - _ENTRY_KEYS
    if extra:
        raise SpecError(f"cone #{index}: unknown fields {sorted(extra)}")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise SpecError(f"cone #{index}: missing name")
    kind = raw.get("kind", "polyhedral")
    if kind not in KINDS:
        raise SpecError(f"cone {name!r}: unknown kind {kind!r}")
    gens = raw.get("generators")
    facets = raw.get("facets")
    if gens is not None:
        gens = tuple(tuple(v) for v in _vectors(gens, dim, f"{name}.generators"))
    if facets is not None:
        facets = tuple(tuple(v) for v in _vectors(facets, dim, f"{name}.facets"))

    if kind == "circular":
        if gens is not None or facets is not None:
            raise SpecError(f"cone {name!r}: circular cones take axis and half_angle_deg only")
        if "axis" not in raw or "half_angle_deg" not in raw:
            raise SpecError(f"cone {name!r}: circular cones need axis and half_angle_deg")
        axis = tuple(_vector(raw["axis"], dim, f"{name}.axis"))
        ang = raw["half_angle_deg"]
        if isinstance(ang, bool) or not isinstance(ang, (int, float)) or not 0 < ang < 90:
            raise SpecError(f"cone {name!r}: half_angle_deg must lie in (0, 90)")
        return ConeEntry(name, kind, axis=axis, half_angle_deg=float(ang))

    if "axis" in raw or "half_angle_deg" in raw:
        raise SpecError(f"cone {name!r}: axis/half_angle_deg only apply to circular cones")
    if gens is None and facets is None:
        raise SpecError(f"cone {name!r}: needs generators or facets")
    if kind == "ray" and (gens is None or len(gens) != 1 or facets is not None):
        raise SpecError(f"cone {name!r}: a ray takes exactly one generator")
    if kind == "simplicial" and (gens is None or len(gens) != dim):
        raise SpecError(f"cone {name!r}: a simplicial cone takes exactly {dim} generators")
    return ConeEntry(name, kind, generators=gens, facets=facets)


def parse_spec(doc) -> ConeSpecFile:
    """Validate a decoded JSON document."""
    if not isinstance(doc, dict):
        raise SpecError("top level must be an object")
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SpecError("dim must be a positive integer")
    if "cones" in doc:
        extra = set(doc) - {"dim", "cones"}
        if extra:
            raise SpecError(f"unknown top-level fields {sorted(extra)}")
        if not isinstance(doc["cones"], list) or not doc["cones"]:
            raise SpecError("cones must be a non-empty list")
        entries = tuple(_parse_entry(c, dim, i) for i, c in enumerate(doc["cones"]))
        names = [e.name for e in entries]
        if len(set(names)) != len(names):
            raise SpecError("cone names must be unique")
        return ConeSpecFile(dim, entries)
    extra = set(doc) - {"dim", "generators", "facets"}
    if extra:
        raise SpecError(f"unknown top-level fields {sorted(extra)}")
    single = {k: v for k, v in doc.items() if k != "dim"}
    single["name"] = "K"
    return ConeSpecFile(dim, (_parse_entry(single, dim, 0),))


def loads(text: str) -> ConeSpecFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from None
    return parse_spec(doc)


def load(path) -> ConeSpecFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None
    return loads(text)
