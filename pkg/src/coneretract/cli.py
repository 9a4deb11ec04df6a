"""Command-line front end.

Subcommands: project, retract, one-range, check, plot, fuzz. Structured
results go to stdout (or ``--out``) as JSON; see ``coneretract <cmd> -h``.

Exit codes: 0 ok, 1 usage/parse error, 2 property violation, 3 construction
hypothesis not met, 4 a required witness search was inconclusive.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import specfile, svg
from .analysis import (
    SampleSpec,
    check_isotone,
    check_mutual_polarity,
    check_retraction_axioms,
    check_subadditive,
    environment_header,
    find_halo_witness,
    find_mprj_witness,
)
from .cones import PolyhedralCone, intersect_with_plane, is_transversal
from .config import ENV_TOL, ToleranceConfig
from .errors import (
    BudgetExhausted,
    ConeRetractError,
    ConesIntersect,
    HypothesisNotMet,
    NoStrictFunctional,
    NotPointed,
    NotTransversal2D,
)
from .geometry import Plane2D, plane_through
from .lattice import SimplicialCone, positive_part_pair
from .moreau import CircularCone, decompose, projection_pair
from .retractions import build_2d, build_one_range, build_transversal

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_HYPOTHESIS, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
CONSTRUCTIONS = ("auto", "transversal", "one-range", "lattice")


HYPOTHESIS_ERRORS = (HypothesisNotMet, NotPointed, ConesIntersect, NoStrictFunctional,
                     NotTransversal2D)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs.

    Defaults: seed 0, samples 10000 for ``check`` (10^5 pair budget for
    ``fuzz``), grid 9 for ``plot``, construction ``auto``, fuzz mode ``halo``.
    The base tolerance comes from ``--tol``, then ``CONERETRACT_TOL``, then 1e-9.
    """

    command: str
    spec: str
    cone: str | None = None
    m: str | None = None
    n: str | None = None
    x: tuple = ()
    seed: int = 0
    samples: int | None = None
    tol: float | None = None
    out: str | None = None
    csv: str | None = None
    grid: int = 9
    construction: str = "auto"
    mode: str = "halo"

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise UsageError(f"unknown configuration fields: {sorted(extra)}")
        return cls(**data)

    def tolerances(self, environ=None) -> ToleranceConfig:
        try:
            cfg = ToleranceConfig.from_env(os.environ if environ is None else environ)
        except ValueError as exc:
            raise UsageError(f"bad {ENV_TOL}: {exc}") from None
        if self.tol is not None:
            try:
                cfg = cfg.with_base(self.tol)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _vector_arg(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from None
    if not vals or not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"not a finite vector: {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coneretract", description="Retraction pairs and projections on cones.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, cone=False, pair=False, xs=False):
        sp.add_argument("--spec", required=True, help="cone-spec JSON file")
        if cone:
            sp.add_argument("--cone", required=True, help="cone name in the spec file")
        if pair:
            sp.add_argument("--m", required=True, help="range cone of Q")
            sp.add_argument("--n", help="range cone of R")
        if xs:
            sp.add_argument("--x", action="append", type=_vector_arg, default=[],
                            help='point "v1,v2,..."; repeatable')
        sp.add_argument("--tol", type=float, help="base tolerance (overrides %s)" % ENV_TOL)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write JSON (SVG for plot) here instead of stdout")

    sp = sub.add_parser("project", help="Moreau decomposition of points")
    common(sp, cone=True, xs=True)

    for name, hlp in (("retract", "evaluate a mutually polar retraction pair"),
                      ("one-range", "one-range retraction for a ray N")):
        sp = sub.add_parser(name, help=hlp)
        common(sp, pair=True, xs=True)
        if name == "retract":
            sp.add_argument("--construction", choices=CONSTRUCTIONS, default="auto")

    sp = sub.add_parser("check", help="run the property suites on a pair")
    common(sp, pair=True)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--construction", choices=CONSTRUCTIONS, default="auto")

    sp = sub.add_parser("plot", help="SVG of the planar sectors and the field x -> Qx")
    common(sp, pair=True, xs=True)
    sp.add_argument("--grid", type=int, default=9, help="grid points per axis")
    sp.add_argument("--csv", help="also dump the field as CSV")

    sp = sub.add_parser("fuzz", help="witness search for the order-theoretic theorems")
    common(sp, pair=True)
    sp.add_argument("--mode", choices=("halo", "mprj"), default="halo")
    sp.add_argument("--samples", type=int, default=100_000, help="pair budget")
    sp.add_argument("--construction", choices=("transversal", "lattice"), default="transversal")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    data = dict(vars(ns))
    if "x" in data:
        data["x"] = tuple(data["x"])
    return RunConfig.from_mapping(data)


# -- helpers -------------------------------------------------------------------


def _emit(cfg: RunConfig, payload, stream=None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
    if cfg.out and cfg.command != "plot":
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=stream or sys.stdout)


def _json_default(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    raise TypeError(f"not JSON serializable: {type(v).__name__}")


def _points(cfg: RunConfig, dim: int) -> list[np.ndarray]:
    pts = []
    for v in cfg.x:
        if len(v) != dim:
            raise UsageError(f"--x {','.join(map(str, v))}: expected {dim} components")
        pts.append(np.array(v))
    return pts


def _polyhedral(spec, name, tol) -> PolyhedralCone:
    K = spec.build(name, tol)
    if not isinstance(K, PolyhedralCone):
        raise UsageError(f"cone {name!r} must be polyhedral for this command")
    return K


def build_pair(spec, cfg: RunConfig, tol: ToleranceConfig):
    """Pick and build the retraction pair for ``--m``/``--n``.

    ``auto`` uses the one-range construction when N is a ray and the
    transversal construction otherwise.
    """
    M = _polyhedral(spec, cfg.m, tol)
    if cfg.construction == "lattice":
        if cfg.n is not None:
            N = _polyhedral(spec, cfg.n, tol)
            if not (all(M.contains(-g) for g in N.generators)
                    and all(N.contains(-g) for g in M.generators)):
                raise HypothesisNotMet("the lattice pair needs N = -M")
        if M.generators.shape[0] != M.ambient_dim or not M.is_solid:
            raise HypothesisNotMet("the lattice pair needs a simplicial M")
        return positive_part_pair(SimplicialCone(M.generators.T)), "lattice"
    if cfg.n is None:
        raise UsageError("--n is required for this construction")
    N = _polyhedral(spec, cfg.n, tol)
    one_range = N.span_dim == 1
    if cfg.construction == "one-range" or (cfg.construction == "auto" and one_range):
        if not one_range:
            raise HypothesisNotMet("the one-range construction needs a one-dimensional N")
        if not M.is_solid:
            raise HypothesisNotMet("M has empty interior")
        return build_one_range(M, N.generators[0]), "one-range"
    cert = is_transversal(M, N)
    if cert is None:
        raise HypothesisNotMet("no transversal line found for (M, N)")
    return build_transversal(M, N, cert, seed=cfg.seed), "transversal"


def _pair_residuals(pair, x):
    q, r = pair.evaluate(x)
    return q, r, {"sum": float(np.linalg.norm(q + r - x)),
                  "QR": float(np.linalg.norm(pair.Q(r))),
                  "RQ": float(np.linalg.norm(pair.R(q)))}


# -- subcommands -----------------------------------------------------------------


def cmd_project(spec, cfg: RunConfig, tol: ToleranceConfig) -> int:
    K = spec.build(cfg.cone, tol)
    dim = K.axis.size if isinstance(K, CircularCone) else K.ambient_dim
    pts = _points(cfg, dim)
    if not pts:
        raise UsageError("project needs at least one --x")
    out, code = [], EXIT_OK
    for x in pts:
        dec = decompose(K, x)
        fails = dec.failures(tol.base)
        if fails:
            code = EXIT_VIOLATION
        d = dec.to_dict()
        d["failed"] = fails
        out.append(d)
    _emit(cfg, out[0] if len(out) == 1 else {"cone": cfg.cone, "points": out})
    return code


def cmd_retract(spec, cfg: RunConfig, tol: ToleranceConfig) -> int:
    pair, kind = build_pair(spec, cfg, tol)
    pts = _points(cfg, spec.dim)
    if not pts:
        raise UsageError("retract needs at least one --x")
    rows, code = [], EXIT_OK
    for x in pts:
        q, r, res = _pair_residuals(pair, x)
        if max(res.values()) > tol.violation * (1 + float(np.linalg.norm(x))):
            code = EXIT_VIOLATION
        rows.append({"x": x, "Qx": q, "Rx": r, "residuals": res})
    if len(rows) == 1:
        payload = dict(rows[0], construction=kind)
    else:
        payload = {"construction": kind, "points": rows}
    _emit(cfg, payload)
    return code


def cmd_one_range(spec, cfg: RunConfig, tol: ToleranceConfig) -> int:
    if cfg.n is None:
        raise UsageError("one-range needs --n naming a ray")
    cfg = RunConfig.from_mapping(dict(asdict(cfg), construction="one-range"))
    pair, _ = build_pair(spec, cfg, tol)
    data = pair.basis_data
    payload = {"u": pair.u, "functional_f": data.functional_f, "level": data.level,
               "base_vertices": data.base_D.vertices, "points": []}
    code = EXIT_OK
    for x in _points(cfg, spec.dim):
        t, y = pair.chart(x)
        qx = pair.q(x)
        kernel = abs(pair.q(x - qx * pair.u))
        if kernel > tol.violation * (1 + float(np.linalg.norm(x))):
            code = EXIT_VIOLATION
        payload["points"].append({"x": x, "t": t, "g": pair.g(y), "q": qx,
                                  "Qx": pair.Q(x), "Rx": pair.R(x),
                                  "kernel_residual": kernel})
    _emit(cfg, payload)
    return code


def _suites(pair, dim: int, cfg: RunConfig, tol: ToleranceConfig):
    spec = SampleSpec(dim, n=cfg.samples, seed=cfg.seed)
    MQ, MR = pair.range_Q, pair.range_R
    return [
        check_retraction_axioms(pair.Q, MQ, spec, tol),
        _renamed(check_retraction_axioms(pair.R, MR, spec, tol), "retraction_axioms_R"),
        check_mutual_polarity(pair.Q, pair.R, spec, tol),
        check_subadditive(pair.Q, MQ, spec, tol, name="subadditive_Q"),
        check_subadditive(pair.R, MR, spec, tol, name="subadditive_R"),
        check_isotone(pair.Q, MQ, spec, tol, name="isotone_Q"),
        check_isotone(pair.R, MR, spec, tol, name="isotone_R"),
    ]


def _renamed(report, name):
    report.property = name
    return report


def cmd_check(spec, cfg: RunConfig, tol: ToleranceConfig) -> int:
    if cfg.samples is None or cfg.samples < 1:
        raise UsageError("--samples must be positive")
    if cfg.n is None and cfg.construction != "lattice":
        K = spec.build(cfg.m, tol)
        pair, kind = projection_pair(K), "projection"
        dim = K.axis.size if isinstance(K, CircularCone) else K.ambient_dim
    else:
        pair, kind = build_pair(spec, cfg, tol)
        dim = spec.dim
    reports = _suites(pair, dim, cfg, tol)
    reports[0].property = "retraction_axioms_Q"
    lines = [f"construction: {kind}"] + [r.summary_line() for r in reports]
    payload = {"construction": kind, "environment": environment_header(),
               "tolerance": tol.base, "reports": [r.to_dict() for r in reports]}
    # with --out the table goes to stdout and JSON to the file; without it
    # stdout carries the JSON alone and the table moves to stderr
    print("\n".join(lines), file=sys.stdout if cfg.out else sys.stderr)
    _emit(cfg, payload)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def _planar_pair(spec, cfg: RunConfig, tol: ToleranceConfig):
    if cfg.n is None:
        raise UsageError("plot needs --m and --n")
    M = _polyhedral(spec, cfg.m, tol)
    N = _polyhedral(spec, cfg.n, tol)
    if spec.dim == 2:
        P = Plane2D(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    elif spec.dim == 3:
        pts = _points(cfg, 3)
        if len(pts) != 1:
            raise UsageError("a 3-D plot needs exactly one --x fixing the slice plane")
        cert = is_transversal(M, N)
        if cert is None:
            raise HypothesisNotMet("no transversal line found for (M, N)")
        P = plane_through(pts[0], cert.delta_dir, tol)
    else:
        raise UsageError(f"plot supports dim 2 or 3, not {spec.dim}")
    MP, NP = intersect_with_plane(M, P), intersect_with_plane(N, P)
    if MP is None or NP is None:
        raise HypothesisNotMet("a cone meets the plot plane only at the origin")
    try:
        return build_2d(MP, NP)
    except NotTransversal2D as exc:
        raise HypothesisNotMet(str(exc)) from None


def cmd_plot(spec, cfg: RunConfig, tol: ToleranceConfig) -> int:
    if cfg.grid < 0:
        raise UsageError("--grid must be nonnegative")
    pair = _planar_pair(spec, cfg, tol)
    doc = svg.render(pair, cfg.grid, title=f"{cfg.m} / {cfg.n}")
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        sys.stdout.write(doc)
    if cfg.csv:
        with open(cfg.csv, "w", encoding="utf-8") as fh:
            fh.write(svg.render_csv(pair, cfg.grid))
    return EXIT_OK


def cmd_fuzz(spec, cfg: RunConfig, tol: ToleranceConfig) -> int:
    """Witness search; exit 0 when the outcome is the one the theorem predicts."""
    sample = SampleSpec(spec.dim, seed=cfg.seed)
    if cfg.mode == "mprj":
        K = spec.build(cfg.m, tol)
        report = find_mprj_witness(K, sample, max_pairs=cfg.samples, require=False, tol=tol)
    else:
        M = _polyhedral(spec, cfg.m, tol)
        pair = None
        if cfg.construction == "lattice":
            pair, _ = build_pair(spec, RunConfig.from_mapping(
                dict(asdict(cfg), construction="lattice", n=None)), tol)
        report = find_halo_witness(M, sample, max_pairs=cfg.samples, require=False,
                                   tol=tol, pair=pair)
    expected = report.notes.get("expected_witness")
    found = report.witness is not None
    payload = {"mode": cfg.mode, "expected_witness": expected, "found_witness": found,
               "report": report.to_dict(), "environment": environment_header()}
    _emit(cfg, payload)
    if found and not expected:
        return EXIT_VIOLATION
    if expected and not found:
        return EXIT_INCONCLUSIVE
    if found and not report.witness.get("reverified", False):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


COMMANDS = {"project": cmd_project, "retract": cmd_retract, "one-range": cmd_one_range,
            "check": cmd_check, "plot": cmd_plot, "fuzz": cmd_fuzz}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = config_from_args(ns)
        tol = cfg.tolerances()
        spec = specfile.load(cfg.spec)
        return COMMANDS[cfg.command](spec, cfg, tol)
    except (UsageError, specfile.SpecError) as exc:
        print(f"coneretract: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HYPOTHESIS_ERRORS as exc:
        print(f"coneretract: hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except BudgetExhausted as exc:
        print(f"coneretract: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ConeRetractError as exc:
        print(f"coneretract: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
