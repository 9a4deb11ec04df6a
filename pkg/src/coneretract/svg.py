"""SVG pictures of a planar retraction pair: the four sectors and the field x -> Qx.

Output is plain text built from fixed-precision numbers, so identical inputs
give byte-identical documents. Every arrow carries its plane coordinates in
``data-x`` and ``data-qx`` attributes, which is what the tests read back.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import angle_of, ccw_angle
from .retractions import RetractionPair2D, eval_2d

SIZE = 400
SCALE = 150.0  # pixels per plane unit
RADIUS = 1.2   # sector and ray length, plane units

_FILL = {"K1": "#9ecae1", "K2": "#e0e0e0", "K3": "#fcbba1", "K4": "#d9d9d9"}


def _f(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def to_screen(s: float, t: float) -> tuple[float, float]:
    c = SIZE / 2
    return c + SCALE * s, c - SCALE * t


def from_screen(px: float, py: float) -> tuple[float, float]:
    c = SIZE / 2
    return (px - c) / SCALE, (c - py) / SCALE


def grid_points(n: int, extent: float = 1.0) -> np.ndarray:
    if n <= 0:
        return np.zeros((0, 2))
    ticks = np.linspace(-extent, extent, n) if n > 1 else np.zeros(1)
    return np.array([(s, t) for t in ticks[::-1] for s in ticks])


def sectors(pair: RetractionPair2D) -> list[tuple[str, tuple, tuple]]:
    """Non-degenerate sectors as (name, start, end), counterclockwise."""
    out = []
    if not pair.m_degenerate:
        out.append(("K1", pair.e1, pair.e2))
    out.append(("K2", pair.e2, pair.u1))
    if not pair.degenerate:
        out.append(("K3", pair.u1, pair.u2))
    out.append(("K4", pair.u2, pair.e1))
    return out


def _wedge(start, end, steps: int = 24) -> str:
    a0 = angle_of(start)
    sweep = ccw_angle(start, end)
    pts = [to_screen(0.0, 0.0)]
    for k in range(steps + 1):
        a = a0 + sweep * k / steps
        pts.append(to_screen(RADIUS * math.cos(a), RADIUS * math.sin(a)))
    return " ".join(f"{_f(px)},{_f(py)}" for px, py in pts)


def _rays(pair: RetractionPair2D) -> list[tuple[str, tuple]]:
    if pair.m_degenerate:
        rays = [("e₁=e₂", pair.e1)]
    else:
        rays = [("e₁", pair.e1), ("e₂", pair.e2)]
    if pair.degenerate:
        rays.append(("u₁=u₂", pair.u1))
    else:
        rays += [("u₁", pair.u1), ("u₂", pair.u2)]
    return rays


def field_rows(pair: RetractionPair2D, points) -> list[dict]:
    rows = []
    for x in np.asarray(points, dtype=float).reshape(-1, 2):
        q, r = eval_2d(pair, x)
        q2, _ = eval_2d(pair, r)
        r2 = eval_2d(pair, q)[1]
        rows.append({"x": x, "Qx": q, "Rx": r,
                     "sum": float(np.linalg.norm(q + r - x)),
                     "QR": float(np.linalg.norm(q2)),
                     "RQ": float(np.linalg.norm(r2))})
    return rows


def render(pair: RetractionPair2D, grid: int, title: str = "retraction field") -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}">\n<title>{title}</title>\n')
    if grid <= 0:
        return head + "</svg>\n"
    parts = [head,
             '<defs><marker id="tip" viewBox="0 0 10 10" refX="9" refY="5" '
             'markerWidth="6" markerHeight="6" orient="auto">'
             '<path d="M0,0 L10,5 L0,10 z"/></marker></defs>\n']
    for name, a, b in sectors(pair):
        parts.append(f'<polygon class="sector" id="{name}" fill="{_FILL[name]}" '
                     f'stroke="none" points="{_wedge(a, b)}"/>\n')
    cx, cy = to_screen(0.0, 0.0)
    for label, g in _rays(pair):
        px, py = to_screen(RADIUS * g[0], RADIUS * g[1])
        lx, ly = to_screen(1.32 * g[0], 1.32 * g[1])
        parts.append(f'<line class="ray" x1="{_f(cx)}" y1="{_f(cy)}" x2="{_f(px)}" '
                     f'y2="{_f(py)}" stroke="black"/>\n')
        parts.append(f'<text class="label" x="{_f(lx)}" y="{_f(ly)}" '
                     f'text-anchor="middle">{label}</text>\n')
    for row in field_rows(pair, grid_points(grid)):
        x, q = row["x"], row["Qx"]
        x1, y1 = to_screen(*x)
        x2, y2 = to_screen(*q)
        parts.append(f'<line class="arrow" data-x="{_f(x[0])} {_f(x[1])}" '
                     f'data-qx="{_f(q[0])} {_f(q[1])}" x1="{_f(x1)}" y1="{_f(y1)}" '
                     f'x2="{_f(x2)}" y2="{_f(y2)}" stroke="#333" marker-end="url(#tip)"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def render_csv(pair: RetractionPair2D, grid: int) -> str:
    lines = ["x0,x1,qx0,qx1,rx0,rx1,res_sum,res_QR,res_RQ"]
    for row in field_rows(pair, grid_points(grid)):
        vals = [*row["x"], *row["Qx"], *row["Rx"], row["sum"], row["QR"], row["RQ"]]
        lines.append(",".join(f"{v:.12g}" for v in vals))
    return "\n".join(lines) + "\n"
