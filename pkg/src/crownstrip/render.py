"""SVG drawings of surfaces in the Klein disk.

Geodesics are straight chords; horoballs are closed paths through 64
points of their horocycles.  Coordinates are rounded to six decimals so
that repeated runs produce identical files.
"""

from __future__ import annotations

import numpy as np

from crownstrip.arc_complex import ArcKind, GeodesicArc, endpoint_klein
from crownstrip.errors import NoAxis
from crownstrip.hyperbolic import klein
from crownstrip.isometry import act, axis, flow
from crownstrip.surface import DecoratedSurface

HOROCYCLE_POINTS = 64
SIZE = 512
ARC_COLOURS = {
    ArcKind.EDGE_TO_EDGE: "#1f77b4",
    ArcKind.SPIKE_TO_EDGE: "#2ca02c",
    ArcKind.SPIKE_TO_SPIKE: "#d62728",
}


def _fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _xy(k) -> str:
    # the y axis of the image points down
    return f"{_fmt(k[0])},{_fmt(-k[1])}"


def horocycle_klein(v, n: int = HOROCYCLE_POINTS) -> np.ndarray:
    """``n`` Klein points of the horocycle ``<p, v> = -1``, closed through the centre ``v``."""
    v = np.asarray(v, dtype=float)
    lam = v[2]
    direction = np.array([v[0], v[1], 0.0]) / lam
    t = np.log(lam)
    base = np.cosh(t) * np.array([0.0, 0.0, 1.0]) + np.sinh(t) * direction
    phis = -0.5 * np.pi + np.pi * (np.arange(n) + 0.5) / n
    pts = [klein(act(flow(v, np.tan(phi)), base)) for phi in phis]
    return np.array(pts + [klein(v)])


def _line(a, b, colour: str, width: float, dash: str | None = None) -> str:
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<line x1="{_fmt(a[0])}" y1="{_fmt(-a[1])}" x2="{_fmt(b[0])}" y2="{_fmt(-b[1])}" '
            f'stroke="{colour}" stroke-width="{_fmt(width)}"{extra}/>')


def render_klein(s: DecoratedSurface, arcs: tuple[GeodesicArc, ...] | list[GeodesicArc] = (),
                 show_axes: bool = True) -> str:
    """SVG text of the fundamental polygon, decorations, generator axes and arcs."""
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="-1.1 -1.1 2.2 2.2">',
        f"<title>{s.name}</title>",
        '<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.006"/>',
    ]
    dom = s.domain
    for j, side in enumerate(dom.sides):
        i0, i1 = dom.side_vertices(j)
        a, b = dom.klein_vertex(i0), dom.klein_vertex(i1)
        if side.kind == "boundary":
            out.append(_line(a, b, "black", 0.008))
        else:
            out.append(_line(a, b, "#7f7f7f", 0.006, "0.03 0.02"))
    if show_axes:
        for g in s.generators:
            try:
                ax = axis(g)
            except NoAxis:
                continue
            p, q = klein(ax.vminus), klein(ax.vplus)
            out.append(_line(p, q, "#9467bd", 0.004, "0.01 0.01"))
    for k, vert in enumerate(dom.vertices):
        if vert.kind != "ideal":
            continue
        pts = horocycle_klein(vert.v)
        path = " ".join(("M" if i == 0 else "L") + _xy(p) for i, p in enumerate(pts)) + " Z"
        out.append(f'<path d="{path}" fill="#ff7f0e" fill-opacity="0.25" stroke="#ff7f0e" stroke-width="0.004"/>')
    for a in arcs:
        p, q = endpoint_klein(s, a.start), endpoint_klein(s, a.end)
        out.append(_line(p, q, ARC_COLOURS[a.kind], 0.008))
    out.append("</svg>")
    return "\n".join(out) + "\n"
