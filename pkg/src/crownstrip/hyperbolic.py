"""Hyperbolic plane in the hyperboloid and Klein models.

Points live on the upper sheet ``<p, p> = -1, z > 0``.  Ideal points and
horoballs are future-pointing lightlike vectors; the open horoball of ``v``
is ``{p : <p, v> > -1}``.  Klein coordinates are only used at the edges
(rendering, chord intersections, the Hilbert metric).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from crownstrip.errors import (
    CoincidentPoints,
    DependentEndpoints,
    NonLightlike,
    PointNotOnGeodesic,
    SameCenter,
)
from crownstrip.minkowski import (
    bilinear,
    det3,
    future_lightlike,
    mcross,
    norm2,
    spacelike_norm,
)

ON_GEODESIC_TOL = 1e-8
ORIGIN = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic from ``vminus`` to ``vplus`` with unit dual ``n``.

    ``det[vminus; n; vplus] > 0``.  The Killing field ``n`` translates along
    the geodesic towards ``vplus``.
    """

    n: np.ndarray
    vplus: np.ndarray
    vminus: np.ndarray

    def reversed(self) -> "Geodesic":
        return Geodesic(-self.n, self.vminus, self.vplus)

    def side(self, p) -> float:
        """Signed pairing ``<p, n>``; positive on one side, negative on the other."""
        return bilinear(p, self.n)


@dataclass(frozen=True)
class Horoball:
    v: np.ndarray

    def __post_init__(self):
        if not future_lightlike(self.v, 1e-8):
            raise NonLightlike("a horoball needs a future-pointing lightlike vector")


def hyperboloid_point(x: float, y: float) -> np.ndarray:
    """Lift ``(x, y)`` to the upper sheet."""
    return np.array([x, y, np.sqrt(1.0 + x * x + y * y)])


def polar_point(r: float, theta: float) -> np.ndarray:
    """Point at distance ``r`` from the origin in direction ``theta``."""
    return np.array([np.sinh(r) * np.cos(theta), np.sinh(r) * np.sin(theta), np.cosh(r)])


def normalize_point(v) -> np.ndarray:
    """Rescale a timelike vector onto the upper sheet."""
    v = np.asarray(v, dtype=float)
    q = norm2(v)
    if q >= 0:
        raise ValueError("vector is not timelike")
    p = v / np.sqrt(-q)
    return p if p[2] > 0 else -p


def ideal_point(theta: float, scale: float = 1.0) -> np.ndarray:
    """Lightlike vector over the boundary point at Klein angle ``theta``."""
    return scale * np.array([np.cos(theta), np.sin(theta), 1.0])


def klein(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[:2] / v[2]


def from_klein(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    r2 = float(k @ k)
    if r2 >= 1.0:
        raise ValueError("Klein point is not inside the unit disk")
    z = 1.0 / np.sqrt(1.0 - r2)
    return np.array([k[0] * z, k[1] * z, z])


def boundary_angle(v) -> float:
    k = klein(v)
    return float(np.arctan2(k[1], k[0]))


def dist(p, q) -> float:
    """Hyperbolic distance; ``cosh d = -<p, q>``, evaluated stably."""
    c = -bilinear(p, q)
    if c > 2.0:
        return float(np.arccosh(c))
    d = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    chord = max(norm2(d), 0.0)
    return float(2.0 * np.arcsinh(np.sqrt(chord) / 2.0))


def _positive_root(a: float, b: float, c: float) -> tuple[float, float]:
    """Roots ``(negative, positive)`` of ``a s^2 + b s + c`` with ``a > 0 > c``."""
    disc = np.sqrt(b * b - 4.0 * a * c)
    if b >= 0:
        q = -0.5 * (b + disc)
    else:
        q = -0.5 * (b - disc)
    r1, r2 = q / a, c / q
    return (min(r1, r2), max(r1, r2))


def dist_hilbert(p, q) -> float:
    """Distance as half the log of the cross-ratio on the Klein chord through ``p, q``.

    The chord endpoints are solved from each point separately; ``1 - |k|^2``
    is taken from the hyperboloid height (it equals ``z^-2``) so points far
    from the origin keep their precision.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    kp, kq = klein(p), klein(q)
    delta = kq - kp
    a = float(delta @ delta)
    if a == 0.0:
        raise CoincidentPoints("Hilbert distance needs two distinct points")
    s_minus, _ = _positive_root(a, 2.0 * float(kp @ delta), -1.0 / p[2] ** 2)
    _, sigma_plus = _positive_root(a, 2.0 * float(kq @ delta), -1.0 / q[2] ** 2)
    # chord: w1 at s_minus < 0, p at 0, q at 1, w2 at 1 + sigma_plus
    return 0.5 * float(np.log1p(1.0 / sigma_plus) + np.log1p(-1.0 / s_minus))


def cross_ratio(a: float, b: float, c: float, d: float) -> float:
    """``[a, b; c, d] = (c - a)(d - b) / ((b - a)(d - c))`` on a line."""
    return (c - a) * (d - b) / ((b - a) * (d - c))


def _normalize_spacelike(n) -> np.ndarray:
    s = spacelike_norm(n)
    if s == 0.0:
        raise DependentEndpoints("degenerate geodesic data")
    return np.asarray(n, dtype=float) / s


def geodesic_from_endpoints(vminus, vplus) -> Geodesic:
    """Oriented geodesic from the ideal point ``vminus`` to ``vplus``."""
    vminus = np.asarray(vminus, dtype=float)
    vplus = np.asarray(vplus, dtype=float)
    for v in (vminus, vplus):
        if not future_lightlike(v, 1e-8):
            raise NonLightlike("geodesic endpoints must be future-pointing lightlike")
    um = vminus / np.linalg.norm(vminus)
    up = vplus / np.linalg.norm(vplus)
    if np.linalg.norm(np.cross(um, up)) < 1e-12:
        raise DependentEndpoints("endpoints coincide projectively")
    n = _normalize_spacelike(mcross(vminus, vplus))
    if det3(vminus, n, vplus) < 0:
        n = -n
    return Geodesic(n=n, vplus=vplus, vminus=vminus)


def geodesic_from_dual(n) -> Geodesic:
    """Geodesic ``n^perp`` oriented so that ``n`` is its positive dual."""
    n = _normalize_spacelike(n)
    foot = normalize_point(ORIGIN - bilinear(ORIGIN, n) * n)
    tangent = _normalize_spacelike(mcross(n, foot))
    a, b = foot + tangent, foot - tangent
    if det3(b, n, a) > 0:
        return Geodesic(n=n, vplus=a, vminus=b)
    return Geodesic(n=n, vplus=b, vminus=a)


def geodesic_through(p, q) -> Geodesic:
    """Geodesic through two points, oriented from ``p`` towards ``q``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if dist(p, q) < 1e-14:
        raise CoincidentPoints("points coincide")
    g = geodesic_from_dual(mcross(p, q))
    tangent = q + bilinear(p, q) * p
    if bilinear(g.vplus - g.vminus, tangent) < 0:
        g = g.reversed()
    return g


def geodesic_through_point_ideal(p, v) -> Geodesic:
    """Geodesic from the point ``p`` towards the ideal point ``v`` (oriented to ``v``)."""
    g = geodesic_from_dual(mcross(p, v))
    kv = np.asarray(v) / v[2]
    if np.linalg.norm(klein(g.vplus) - kv[:2]) > np.linalg.norm(klein(g.vminus) - kv[:2]):
        g = g.reversed()
    return g


def on_geodesic(p, g: Geodesic, tol: float = ON_GEODESIC_TOL) -> bool:
    p = np.asarray(p, dtype=float)
    return abs(bilinear(p, g.n)) <= tol * (1.0 + abs(p[2]))


def horoball_connection_length(h1, h2) -> float:
    """``ln(-<v1, v2> / 2)``; negative when the horoballs overlap."""
    v1 = h1.v if isinstance(h1, Horoball) else np.asarray(h1, dtype=float)
    v2 = h2.v if isinstance(h2, Horoball) else np.asarray(h2, dtype=float)
    pairing = -bilinear(v1, v2)
    scale = np.linalg.norm(v1) * np.linalg.norm(v2)
    if pairing <= 1e-14 * scale:
        raise SameCenter("horoballs share their center")
    return float(np.log(pairing / 2.0))


def sin_angle_at(p, g1: Geodesic, g2: Geodesic) -> float:
    """Sine of the angle between two geodesics meeting at ``p``."""
    for g in (g1, g2):
        if not on_geodesic(p, g):
            raise PointNotOnGeodesic("point is not on both geodesics")
    c = bilinear(g1.n, g2.n)
    return float(np.sqrt(max(0.0, 1.0 - c * c)))


def perpendicular_at(g: Geodesic, p) -> Geodesic:
    """Geodesic through ``p`` meeting ``g`` at a right angle."""
    if not on_geodesic(p, g):
        raise PointNotOnGeodesic("point is not on the geodesic")
    return geodesic_from_dual(mcross(np.asarray(p, dtype=float), g.n))


def foot_of_perpendicular(g: Geodesic, x) -> np.ndarray:
    """Closest point of ``g`` to the point or ideal point ``x``."""
    m = mcross(g.n, x)
    foot = mcross(g.n, m)
    return normalize_point(foot)


def intersection(g1: Geodesic, g2: Geodesic):
    """Common point of two geodesics, or ``None`` if they do not cross."""
    w = mcross(g1.n, g2.n)
    if norm2(w) >= -1e-15 * max(1.0, float(np.max(np.abs(w))) ** 2):
        return None
    return normalize_point(w)


def midpoint(p, q) -> np.ndarray:
    return normalize_point(np.asarray(p, dtype=float) + np.asarray(q, dtype=float))


def horoball_contains(h, p) -> bool:
    """Open horoball membership ``<p, v> > -1`` (the horocycle itself is excluded)."""
    v = h.v if isinstance(h, Horoball) else np.asarray(h, dtype=float)
    return bilinear(p, v) > -1.0


def on_horocycle(h, p, tol: float = 1e-12) -> bool:
    v = h.v if isinstance(h, Horoball) else np.asarray(h, dtype=float)
    return abs(bilinear(p, v) + 1.0) <= tol


def is_point(p, tol: float = 1e-8) -> bool:
    p = np.asarray(p, dtype=float)
    return p[2] > 0 and abs(norm2(p) + 1.0) <= tol * max(1.0, p[2] ** 2)
