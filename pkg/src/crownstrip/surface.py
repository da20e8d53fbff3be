"""Decorated crowned hyperbolic surfaces given by a convex fundamental polygon.

Every surface carries a convex fundamental polygon in the Klein disk.  Its
vertices are ideal (a decorated spike, possibly a deck translate of the
spike's representative) or finite points.  Its sides are either boundary
geodesic segments or paired sides.  A paired side ``j`` with word ``w``
means that ``rho(w)`` maps the partner side onto side ``j`` and that
``rho(w) F`` lies across side ``j``.  Side-pairing words are single
generators or their inverses.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from crownstrip import words as W
from crownstrip.errors import (
    BadGluing,
    BadOrder,
    BadSpikeOrder,
    InvariantViolation,
    NonPositiveLength,
    NonPositiveScale,
    NotHyperbolic,
    TooFewPoints,
)
from crownstrip.hyperbolic import (
    from_klein,
    horoball_connection_length,
    ideal_point,
    is_point,
    klein,
)
from crownstrip.isometry import (
    IDENTITY,
    Isometry,
    IsometryType,
    act,
    canonical_sign,
    classify_isometry,
    trace_length,
)
from crownstrip.minkowski import bilinear, future_lightlike

DEFAULT_TOLERANCES = {"lightlike": 1e-9, "match": 1e-8, "discreteness_word_len": 4}


@dataclass(frozen=True)
class PeripheralStructure:
    """A boundary component: a closed geodesic (``q = 0``) or a crowned chain with ``q`` spikes."""

    kind: str
    spikes: int


@dataclass(frozen=True)
class SpikeDecoration:
    peripheral_index: int
    position_index: int
    v: np.ndarray


@dataclass(frozen=True)
class DomainVertex:
    kind: str  # "ideal" or "finite"
    v: np.ndarray
    spike: int | None = None
    word: W.Word = ()


@dataclass(frozen=True)
class DomainSide:
    kind: str  # "boundary" or "paired"
    partner: int | None = None
    word: W.Word = ()


@dataclass(frozen=True)
class FundamentalDomain:
    vertices: tuple[DomainVertex, ...]
    sides: tuple[DomainSide, ...]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def klein_vertex(self, i: int) -> np.ndarray:
        return klein(self.vertices[i % self.size].v)

    def side_vertices(self, j: int) -> tuple[int, int]:
        return j % self.size, (j + 1) % self.size

    def side_point_klein(self, j: int, t: float) -> np.ndarray:
        a, b = self.side_vertices(j)
        return (1.0 - t) * self.klein_vertex(a) + t * self.klein_vertex(b)

    def side_point(self, j: int, t: float) -> np.ndarray:
        """Hyperboloid point at Klein-linear parameter ``0 < t < 1`` along side ``j``."""
        if not 0.0 < t < 1.0:
            raise ValueError("side parameter must lie strictly between 0 and 1")
        return from_klein(self.side_point_klein(j, t))


@dataclass(frozen=True)
class ClosedGeodesic:
    word: W.Word
    length: float
    unoriented: bool = True


@dataclass(frozen=True)
class HoroballConnection:
    spike_from: int
    spike_to: int
    word: W.Word
    length: float


@dataclass(frozen=True)
class DecoratedSurface:
    name: str
    family: str
    orientable: bool
    genus_or_h: int
    boundary_components: int
    generators: tuple[Isometry, ...]
    peripherals: tuple[PeripheralStructure, ...]
    spikes: tuple[SpikeDecoration, ...]
    domain: FundamentalDomain
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def spike_count(self) -> int:
        return len(self.spikes)

    def holonomy(self, word) -> Isometry:
        if not word:
            return IDENTITY
        return Isometry.from_matrix(W.evaluate(word, [g.m for g in self.generators]))

    def spike_vector(self, i: int, word=()) -> np.ndarray:
        """Decoration of the deck translate ``rho(word) * spike_i``."""
        v = self.spikes[i].v
        return act(self.holonomy(word), v) if word else v.copy()

    def spike_vertices(self, i: int) -> list[int]:
        return [k for k, vx in enumerate(self.domain.vertices) if vx.spike == i]


# ----------------------------------------------------------------------------
# audit


def audit(s: DecoratedSurface) -> list[str]:
    """Itemized list of invariant failures (empty when the surface is sound)."""
    problems: list[str] = []
    tol = s.tolerances.get("match", 1e-8)
    for k, g in enumerate(s.generators):
        kind = classify_isometry(g)
        if g.det_sign > 0 and kind is not IsometryType.HYPERBOLIC:
            problems.append(f"generator {k + 1} is {kind.value}, expected Hyperbolic")
        if g.det_sign < 0 and kind is not IsometryType.GLIDE_REFLECTION:
            problems.append(f"generator {k + 1} is {kind.value}, expected GlideReflection")
        if g.det_sign < 0 and s.orientable:
            problems.append(f"generator {k + 1} reverses orientation on an orientable surface")
    if not problems and s.rank:
        for w in W.enumerate_reduced(s.rank, int(s.tolerances.get("discreteness_word_len", 4))):
            kind = classify_isometry(s.holonomy(w))
            if kind not in (IsometryType.HYPERBOLIC, IsometryType.GLIDE_REFLECTION):
                problems.append(f"word {W.to_str(w)} is {kind.value}")
                break
    for i, sp in enumerate(s.spikes):
        if not future_lightlike(sp.v, s.tolerances.get("lightlike", 1e-9)):
            problems.append(f"spike {i} decoration is not future lightlike (|v|^2 = {bilinear(sp.v, sp.v):.3g})")
    expected = sum(p.spikes for p in s.peripherals)
    if expected != s.spike_count:
        problems.append(f"spike count {s.spike_count} differs from the spike vector total {expected}")
    problems.extend(_audit_domain(s, tol))
    return problems


def _same_ray(a, b, tol) -> bool:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.linalg.norm(a / np.linalg.norm(a) - b / np.linalg.norm(b)) <= tol


def _audit_domain(s: DecoratedSurface, tol: float) -> list[str]:
    problems: list[str] = []
    dom = s.domain
    n = dom.size
    if n < 3 or len(dom.sides) != n:
        return ["fundamental polygon needs at least 3 vertices and one side per vertex"]
    ks = [dom.klein_vertex(i) for i in range(n)]
    for i in range(n):
        a, b, c = ks[i], ks[(i + 1) % n], ks[(i + 2) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross <= 0:
            problems.append(f"fundamental polygon is not strictly convex and counterclockwise at vertex {(i + 1) % n}")
    for i, vx in enumerate(dom.vertices):
        if vx.kind == "ideal":
            if vx.spike is None or not 0 <= vx.spike < s.spike_count:
                problems.append(f"ideal vertex {i} does not name a spike")
                continue
            expected = s.spike_vector(vx.spike, vx.word)
            if np.linalg.norm(vx.v - expected) > tol * max(1.0, float(np.linalg.norm(expected))):
                problems.append(f"ideal vertex {i} is not the deck translate of spike {vx.spike}")
        elif vx.kind == "finite":
            if not is_point(vx.v):
                problems.append(f"finite vertex {i} is not on the hyperboloid")
        else:
            problems.append(f"vertex {i} has unknown kind {vx.kind!r}")
    for j, side in enumerate(dom.sides):
        if side.kind == "boundary":
            continue
        if side.kind != "paired" or side.partner is None:
            problems.append(f"side {j} has unknown kind {side.kind!r}")
            continue
        other = dom.sides[side.partner]
        if other.partner != j or W.reduce(other.word) != W.inverse(side.word):
            problems.append(f"side {j} and side {side.partner} are not mutually paired by inverse words")
            continue
        if len(side.word) != 1:
            problems.append(f"side {j} pairing word must be a single generator letter")
            continue
        g = s.holonomy(side.word)
        a0, a1 = dom.side_vertices(side.partner)
        b0, b1 = dom.side_vertices(j)
        image = [act(g, dom.vertices[a0].v), act(g, dom.vertices[a1].v)]
        targets = [dom.vertices[b1].v, dom.vertices[b0].v] if g.det_sign > 0 else [dom.vertices[b0].v, dom.vertices[b1].v]
        for im, tg in zip(image, targets):
            if not _same_ray(im, tg, tol):
                problems.append(f"rho({W.to_str(side.word)}) does not map side {side.partner} onto side {j}")
                break
    return problems


def checked(s: DecoratedSurface) -> DecoratedSurface:
    problems = audit(s)
    if problems:
        raise InvariantViolation(problems)
    return s


# ----------------------------------------------------------------------------
# constructors


def _angle_mod(theta: float) -> float:
    return float(np.mod(theta, 2.0 * np.pi))


def build_ideal_polygon(ideal_points, name: str = "ideal_polygon") -> DecoratedSurface:
    """Decorated ideal polygon; points must be listed counterclockwise."""
    pts = [np.asarray(p, dtype=float) for p in ideal_points]
    if len(pts) < 3:
        raise TooFewPoints("an ideal polygon needs at least 3 vertices")
    for p in pts:
        if not future_lightlike(p, 1e-9):
            raise BadOrder("ideal vertices must be future lightlike")
    angles = [_angle_mod(np.arctan2(p[1], p[0])) for p in pts]
    start = angles[0]
    rel = [_angle_mod(a - start) for a in angles]
    for k in range(1, len(rel)):
        if rel[k] <= rel[k - 1] + 1e-12:
            raise BadOrder("ideal vertices must be distinct and counterclockwise")
    spikes = tuple(SpikeDecoration(0, k, p) for k, p in enumerate(pts))
    vertices = tuple(DomainVertex("ideal", p, k, ()) for k, p in enumerate(pts))
    sides = tuple(DomainSide("boundary") for _ in pts)
    return checked(DecoratedSurface(
        name=name, family="polygon", orientable=True, genus_or_h=0, boundary_components=1,
        generators=(), peripherals=(PeripheralStructure("crown", len(pts)),), spikes=spikes,
        domain=FundamentalDomain(vertices, sides),
    ))


def regular_ideal_polygon(q: int, offset: float = 0.0, name: str | None = None) -> DecoratedSurface:
    pts = [ideal_point(offset + 2.0 * np.pi * k / q) for k in range(q)]
    return build_ideal_polygon(pts, name or f"ideal_{q}gon")


def translation(length: float) -> Isometry:
    """Hyperbolic element translating along the x-axis towards ``(1, 0, 1)``."""
    return Isometry.from_matrix(np.diag([np.exp(length / 2.0), np.exp(-length / 2.0)]))


def glide(length: float) -> Isometry:
    """Glide reflection along the x-axis: translate by ``length`` and flip ``y``."""
    return Isometry.from_matrix(np.diag([np.exp(length / 2.0), -np.exp(-length / 2.0)]))


def build_crown(q: int = 1, translation_length: float = 2.0, spike_params=None,
                name: str | None = None) -> DecoratedSurface:
    """Crown with ``q`` spikes over the closed geodesic of ``diag(e^{L/2}, e^{-L/2})``.

    ``spike_params`` lists the Klein angles of ``x_1, ..., x_q`` in the upper
    half-plane, decreasing from ``x_1`` towards ``g x_1``.  The fundamental
    polygon is bounded by the perpendicular from ``x_1`` to the axis and its
    image under the generator.
    """
    if q < 1:
        raise ValueError("a crown needs q >= 1")
    if translation_length <= 0:
        raise NonPositiveLength("translation length must be positive")
    g = translation(translation_length)
    if spike_params is None:
        theta1 = np.pi / 2.0
        x1 = ideal_point(theta1)
        end = float(np.arctan2(*act(g, x1)[[1, 0]]))
        spike_params = [theta1 + (end - theta1) * k / q for k in range(q)]
    angles = [float(a) for a in spike_params]
    if len(angles) != q:
        raise BadSpikeOrder(f"expected {q} spike angles, got {len(angles)}")
    x1 = ideal_point(angles[0])
    gx1 = act(g, x1)
    end = float(np.arctan2(gx1[1], gx1[0]))
    for k, a in enumerate(angles):
        if not 0.0 < a < np.pi:
            raise BadSpikeOrder(f"spike {k + 1} is not on the upper side of the axis")
        if k and not end < a < angles[k - 1]:
            raise BadSpikeOrder(f"spike {k + 1} is not strictly between x_1 and g x_1")
    pts = [ideal_point(a) for a in angles]
    R = from_klein([np.cos(angles[0]), 0.0])
    gR = act(g, R)
    spikes = tuple(SpikeDecoration(1, k, p) for k, p in enumerate(pts))
    vertices = [DomainVertex("finite", R), DomainVertex("finite", gR), DomainVertex("ideal", gx1, 0, (1,))]
    vertices += [DomainVertex("ideal", pts[k], k, ()) for k in range(q - 1, -1, -1)]
    n = len(vertices)
    sides = [DomainSide("boundary"), DomainSide("paired", n - 1, (1,))]
    sides += [DomainSide("boundary") for _ in range(q)]
    sides += [DomainSide("paired", 1, (-1,))]
    return checked(DecoratedSurface(
        name=name or f"crown_q{q}", family="crown", orientable=True, genus_or_h=0,
        boundary_components=2, generators=(g,),
        peripherals=(PeripheralStructure("geodesic", 0), PeripheralStructure("crown", q)),
        spikes=spikes, domain=FundamentalDomain(tuple(vertices), tuple(sides)),
    ))


def _chain_domain(g: Isometry, top_reps, bottom_reps, sigma_pos: float, flip: bool):
    """Polygon between the vertical chord at axis position ``sigma_pos`` and its image.

    ``top_reps``/``bottom_reps`` are ``(spike_index, vector)`` pairs on either
    side of the axis; deck translates by powers of ``g`` are generated here.
    With ``flip`` the generator exchanges the two sides.
    """
    shift = trace_length(g)
    lo, hi = np.tanh(sigma_pos), np.tanh(sigma_pos + shift)

    def orbit(reps, sign):
        pts = []
        for k in range(-4, 5):
            gk = Isometry.from_matrix(np.linalg.matrix_power(g.m, abs(k)))
            if k < 0:
                gk = gk.inverse()
            for spike, v in reps:
                w = act(gk, v)
                side = 1 if w[1] > 0 else -1
                if side == sign:
                    word = (1,) * k if k >= 0 else (-1,) * (-k)
                    pts.append((float(w[0] / w[2]), spike, w, word))
        return sorted(pts, key=lambda t: t[0])

    everything = list(top_reps) + list(bottom_reps)
    top = orbit(everything, 1)
    bottom = orbit(everything, -1)

    def crossing(chain, xpos):
        for (xa, _, va, _), (xb, _, vb, _) in zip(chain, chain[1:]):
            if xa < xpos < xb:
                ka, kb = klein(va), klein(vb)
                t = (xpos - ka[0]) / (kb[0] - ka[0])
                return from_klein((1 - t) * ka + t * kb)
            if abs(xa - xpos) < 1e-9:
                raise BadGluing("the cutting chord passes through a spike")
        raise BadGluing("spike chain does not span the cutting chord")

    P, R = crossing(top, lo), crossing(bottom, lo)
    gP, gR = act(g, P), act(g, R)
    bottom_in = [t for t in bottom if lo < t[0] < hi]
    top_in = [t for t in top if lo < t[0] < hi]
    verts = [DomainVertex("finite", R)]
    verts += [DomainVertex("ideal", w, sp, word) for _, sp, w, word in bottom_in]
    first_right = gP if flip else gR
    second_right = gR if flip else gP
    verts += [DomainVertex("finite", first_right), DomainVertex("finite", second_right)]
    verts += [DomainVertex("ideal", w, sp, word) for _, sp, w, word in reversed(top_in)]
    verts += [DomainVertex("finite", P)]
    n = len(verts)
    right = len(bottom_in) + 1
    sides = [DomainSide("boundary") for _ in range(n)]
    sides[right] = DomainSide("paired", n - 1, (1,))
    sides[n - 1] = DomainSide("paired", right, (-1,))
    return verts, sides


def _rebase_spikes(verts, spikes_by_index):
    """Move each spike representative to its vertex in the domain (word becomes empty)."""
    spikes = list(spikes_by_index)
    new_verts = []
    for vx in verts:
        if vx.kind == "ideal":
            sp = spikes[vx.spike]
            spikes[vx.spike] = replace(sp, v=vx.v.copy())
            vx = replace(vx, word=())
        new_verts.append(vx)
    return new_verts, spikes


def build_spiked_annulus(q1: int = 1, q2: int = 1, params: dict | None = None,
                         name: str | None = None) -> DecoratedSurface:
    """Spiked annulus from an ideal ``(q1 + q2 + 2)``-gon with two glued edges.

    The glued edges are the vertical chords at Klein ``x = -a`` and ``x = a``
    (``a = params["half_width"]``); the gluing translates along the x-axis,
    which meets both edges at right angles.  Extra spikes on the top and
    bottom are given as Klein angles in ``params["top"]``/``params["bottom"]``.
    An explicit ``params["generator"]`` is checked against the edge pair.
    """
    if q1 < 1 or q2 < 1:
        raise ValueError("a spiked annulus needs q1, q2 >= 1")
    params = dict(params or {})
    a = float(params.get("half_width", 1.0 / np.sqrt(2.0)))
    if not 0.0 < a < 1.0:
        raise BadGluing("half_width must lie in (0, 1)")
    c = np.arccos(a)
    top = params.get("top") or [c + (np.pi - 2 * c) * (k + 1) / q1 for k in range(q1 - 1)]
    bottom = params.get("bottom") or [np.pi + c + (np.pi - 2 * c) * (k + 1) / q2 for k in range(q2 - 1)]
    if len(top) != q1 - 1 or len(bottom) != q2 - 1:
        raise BadSpikeOrder("wrong number of extra spikes")
    g = translation(2.0 * np.arctanh(a))
    if "generator" in params:
        g = Isometry.from_matrix(params["generator"])
    A, B = ideal_point(np.pi - c), ideal_point(np.pi + c)
    D, C = ideal_point(c), ideal_point(-c)
    if not (_same_ray(act(g, A), D, 1e-8) and _same_ray(act(g, B), C, 1e-8)):
        raise BadGluing("generator does not map the left edge onto the right edge")
    for t in top:
        if not c < t < np.pi - c:
            raise BadSpikeOrder("top spike outside the top arc")
    for t in bottom:
        if not np.pi + c < t < 2 * np.pi - c:
            raise BadSpikeOrder("bottom spike outside the bottom arc")
    top_reps = [(0, A)] + [(k + 1, ideal_point(t)) for k, t in enumerate(top)]
    bottom_reps = [(q1, B)] + [(q1 + k + 1, ideal_point(t)) for k, t in enumerate(bottom)]
    spikes = [SpikeDecoration(0, k, v) for k, (_, v) in enumerate(top_reps)]
    spikes += [SpikeDecoration(1, k, v) for k, (_, v) in enumerate(bottom_reps)]
    pos = float(params.get("sigma_position", 0.0))
    verts, sides = _chain_domain(g, top_reps, bottom_reps, pos, flip=False)
    verts, spikes = _rebase_spikes(verts, spikes)
    return checked(DecoratedSurface(
        name=name or f"spiked_annulus_{q1}_{q2}", family="annulus", orientable=True, genus_or_h=0,
        boundary_components=2, generators=(g,),
        peripherals=(PeripheralStructure("crown", q1), PeripheralStructure("crown", q2)),
        spikes=tuple(spikes), domain=FundamentalDomain(tuple(verts), tuple(sides)),
    ))


def build_spiked_moebius(q: int = 1, params: dict | None = None, name: str | None = None) -> DecoratedSurface:
    """Spiked Moebius strip from a glide reflection along the x-axis.

    The top boundary chain carries ``q`` spikes per period of the square of
    the glide; ``params["angles"]`` gives their Klein angles (defaults spread
    them evenly from angle pi/2).  The glide maps the top chain to the bottom
    one, so the boundary is a single crowned component.
    """
    if q < 1:
        raise ValueError("a spiked Moebius strip needs q >= 1")
    params = dict(params or {})
    tau = float(params.get("translation", 2.0))
    if tau <= 0:
        raise NonPositiveLength("translation length must be positive")
    h = glide(tau)
    if "generator" in params:
        h = Isometry.from_matrix(params["generator"])
    if h.det_sign > 0:
        raise BadGluing("the gluing of a Moebius strip must reverse orientation")
    try:
        tau = trace_length(h)
    except NotHyperbolic as exc:
        raise BadGluing(str(exc)) from exc
    if "angles" in params:
        angles = [float(a) for a in params["angles"]]
    else:
        feet = [2.0 * tau * k / q for k in range(q)]
        angles = [float(np.arccos(np.tanh(p))) for p in feet]
    if len(angles) != q:
        raise BadSpikeOrder(f"expected {q} spike angles")
    for k, a in enumerate(angles):
        if not 0.0 < a < np.pi:
            raise BadSpikeOrder("spikes must lie on the upper side of the axis")
        if k and not a < angles[k - 1]:
            raise BadSpikeOrder("spike angles must decrease")
    reps = [(k, ideal_point(a)) for k, a in enumerate(angles)]
    spikes = [SpikeDecoration(0, k, v) for k, v in reps]
    feet = sorted(float(np.arctanh(np.cos(a))) for a in angles)
    marks = sorted({f % tau for f in feet})
    gaps = [(marks[(i + 1) % len(marks)] + (tau if i + 1 == len(marks) else 0.0)) - marks[i] for i in range(len(marks))]
    i = int(np.argmax(gaps))
    centre = marks[i] + gaps[i] / 2.0
    pos = float(params.get("sigma_position", (centre + tau / 2.0) % tau - tau / 2.0))
    verts, sides = _chain_domain(h, reps, [], pos, flip=True)
    verts, spikes = _rebase_spikes(verts, spikes)
    return checked(DecoratedSurface(
        name=name or f"spiked_moebius_q{q}", family="moebius", orientable=False, genus_or_h=1,
        boundary_components=1, generators=(h,), peripherals=(PeripheralStructure("crown", q),),
        spikes=tuple(spikes), domain=FundamentalDomain(tuple(verts), tuple(sides)),
    ))


# ----------------------------------------------------------------------------
# enumeration


def enumerate_closed_geodesics(s: DecoratedSurface, max_word_len: int) -> list[ClosedGeodesic]:
    """One entry per unoriented conjugacy class up to ``max_word_len``, sorted by length."""
    if max_word_len < 1:
        raise ValueError("max_word_len must be >= 1")
    if s.rank == 0:
        return []
    out = []
    for w in W.conjugacy_representatives(s.rank, max_word_len, unoriented=True):
        try:
            length = trace_length(s.holonomy(w))
        except NotHyperbolic:
            continue
        out.append(ClosedGeodesic(w, length, True))
    out.sort(key=lambda c: (round(c.length, 12), len(c.word), c.word))
    return out


def _connection_key(i: int, j: int, w: W.Word):
    return min((i, j, tuple(w)), (j, i, W.inverse(w)), key=lambda k: (k[0], k[1], len(k[2]), W.letter_order(k[2])))


def enumerate_horoball_connections(s: DecoratedSurface, max_word_len: int,
                                   max_length: float) -> list[HoroballConnection]:
    """Connections ``(i, j, w)`` from spike ``i`` to ``rho(w) spike_j`` up to both cutoffs."""
    if s.spike_count < 1:
        raise ValueError("surface has no spikes")
    words = [()] + (list(W.enumerate_reduced(s.rank, max_word_len)) if s.rank else [])
    seen = set()
    out = []
    for w in words:
        g = s.holonomy(w)
        for i in range(s.spike_count):
            vi = s.spikes[i].v
            for j in range(s.spike_count):
                if i == j and not w:
                    continue
                key = _connection_key(i, j, w)
                if key in seen:
                    continue
                seen.add(key)
                vj = act(g, s.spikes[j].v)
                if _same_ray(vi, vj, 1e-10):
                    continue
                length = horoball_connection_length(vi, vj)
                if length <= max_length:
                    out.append(HoroballConnection(key[0], key[1], key[2], length))
    out.sort(key=lambda c: (c.spike_from, c.spike_to, len(c.word), c.word))
    return out


def connection_length(s: DecoratedSurface, c: HoroballConnection) -> float:
    return horoball_connection_length(s.spike_vector(c.spike_from), s.spike_vector(c.spike_to, c.word))


# ----------------------------------------------------------------------------
# dimensions and rescaling


def deformation_dim_formula(orientable: bool, genus_or_h: int, boundary_components: int, spikes: int) -> int:
    """``6g - 6 + 3n + 2Q`` (orientable) or ``3h - 6 + 3n + 2Q`` (non-orientable)."""
    if orientable:
        return 6 * genus_or_h - 6 + 3 * boundary_components + 2 * spikes
    return 3 * genus_or_h - 6 + 3 * boundary_components + 2 * spikes


def ambient_dim(s: DecoratedSurface) -> int:
    """Cocycles on free generators plus cone-tangent spike motions, modulo coboundaries."""
    return 3 * s.rank + 2 * s.spike_count - 3


def deformation_dim(s: DecoratedSurface) -> int:
    if s.family == "polygon":
        return 2 * s.spike_count - 3
    return deformation_dim_formula(s.orientable, s.genus_or_h, s.boundary_components, s.spike_count)


def rescale_decorations(s: DecoratedSurface, lam: float) -> DecoratedSurface:
    if not lam > 0:
        raise NonPositiveScale("scale must be positive")
    spikes = tuple(replace(sp, v=lam * sp.v) for sp in s.spikes)
    verts = tuple(replace(vx, v=lam * vx.v) if vx.kind == "ideal" else vx for vx in s.domain.vertices)
    return replace(s, spikes=spikes, domain=replace(s.domain, vertices=verts))


def conjugate(s: DecoratedSurface, b) -> DecoratedSurface:
    """Apply the isometry ``b`` to holonomy, decorations and the fundamental polygon."""
    b = b if isinstance(b, Isometry) else Isometry.from_matrix(b)
    binv = b.inverse()
    gens = tuple(b @ g @ binv for g in s.generators)
    spikes = tuple(replace(sp, v=act(b, sp.v)) for sp in s.spikes)
    verts = tuple(replace(vx, v=act(b, vx.v)) for vx in s.domain.vertices)
    if b.det_sign < 0:
        raise ValueError("conjugating by an orientation-reversing element flips the polygon orientation")
    return replace(s, generators=gens, spikes=spikes, domain=replace(s.domain, vertices=verts))


# ----------------------------------------------------------------------------
# bundled examples


def bundled_surfaces() -> dict[str, DecoratedSurface]:
    """The five acceptance surfaces."""
    return {
        "ideal_triangle": regular_ideal_polygon(3, name="ideal_triangle"),
        "ideal_square": regular_ideal_polygon(4, name="ideal_square"),
        "crown_q1": build_crown(1, 2.0),
        "spiked_annulus_1_1": build_spiked_annulus(1, 1),
        "spiked_moebius_q1": build_spiked_moebius(1),
    }


# ----------------------------------------------------------------------------
# JSON form


def _vec_list(v) -> list[float]:
    return [float(x) for x in np.asarray(v, dtype=float)]


def to_dict(s: DecoratedSurface) -> dict[str, Any]:
    return {
        "name": s.name,
        "family": s.family,
        "orientable": s.orientable,
        "genus_or_h": s.genus_or_h,
        "boundary_components": s.boundary_components,
        "generators": [[_vec_list(row) for row in g.m] for g in s.generators],
        "peripherals": [{"kind": p.kind, "spikes": p.spikes} for p in s.peripherals],
        "spikes": [{"peripheral": sp.peripheral_index, "index": sp.position_index, "v": _vec_list(sp.v)}
                   for sp in s.spikes],
        "domain": {
            "vertices": [{"kind": vx.kind, "v": _vec_list(vx.v), "spike": vx.spike, "word": list(vx.word)}
                         for vx in s.domain.vertices],
            "sides": [{"kind": sd.kind, "partner": sd.partner, "word": list(sd.word)} for sd in s.domain.sides],
        },
        "tolerances": dict(s.tolerances),
    }


def _stored_isometry(m) -> Isometry:
    """Keep already normalized matrices bit-for-bit so files round-trip exactly."""
    m = np.array(m, dtype=float)
    det = float(np.linalg.det(m)) if m.shape == (2, 2) else 0.0
    if abs(abs(det) - 1.0) < 1e-12 and np.array_equal(canonical_sign(m), m):
        return Isometry(m, 1 if det > 0 else -1)
    return Isometry.from_matrix(m)


def from_dict(d: dict[str, Any], audit_surface: bool = True) -> DecoratedSurface:
    """Parse a surface document; raises ``InvariantViolation`` if the audit fails."""
    from crownstrip.errors import ParseError

    try:
        gens = tuple(_stored_isometry(m) for m in d.get("generators", []))
        spikes = tuple(SpikeDecoration(int(sp["peripheral"]), int(sp["index"]), np.array(sp["v"], dtype=float))
                       for sp in d["spikes"])
        verts = tuple(DomainVertex(vx["kind"], np.array(vx["v"], dtype=float), vx.get("spike"),
                                   tuple(int(x) for x in vx.get("word", [])))
                      for vx in d["domain"]["vertices"])
        sides = tuple(DomainSide(sd["kind"], sd.get("partner"), tuple(int(x) for x in sd.get("word", [])))
                      for sd in d["domain"]["sides"])
        s = DecoratedSurface(
            name=str(d.get("name", "surface")),
            family=str(d.get("family", "generic")),
            orientable=bool(d.get("orientable", True)),
            genus_or_h=int(d.get("genus_or_h", 0)),
            boundary_components=int(d.get("boundary_components", len(d.get("peripherals", [])))),
            generators=gens,
            peripherals=tuple(PeripheralStructure(p["kind"], int(p["spikes"])) for p in d.get("peripherals", [])),
            spikes=spikes,
            domain=FundamentalDomain(verts, sides),
            tolerances={**DEFAULT_TOLERANCES, **d.get("tolerances", {})},
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed surface document: {exc}") from exc
    return checked(s) if audit_surface else s
