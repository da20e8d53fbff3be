"""Strip deformations, tile maps and first-order length variations.

A weighted filling family of arcs defines an infinitesimal deformation of
the holonomy.  Each arc carries a Killing field: for an arc between two
boundary feet it is the hyperbolic field translating perpendicular to the
arc at its waist; for an arc ending in a spike it is the parabolic field
fixing the decorated spike.  The field always pushes into the piece on the
"toward" side of the arc.  Summing weighted fields across arcs gives a
locally constant map on the pieces of the fundamental polygon (the tile map)
and its jumps across paired sides define a cocycle on the generators.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from crownstrip import words as W
from crownstrip.arc_complex import (
    ArcKind,
    GeodesicArc,
    Tiling,
    WeightedArcFamily,
    bundled_triangulation,
    endpoint_vector,
    geodesic_between,
    require_filling,
    tiles,
    validate_pruned_point,
)
from crownstrip.errors import (
    DependentEndpoints,
    DisconnectedTiling,
    GeometryError,
    MismatchedSurface,
    NotFilling,
    NotTriangulation,
    WaistOffArc,
)
from crownstrip.hyperbolic import (
    from_klein,
    intersection,
    midpoint,
    normalize_point,
    on_geodesic,
)
from crownstrip.isometry import IDENTITY, Isometry, act, adjoint, axis, flow, trace_length
from crownstrip.minkowski import bilinear, mcross, spacelike_norm
from crownstrip.surface import (
    DecoratedSurface,
    HoroballConnection,
    deformation_dim,
)

# ----------------------------------------------------------------------------
# strip fields


@dataclass(frozen=True)
class StripTemplate:
    """Per-arc choices: optional waist points and a width scale."""

    waists: dict[int, np.ndarray] = field(default_factory=dict)
    width: float = 1.0


def strip_width_at(v, p) -> float:
    """Speed of the Killing field ``v`` at the point ``p``."""
    return spacelike_norm(mcross(v, p))


def strip_field(start, end, toward, waist=None, width: float = 1.0) -> np.ndarray:
    """Killing field of the strip along the chord ``[start, end]``.

    Parameters
    ----------
    start, end : array_like
        Hyperboloid points or, for at most one of them, a decorated
        lightlike vector.
    toward : array_like
        Hyperboloid point on the side the field should push towards.
    waist : array_like, optional
        Point of the chord where a hyperbolic strip is thinnest; defaults to
        the midpoint of the feet.
    width : float
        Speed of the field at its waist, or the scale of a parabolic field.
    """
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    spike_start = abs(bilinear(start, start)) < 1e-9 * max(1.0, start[2] ** 2)
    spike_end = abs(bilinear(end, end)) < 1e-9 * max(1.0, end[2] ** 2)
    if spike_start and spike_end:
        raise GeometryError("a strip needs at least one foot in the surface")
    g = geodesic_between(start, end)
    if spike_start or spike_end:
        spike, foot = (start, end) if spike_start else (end, start)
        v = width * spike
        base = foot
    else:
        base = midpoint(start, end) if waist is None else normalize_point(waist)
        if not on_geodesic(base, g, 1e-7):
            raise WaistOffArc("waist is not on the arc")
        v = mcross(base, g.n)
        v = width * v / spacelike_norm(v)
    n_toward = g.n if bilinear(toward, g.n) > 0 else -g.n
    if bilinear(mcross(v, base), n_toward) < 0:
        v = -v
    return v


def piece_point(s: DecoratedSurface, nodes: Sequence[float]) -> np.ndarray:
    """Hyperboloid point inside the piece with the given boundary nodes."""
    n = s.domain.size
    pts = []
    for x in nodes:
        i = int(np.floor(x + 1e-12)) % n
        t = x - np.floor(x + 1e-12)
        pts.append(s.domain.klein_vertex(i) if t < 1e-12 else s.domain.side_point_klein(i, t))
    return from_klein(np.mean(pts, axis=0))


# ----------------------------------------------------------------------------
# cocycles


@dataclass
class Cocycle:
    """Values of a cocycle on the generators, extended to words.

    ``u(ab) = u(a) + Ad(rho(a)) u(b)`` and ``u(a^-1) = -Ad(rho(a)^-1) u(a)``.
    """

    generators: list[Isometry]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(len(self.generators), 3)

    def letter(self, x: int) -> np.ndarray:
        g = self.generators[abs(x) - 1]
        u = self.values[abs(x) - 1]
        return u.copy() if x > 0 else -adjoint(g.inverse(), u)

    def holonomy(self, word) -> Isometry:
        out = IDENTITY
        for x in word:
            g = self.generators[abs(x) - 1]
            out = out @ (g if x > 0 else g.inverse())
        return out

    def __call__(self, word) -> np.ndarray:
        u = np.zeros(3)
        prefix = IDENTITY
        for x in word:
            u = u + adjoint(prefix, self.letter(x))
            g = self.generators[abs(x) - 1]
            prefix = prefix @ (g if x > 0 else g.inverse())
        return u


def coboundary(generators: Sequence[Isometry], k) -> np.ndarray:
    """Cocycle values ``k - Ad(g) k`` of the trivial deformation ``k``."""
    k = np.asarray(k, dtype=float)
    return np.array([k - adjoint(g, k) for g in generators])


@dataclass
class TangentVector:
    """Infinitesimal deformation of holonomy and spike decorations."""

    cocycle: Cocycle
    spike_motions: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.cocycle.values.ravel(), np.asarray(self.spike_motions).ravel()])

    def to_dict(self) -> dict:
        return {
            "cocycle": [[float(x) for x in u] for u in self.cocycle.values],
            "spike_motions": [[float(x) for x in m] for m in self.spike_motions],
        }

    @classmethod
    def from_dict(cls, d: dict, s: DecoratedSurface) -> "TangentVector":
        """Attach stored values to the holonomy of ``s``."""
        cocycle = np.array(d.get("cocycle", []), dtype=float).reshape(-1, 3)
        motions = np.array(d.get("spike_motions", []), dtype=float).reshape(-1, 3)
        if len(cocycle) != s.rank or len(motions) != s.spike_count:
            raise MismatchedSurface("tangent vector does not match the surface")
        return cls(Cocycle(list(s.generators), cocycle), motions)

    def __neg__(self) -> "TangentVector":
        return TangentVector(Cocycle(self.cocycle.generators, -self.cocycle.values), -np.asarray(self.spike_motions))


def trivial_tangent(s: DecoratedSurface, k) -> TangentVector:
    """Tangent vector of the infinitesimal conjugation by the Killing field ``k``."""
    k = np.asarray(k, dtype=float)
    motions = np.array([mcross(k, d.v) for d in s.spikes]).reshape(len(s.spikes), 3)
    return TangentVector(Cocycle(list(s.generators), coboundary(s.generators, k)), motions)


# ----------------------------------------------------------------------------
# tile maps


@dataclass
class TileMap:
    """Locally constant Killing field on the pieces of the fundamental polygon."""

    surface: DecoratedSurface
    tiling: Tiling
    weights: np.ndarray
    fields: np.ndarray
    values: np.ndarray
    cocycle: Cocycle
    base_piece: int
    piece_points: list[np.ndarray]
    template: StripTemplate = field(default_factory=StripTemplate)

    def value(self, piece: int, word=()) -> np.ndarray:
        """Tile map on the translate ``rho(word)`` of a piece."""
        return self.cocycle(word) + adjoint(self.cocycle.holonomy(word), self.values[piece])

    def spike_tile_value(self, i: int) -> np.ndarray:
        """Tile map on a tile having the spike ``i`` (in its base position) as a corner."""
        s = self.surface
        for k in s.spike_vertices(i):
            pieces = self.tiling.corner_piece.get(k)
            if pieces:
                return self.value(pieces[0], W.inverse(s.domain.vertices[k].word))
        raise GeometryError(f"no piece has spike {i} as a corner")

    def tangent(self) -> TangentVector:
        motions = [mcross(self.spike_tile_value(i), d.v) for i, d in enumerate(self.surface.spikes)]
        return TangentVector(self.cocycle, np.array(motions).reshape(len(motions), 3))


def _arc_field(s: DecoratedSurface, a: GeodesicArc, toward, tpl: StripTemplate, k: int) -> np.ndarray:
    return strip_field(endpoint_vector(s, a.start), endpoint_vector(s, a.end), toward,
                       tpl.waists.get(k), tpl.width)


def tile_map_from_tiling(tiling: Tiling, weights, tpl: StripTemplate | None = None,
                         base_piece: int = 0) -> TileMap:
    """Integrate the weighted strip fields over the pieces of a tiling."""
    s = tiling.surface
    tpl = tpl or StripTemplate()
    weights = np.asarray(weights, dtype=float)
    pts = [piece_point(s, p.nodes) for p in tiling.pieces]
    fields = np.zeros((len(tiling.arcs), 3))
    links: dict[int, list[tuple[int, int]]] = {p.id: [] for p in tiling.pieces}
    for k, (a, b) in tiling.chord_pieces.items():
        lo, hi = min(a, b), max(a, b)
        fields[k] = _arc_field(s, tiling.arcs[k], pts[hi], tpl, k)
        links[a].append((b, k))
        links[b].append((a, k))
    values = np.full((len(tiling.pieces), 3), np.nan)
    values[base_piece] = 0.0
    queue = deque([base_piece])
    while queue:
        p = queue.popleft()
        for q, k in links[p]:
            if not np.isnan(values[q, 0]):
                continue
            sign = 1.0 if q == max(tiling.chord_pieces[k]) else -1.0
            values[q] = values[p] + weights[k] * sign * fields[k]
            queue.append(q)
    if np.isnan(values).any():
        raise DisconnectedTiling("pieces are not connected through the arcs")
    gens = list(s.generators)
    u = np.zeros((len(gens), 3))
    for j, side in enumerate(s.domain.sides):
        if side.kind != "paired" or len(side.word) != 1 or side.word[0] < 0:
            continue
        i = side.word[0] - 1
        u[i] = values[tiling.side_piece[j]] - adjoint(gens[i], values[tiling.side_piece[side.partner]])
    return TileMap(s, tiling, weights, fields, values, Cocycle(gens, u), base_piece, pts, tpl)


def tile_map(s: DecoratedSurface, x: WeightedArcFamily, tpl: StripTemplate | None = None,
             base_piece: int = 0, check: bool = True) -> TileMap:
    """Tile map of a weighted arc family; ``check`` validates the family first."""
    if check:
        report = validate_pruned_point(s, x)
        if not report.ok:
            if any("fill" in p for p in report.problems):
                raise NotFilling("; ".join(report.problems), report.witnesses)
            raise GeometryError("; ".join(report.problems))
        tiling = require_filling(s, x.arcs)
    else:
        tiling = tiles(s, x.arcs)
    return tile_map_from_tiling(tiling, x.weights, tpl, base_piece)


def strip_map(s: DecoratedSurface, x: WeightedArcFamily, tpl: StripTemplate | None = None) -> TangentVector:
    """Infinitesimal strip deformation of a weighted filling arc family."""
    return tile_map(s, x, tpl).tangent()


def equivariance_residual(tm: TileMap, max_len: int = 2) -> float:
    """Largest mismatch between tile-map jumps and lifted strip fields.

    For every translate ``rho(h)`` of every weighted arc, the difference of
    the (cocycle-extended) tile map across the lifted arc is compared with
    the strip field computed directly from the lifted geometry.
    """
    s = tm.surface
    worst = 0.0
    hs = [W.EMPTY] + list(W.enumerate_reduced(s.rank, max_len))
    for h in hs:
        g = tm.cocycle.holonomy(h)
        for k, (a, b) in tm.tiling.chord_pieces.items():
            lo, hi = min(a, b), max(a, b)
            arc = tm.tiling.arcs[k]
            p = act(g, endpoint_vector(s, arc.start))
            q = act(g, endpoint_vector(s, arc.end))
            waist = None
            if arc.kind is ArcKind.EDGE_TO_EDGE:
                w0 = tm.template.waists.get(k)
                if w0 is None:
                    w0 = midpoint(endpoint_vector(s, arc.start), endpoint_vector(s, arc.end))
                waist = act(g, w0)
            v = strip_field(p, q, act(g, tm.piece_points[hi]), waist, tm.template.width)
            jump = tm.value(hi, h) - tm.value(lo, h)
            worst = max(worst, float(np.max(np.abs(jump - tm.weights[k] * v))))
    return worst


# ----------------------------------------------------------------------------
# basis of the tangent space


def _check_triangulation(s: DecoratedSurface, arcs) -> Tiling:
    tiling = tiles(s, arcs)
    if any(not t.is_disk or t.spike_count > 1 for t in tiling.tiles):
        raise NotTriangulation("the arcs do not fill the surface")
    if len(arcs) != deformation_dim(s):
        raise NotTriangulation(f"{len(arcs)} arcs, a triangulation has {deformation_dim(s)}")
    return tiling


def basis_matrix(s: DecoratedSurface, arcs=None) -> np.ndarray:
    """Columns: unit strip deformation of each arc, then three trivial deformations."""
    arcs = tuple(bundled_triangulation(s) if arcs is None else arcs)
    tiling = _check_triangulation(s, arcs)
    cols = []
    for k in range(len(arcs)):
        w = np.zeros(len(arcs))
        w[k] = 1.0
        cols.append(tile_map_from_tiling(tiling, w).tangent().as_array())
    for e in np.eye(3):
        cols.append(trivial_tangent(s, e).as_array())
    return np.column_stack(cols)


def _rank(m: np.ndarray, tol: float) -> int:
    return int(np.linalg.matrix_rank(m, tol=tol * max(1.0, float(np.max(np.abs(m))))))


def basis_rank(s: DecoratedSurface, arcs=None, tol: float = 1e-8) -> int:
    """Rank of the strip columns together with the trivial columns."""
    return _rank(basis_matrix(s, arcs), tol)


def quotient_rank(s: DecoratedSurface, arcs=None, tol: float = 1e-8) -> int:
    """Rank of the strip deformations modulo the trivial ones.

    This is ``rank([strips | trivial]) - rank(trivial)``; for a triangulation
    it equals the deformation-space dimension.
    """
    m = basis_matrix(s, arcs)
    return _rank(m, tol) - _rank(m[:, -3:], tol)


# ----------------------------------------------------------------------------
# length variations


@dataclass(frozen=True)
class Crossing:
    word: W.Word
    arc: int
    point: np.ndarray
    contribution: float


def _lifted_chords(tm: TileMap, window: int) -> Iterator[tuple[W.Word, int, np.ndarray, np.ndarray, np.ndarray]]:
    s = tm.surface
    for h in [W.EMPTY] + list(W.enumerate_reduced(s.rank, window)):
        g = tm.cocycle.holonomy(h)
        for k in range(len(tm.tiling.arcs)):
            if tm.weights[k] == 0.0:
                continue
            arc = tm.tiling.arcs[k]
            yield (h, k, act(g, endpoint_vector(s, arc.start)), act(g, endpoint_vector(s, arc.end)),
                   adjoint(g, tm.fields[k]))


def _between(x, a, b) -> bool:
    """Whether the point ``x`` on the chord lies between its ends ``a`` and ``b``."""
    ka, kb, kx = (np.asarray(v[:2]) / v[2] for v in (a, b, x))
    d = kb - ka
    t = float(np.dot(kx - ka, d) / np.dot(d, d))
    return -1e-9 <= t <= 1 + 1e-9


def _crossing_sum(tm: TileMap, target, accept, window: int, skip_ends=()) -> tuple[float, list[Crossing]]:
    total = 0.0
    found: list[Crossing] = []
    seen: list[np.ndarray] = []
    for h, k, a, b, v in _lifted_chords(tm, window):
        if any(_same_direction(a, e) or _same_direction(b, e) for e in skip_ends):
            continue
        try:
            g = geodesic_between(a, b)
        except DependentEndpoints:
            # both ends have run off to the same ideal point
            continue
        x = intersection(g, target)
        if x is None or not _between(x, a, b) or not accept(x):
            continue
        if any(np.allclose(x, y, atol=1e-9) for y in seen):
            continue
        seen.append(x)
        c = tm.weights[k] * strip_width_at(v, x) * float(np.sqrt(max(0.0, 1.0 - bilinear(g.n, target.n) ** 2)))
        total += c
        found.append(Crossing(h, k, x, c))
    return total, found


def _same_direction(a, b) -> bool:
    a = np.asarray(a) / np.linalg.norm(a)
    b = np.asarray(b) / np.linalg.norm(b)
    return bool(np.allclose(a, b, atol=1e-9))


def _axis_position(x, geod) -> float:
    return 0.5 * float(np.log(bilinear(x, geod.vminus) / bilinear(x, geod.vplus)))


def dl_closed_analytic(tm: TileMap, word, window: int | None = None) -> tuple[float, list[Crossing]]:
    """Length variation of a closed geodesic as a sum over arc crossings.

    Each lifted arc crossing a fundamental segment of the axis contributes
    its weight times the strip speed at the crossing times the sine of the
    crossing angle.
    """
    word = W.cyclic_reduce(word)
    g = tm.cocycle.holonomy(word)
    ax = axis(g)
    # a glide reflection also moves its axis by its own translation length
    length = trace_length(g)
    origin = np.array([0.0, 0.0, 1.0])
    start = normalize_point(origin - bilinear(origin, ax.n) * ax.n)
    s0 = _axis_position(start, ax)
    window = window if window is not None else len(word) + 2

    def accept(x):
        return s0 - 1e-9 <= _axis_position(x, ax) < s0 + length - 1e-9

    return _crossing_sum(tm, ax, accept, window)


def _perturbed_holonomy(t: TangentVector, word, dt: float) -> Isometry:
    out = IDENTITY
    for x in word:
        i = abs(x) - 1
        g = flow(t.cocycle.values[i], dt) @ t.cocycle.generators[i]
        out = out @ (g if x > 0 else g.inverse())
    return out


def _richardson(f, dt: float) -> float:
    def central(h):
        return (f(h) - f(-h)) / (2.0 * h)

    return (4.0 * central(dt / 2.0) - central(dt)) / 3.0


def dl_closed_fd(t: TangentVector, word, dt: float = 1e-4) -> float:
    """Finite-difference length variation of a closed geodesic."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return _richardson(lambda h: trace_length(_perturbed_holonomy(t, word, h)), dt)


def connection_ends(s: DecoratedSurface, c: HoroballConnection) -> tuple[np.ndarray, np.ndarray]:
    return s.spike_vector(c.spike_from), s.spike_vector(c.spike_to, c.word)


def connection_normal(v1, v2) -> np.ndarray:
    """Unit ``n`` with ``mcross(v2, v1) = <v1, v2> n``."""
    return mcross(v2, v1) / bilinear(v1, v2)


def dl_horoball_analytic(tm: TileMap, c: HoroballConnection) -> float:
    """Length variation of a horoball connection from the tile map at its ends."""
    s = tm.surface
    v1, v2 = connection_ends(s, c)
    phi1 = tm.spike_tile_value(c.spike_from)
    phi2 = tm.cocycle(c.word) + adjoint(tm.cocycle.holonomy(c.word), tm.spike_tile_value(c.spike_to))
    return bilinear(phi2 - phi1, connection_normal(v1, v2))


def dl_horoball_crossings(tm: TileMap, c: HoroballConnection, window: int | None = None) -> tuple[float, list[Crossing]]:
    """Length variation of a horoball connection as a sum over arc crossings."""
    v1, v2 = connection_ends(tm.surface, c)
    target = geodesic_between(v1, v2)
    window = window if window is not None else len(c.word) + 3
    return _crossing_sum(tm, target, lambda x: True, window, skip_ends=(v1, v2))


def dl_horoball_fd(s: DecoratedSurface, t: TangentVector, c: HoroballConnection, dt: float = 1e-4) -> float:
    """Finite-difference length variation using only the tangent vector."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    i, j = c.spike_from, c.spike_to

    def length(h):
        vi = s.spikes[i].v + h * t.spike_motions[i]
        vj = s.spikes[j].v + h * t.spike_motions[j]
        return float(np.log(-bilinear(vi, act(_perturbed_holonomy(t, c.word, h), vj)) / 2.0))

    return _richardson(length, dt)


def dl_horoball_tangent(s: DecoratedSurface, t: TangentVector, c: HoroballConnection) -> float:
    """First-order length variation of a horoball connection from a tangent vector."""
    i, j = c.spike_from, c.spike_to
    g = t.cocycle.holonomy(c.word)
    vi = s.spikes[i].v
    vj = act(g, s.spikes[j].v)
    dvj = mcross(t.cocycle(c.word), vj) + act(g, t.spike_motions[j])
    return (bilinear(t.spike_motions[i], vj) + bilinear(vi, dvj)) / bilinear(vi, vj)
