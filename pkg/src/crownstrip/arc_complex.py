"""Arcs as chords of the fundamental polygon, filling predicates and tilings.

An arc endpoint is either an ideal vertex of the polygon (a spike) or a
point on a boundary side given by a Klein-linear parameter.  Endpoints on
paired sides are not allowed, so every arc is a single chord of the
polygon and its other lifts are deck translates of that chord.

Positions along the polygon boundary are encoded as floats: vertex ``i``
sits at ``i`` and the point with parameter ``t`` on side ``j`` sits at
``j + t``.  Two chords of a convex polygon cross exactly when their
endpoint positions interleave.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from crownstrip.errors import ArcsCross, GeometryError, NotFilling
from crownstrip.hyperbolic import (
    Geodesic,
    geodesic_from_dual,
    sin_angle_at,
)
from crownstrip.minkowski import mcross
from crownstrip.surface import DecoratedSurface


class ArcKind(Enum):
    EDGE_TO_EDGE = "EdgeToEdge"
    SPIKE_TO_EDGE = "SpikeToEdge"
    SPIKE_TO_SPIKE = "SpikeToSpike"


@dataclass(frozen=True)
class ArcEndpoint:
    """``vertex`` for a spike end, or ``side`` and ``t`` for a boundary foot."""

    vertex: int | None = None
    side: int | None = None
    t: float | None = None

    @property
    def is_spike(self) -> bool:
        return self.vertex is not None

    def position(self) -> float:
        return float(self.vertex) if self.is_spike else float(self.side) + float(self.t)

    def to_dict(self) -> dict:
        if self.is_spike:
            return {"vertex": self.vertex}
        return {"side": self.side, "t": self.t}

    @classmethod
    def from_dict(cls, d: dict) -> "ArcEndpoint":
        if "vertex" in d:
            return cls(vertex=int(d["vertex"]))
        return cls(side=int(d["side"]), t=float(d["t"]))


@dataclass(frozen=True)
class GeodesicArc:
    start: ArcEndpoint
    end: ArcEndpoint

    @property
    def kind(self) -> ArcKind:
        spikes = self.start.is_spike + self.end.is_spike
        return (ArcKind.EDGE_TO_EDGE, ArcKind.SPIKE_TO_EDGE, ArcKind.SPIKE_TO_SPIKE)[spikes]

    @property
    def spike_end(self) -> ArcEndpoint | None:
        if self.start.is_spike:
            return self.start
        if self.end.is_spike:
            return self.end
        return None

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "start": self.start.to_dict(), "end": self.end.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "GeodesicArc":
        return cls(ArcEndpoint.from_dict(d["start"]), ArcEndpoint.from_dict(d["end"]))


def edge_arc(side_a: int, t_a: float, side_b: int, t_b: float) -> GeodesicArc:
    return GeodesicArc(ArcEndpoint(side=side_a, t=t_a), ArcEndpoint(side=side_b, t=t_b))


def spike_arc(vertex: int, side: int, t: float) -> GeodesicArc:
    return GeodesicArc(ArcEndpoint(vertex=vertex), ArcEndpoint(side=side, t=t))


def diagonal(v1: int, v2: int) -> GeodesicArc:
    return GeodesicArc(ArcEndpoint(vertex=v1), ArcEndpoint(vertex=v2))


@dataclass(frozen=True)
class WeightedArcFamily:
    arcs: tuple[GeodesicArc, ...]
    weights: np.ndarray
    normalized_from: float = 1.0

    @classmethod
    def create(cls, arcs, weights=None) -> "WeightedArcFamily":
        """Projectively normalize the weights so they sum to one."""
        arcs = tuple(arcs)
        w = np.ones(len(arcs)) if weights is None else np.asarray(weights, dtype=float)
        if w.shape != (len(arcs),):
            raise ValueError("one weight per arc is required")
        total = float(w.sum())
        if total > 0:
            w = w / total
        return cls(arcs, w, total)

    @property
    def was_normalized(self) -> bool:
        return abs(self.normalized_from - 1.0) > 1e-12

    def to_dict(self) -> dict:
        return {"arcs": [a.to_dict() for a in self.arcs], "weights": [float(x) for x in self.weights]}

    @classmethod
    def from_dict(cls, d: dict) -> "WeightedArcFamily":
        return cls.create([GeodesicArc.from_dict(a) for a in d["arcs"]], d.get("weights"))


# ----------------------------------------------------------------------------
# geometry of endpoints and arcs


def validate_arc(s: DecoratedSurface, a: GeodesicArc) -> list[str]:
    dom = s.domain
    n = dom.size
    problems = []
    for e in (a.start, a.end):
        if e.is_spike:
            if not 0 <= e.vertex < n or dom.vertices[e.vertex].kind != "ideal":
                problems.append(f"endpoint vertex {e.vertex} is not a spike of the polygon")
        else:
            if e.side is None or e.t is None or not 0 <= e.side < n:
                problems.append("boundary endpoint needs a side index and a parameter")
            elif dom.sides[e.side].kind != "boundary":
                problems.append(f"side {e.side} is a paired side; arcs must end on boundary sides")
            elif not 0.0 < e.t < 1.0:
                problems.append("boundary parameter must lie strictly inside the side")
    if problems:
        return problems
    p, q = a.start.position(), a.end.position()
    if abs(p - q) < 1e-12:
        return ["arc endpoints coincide"]
    for e, f in ((a.start, a.end), (a.end, a.start)):
        if e.is_spike:
            if f.is_spike and (e.vertex - f.vertex) % n in (1, n - 1):
                problems.append("spike-to-spike arc runs along a side")
            if not f.is_spike and f.side in ((e.vertex - 1) % n, e.vertex):
                problems.append("spike-to-edge arc runs along its own side")
    if not a.start.is_spike and not a.end.is_spike and a.start.side == a.end.side:
        problems.append("both feet lie on the same side")
    return problems


def endpoint_vector(s: DecoratedSurface, e: ArcEndpoint) -> np.ndarray:
    """Hyperboloid foot, or the decorated lightlike vector of the spike."""
    if e.is_spike:
        return s.domain.vertices[e.vertex].v.copy()
    return s.domain.side_point(e.side, e.t)


def endpoint_klein(s: DecoratedSurface, e: ArcEndpoint) -> np.ndarray:
    if e.is_spike:
        return s.domain.klein_vertex(e.vertex)
    return s.domain.side_point_klein(e.side, e.t)


def geodesic_between(u, v) -> Geodesic:
    """Geodesic through two points or ideal points (orientation not significant)."""
    return geodesic_from_dual(mcross(u, v))


def arc_geodesic(s: DecoratedSurface, a: GeodesicArc) -> Geodesic:
    return geodesic_between(endpoint_vector(s, a.start), endpoint_vector(s, a.end))


def side_geodesic(s: DecoratedSurface, j: int) -> Geodesic:
    i0, i1 = s.domain.side_vertices(j)
    return geodesic_between(s.domain.vertices[i0].v, s.domain.vertices[i1].v)


def incidence_sines(s: DecoratedSurface, a: GeodesicArc) -> list[float]:
    """Sines of the angles at which the arc meets the boundary at its feet."""
    g = arc_geodesic(s, a)
    out = []
    for e in (a.start, a.end):
        if not e.is_spike:
            out.append(sin_angle_at(endpoint_vector(s, e), g, side_geodesic(s, e.side)))
    return out


def chords_relation(s: DecoratedSurface, a: GeodesicArc, b: GeodesicArc) -> str:
    """``"disjoint"``, ``"cross"``, ``"touch"`` (shared foot) or ``"equal"``."""
    n = s.domain.size
    pa = sorted((a.start.position(), a.end.position()))
    pb = sorted((b.start.position(), b.end.position()))
    if np.allclose(pa, pb, atol=1e-12):
        return "equal"
    shared = [x for x in pa if any(abs(x - y) < 1e-12 for y in pb)]
    for x in shared:
        if abs(x - round(x)) > 1e-12 or s.domain.vertices[int(round(x)) % n].kind != "ideal":
            return "touch"
    if shared:
        return "disjoint"

    def inside(x, lo, hi):
        return lo < x < hi

    ins = [inside(x, pa[0], pa[1]) for x in pb]
    return "cross" if ins[0] != ins[1] else "disjoint"


def pairwise_disjoint(s: DecoratedSurface, arcs) -> bool:
    return not disjointness_witnesses(s, arcs)


def disjointness_witnesses(s: DecoratedSurface, arcs) -> list[tuple[int, int, str]]:
    arcs = list(arcs)
    out = []
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            rel = chords_relation(s, arcs[i], arcs[j])
            if rel != "disjoint":
                out.append((i, j, rel))
    return out


# ----------------------------------------------------------------------------
# tilings


@dataclass
class Piece:
    """Convex sub-polygon of the fundamental polygon cut out by the chords.

    ``nodes`` are boundary positions in counterclockwise order; ``edges[i]``
    labels the edge from ``nodes[i]`` to ``nodes[i+1]``: ``None`` for a run
    along the polygon boundary, or the index of a chord.
    """

    id: int
    nodes: list[float]
    edges: list[int | None]
    tile: int = -1


@dataclass
class Tile:
    id: int
    pieces: list[int]
    internal_sides: list[int]
    spike_corners: list[int]
    pairings: int
    is_disk: bool

    @property
    def spike_count(self) -> int:
        return len(self.spike_corners)


@dataclass
class Tiling:
    surface: DecoratedSurface
    arcs: tuple[GeodesicArc, ...]
    pieces: list[Piece]
    tiles: list[Tile]
    chord_pieces: dict[int, tuple[int, int]]
    side_piece: dict[int, int]
    corner_piece: dict[int, list[int]] = field(default_factory=dict)

    def tile_of_piece(self, p: int) -> int:
        return self.pieces[p].tile

    def adjacency(self) -> dict[int, tuple[int, int]]:
        """Arc index to the pair of tiles it borders."""
        return {k: (self.pieces[a].tile, self.pieces[b].tile) for k, (a, b) in self.chord_pieces.items()}


def _on_run(x: float, a: float, b: float, n: int) -> bool:
    hi = b if b > a else b + n
    return a - 1e-12 <= x <= hi + 1e-12 or a - 1e-12 <= x + n <= hi + 1e-12


def _insert_node(piece: Piece, x: float, n: int) -> int:
    for i, node in enumerate(piece.nodes):
        if abs(node - x) < 1e-12:
            return i
    m = len(piece.nodes)
    for i in range(m):
        a, b = piece.nodes[i], piece.nodes[(i + 1) % m]
        if piece.edges[i] is None and _on_run(x, a, b, n):
            piece.nodes.insert(i + 1, x)
            piece.edges.insert(i + 1, None)
            return i + 1
    raise GeometryError("chord endpoint not on the piece boundary")


def _contains(piece: Piece, x: float, n: int) -> bool:
    m = len(piece.nodes)
    for i in range(m):
        if piece.edges[i] is None and _on_run(x, piece.nodes[i], piece.nodes[(i + 1) % m], n):
            return True
        if abs(piece.nodes[i] - x) < 1e-12:
            return True
    return False


def _split(pieces: list[Piece], k: int, p: float, q: float, n: int) -> None:
    host = None
    for pc in pieces:
        if _contains(pc, p, n) and _contains(pc, q, n):
            # the chord must not run along an existing chord of this piece
            host = pc
            break
    if host is None:
        raise ArcsCross(f"arc {k} does not lie inside a single piece")
    _insert_node(host, p, n)
    _insert_node(host, q, n)
    ip = _insert_node(host, p, n)
    iq = _insert_node(host, q, n)
    m = len(host.nodes)

    def cyc(i0, i1):
        idx = [i0]
        while idx[-1] != i1:
            idx.append((idx[-1] + 1) % m)
        return idx

    first, second = cyc(ip, iq), cyc(iq, ip)
    nodes_a = [host.nodes[i] for i in first]
    edges_a = [host.edges[i] for i in first[:-1]] + [k]
    nodes_b = [host.nodes[i] for i in second]
    edges_b = [host.edges[i] for i in second[:-1]] + [k]
    host.nodes, host.edges = nodes_a, edges_a
    pieces.append(Piece(len(pieces), nodes_b, edges_b))


def tiles(s: DecoratedSurface, arcs) -> Tiling:
    """Cut the polygon along the chords and glue pieces across side pairings."""
    arcs = tuple(arcs)
    for k, a in enumerate(arcs):
        problems = validate_arc(s, a)
        if problems:
            raise GeometryError(f"arc {k}: " + "; ".join(problems))
    bad = disjointness_witnesses(s, arcs)
    if bad:
        raise ArcsCross(f"arcs {bad[0][0]} and {bad[0][1]} {bad[0][2]}")
    dom = s.domain
    n = dom.size
    pieces = [Piece(0, [float(i) for i in range(n)], [None] * n)]
    for k, a in enumerate(arcs):
        _split(pieces, k, a.start.position(), a.end.position(), n)

    chord_pieces: dict[int, list[int]] = {}
    side_piece: dict[int, int] = {}
    for pc in pieces:
        m = len(pc.nodes)
        for i, e in enumerate(pc.edges):
            if e is not None:
                chord_pieces.setdefault(e, []).append(pc.id)
            else:
                a0, b0 = pc.nodes[i], pc.nodes[(i + 1) % m]
                if abs(a0 - round(a0)) < 1e-12 and abs((b0 - a0) % n - 1.0) < 1e-12:
                    j = int(round(a0)) % n
                    if dom.sides[j].kind == "paired":
                        side_piece[j] = pc.id

    parent = list(range(len(pieces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    corner_parent: dict[tuple[int, int], tuple[int, int]] = {}

    def cfind(x):
        corner_parent.setdefault(x, x)
        while corner_parent[x] != x:
            x = corner_parent[x]
        return x

    pair_edges = []
    cycle_roots = set()
    for j, side in enumerate(dom.sides):
        if side.kind != "paired" or side.partner < j:
            continue
        jp = side.partner
        pa, pb = side_piece[j], side_piece[jp]
        pair_edges.append((pa, pb))
        ra, rb = find(pa), find(pb)
        if ra == rb:
            cycle_roots.add(ra)
        else:
            parent[ra] = rb
        g = s.holonomy(side.word)
        a0, a1 = dom.side_vertices(jp)
        b0, b1 = dom.side_vertices(j)
        match = [(a0, b1), (a1, b0)] if g.det_sign > 0 else [(a0, b0), (a1, b1)]
        for u, v in match:
            if dom.vertices[u].kind == "ideal" and dom.vertices[v].kind == "ideal":
                corner_parent[cfind((pb, u))] = cfind((pa, v))

    roots = sorted({find(p.id) for p in pieces}, key=lambda r: min(p.id for p in pieces if find(p.id) == r))
    cycle_roots = {find(r) for r in cycle_roots}
    tile_list = []
    for t_id, r in enumerate(roots):
        members = [p.id for p in pieces if find(p.id) == r]
        for m in members:
            pieces[m].tile = t_id
        internal = [e for m in members for e in pieces[m].edges if e is not None]
        corners = set()
        spikes = []
        for m in members:
            for x in pieces[m].nodes:
                if abs(x - round(x)) < 1e-12:
                    vi = int(round(x)) % n
                    if dom.vertices[vi].kind == "ideal":
                        root = cfind((m, vi))
                        if root not in corners:
                            corners.add(root)
                            spikes.append(dom.vertices[vi].spike)
        npair = sum(1 for a, b in pair_edges if find(a) == r)
        is_disk = r not in cycle_roots and npair == len(members) - 1
        tile_list.append(Tile(t_id, members, sorted(internal), spikes, npair, is_disk))

    corner_piece: dict[int, list[int]] = {}
    for pc in pieces:
        for x in pc.nodes:
            if abs(x - round(x)) < 1e-12:
                vi = int(round(x)) % n
                if dom.vertices[vi].kind == "ideal":
                    corner_piece.setdefault(vi, []).append(pc.id)
    cp = {k: (v[0], v[1]) for k, v in chord_pieces.items()}
    return Tiling(s, arcs, pieces, tile_list, cp, side_piece, corner_piece)


def non_filling_witnesses(t: Tiling) -> list[str]:
    out = []
    for tile in t.tiles:
        if not tile.is_disk:
            out.append(f"tile {tile.id} is not a disk")
        if tile.spike_count > 1:
            out.append(f"tile {tile.id} has {tile.spike_count} spikes")
    return out


def is_filling(s: DecoratedSurface, arcs) -> bool:
    return not non_filling_witnesses(tiles(s, arcs))


def require_filling(s: DecoratedSurface, arcs) -> Tiling:
    t = tiles(s, arcs)
    w = non_filling_witnesses(t)
    if w:
        raise NotFilling("arc family is not filling: " + "; ".join(w), w)
    return t


def tile_types(t: Tiling) -> dict[int, int]:
    """Histogram of tiles by number of internal sides."""
    counts: dict[int, int] = {}
    for tile in t.tiles:
        k = len(tile.internal_sides)
        if k == 0 and not (t.surface.family == "polygon" and t.surface.spike_count == 3):
            raise NotFilling("a tile without internal sides only occurs for the ideal triangle", [f"tile {tile.id}"])
        counts[k] = counts.get(k, 0) + 1
    return dict(sorted(counts.items()))


@dataclass
class PrunedPointReport:
    ok: bool
    problems: list[str]
    witnesses: list[str]
    min_incidence_sine: float | None

    def to_dict(self) -> dict:
        return {"ok": self.ok, "problems": self.problems, "witnesses": self.witnesses,
                "min_incidence_sine": self.min_incidence_sine}


INCIDENCE_DIAGNOSTIC = 1e-3


def validate_pruned_point(s: DecoratedSurface, x: WeightedArcFamily) -> PrunedPointReport:
    problems: list[str] = []
    witnesses: list[str] = []
    if len(x.arcs) == 0:
        problems.append("empty arc family")
    if np.any(x.weights <= 0):
        problems.append("all weights must be strictly positive")
    if len(x.weights) and abs(float(x.weights.sum()) - 1.0) > 1e-12:
        problems.append("weights must sum to one")
    for k, a in enumerate(x.arcs):
        for msg in validate_arc(s, a):
            problems.append(f"arc {k}: {msg}")
        if a.kind is ArcKind.SPIKE_TO_SPIKE:
            problems.append(f"arc {k}: spike-to-spike arcs are not arcs of a crowned surface")
    sines: list[float] = []
    if not problems:
        bad = disjointness_witnesses(s, x.arcs)
        for i, j, rel in bad:
            problems.append(f"arcs {i} and {j} are not disjoint ({rel})")
        if not bad:
            t = tiles(s, x.arcs)
            witnesses = non_filling_witnesses(t)
            if witnesses:
                problems.append("family is not filling")
            for tile in t.tiles:
                if len(tile.internal_sides) == 1 and tile.spike_count == 0 and tile.is_disk:
                    problems.append(f"tile {tile.id} is cut off by an inessential arc")
            for a in x.arcs:
                sines.extend(incidence_sines(s, a))
    min_sine = min(sines) if sines else None
    if min_sine is not None and min_sine < INCIDENCE_DIAGNOSTIC:
        witnesses.append(f"boundary incidence sine {min_sine:.3g} below {INCIDENCE_DIAGNOSTIC}")
    return PrunedPointReport(not problems, problems, witnesses, min_sine)


# ----------------------------------------------------------------------------
# bundled triangulations


def bundled_triangulation(s: DecoratedSurface) -> list[GeodesicArc]:
    """A maximal filling family for each bundled surface family."""
    n = s.domain.size
    if s.family == "polygon" and n in (3, 4):
        arcs = [edge_arc((v - 1) % n, 0.75, v, 0.25) for v in range(n)]
        if n == 4:
            arcs.append(edge_arc(0, 0.5, 2, 0.5))
        return arcs
    if s.family == "crown" and s.spike_count == 1:
        return [spike_arc(3, 0, 0.5), edge_arc(2, 0.5, 0, 0.75)]
    if s.family == "annulus" and s.spike_count == 2:
        # polygon [R, C, gR, gP, D, P]
        return [
            edge_arc(0, 0.2, 4, 0.8),
            edge_arc(1, 0.3, 4, 0.2),
            spike_arc(4, 1, 0.7),
            spike_arc(1, 4, 0.5),
        ]
    if s.family == "moebius" and s.spike_count == 1:
        # polygon [R, hP, hR, x, P]
        return [spike_arc(3, 0, 0.5), edge_arc(0, 0.25, 3, 0.5)]
    raise NotImplementedError(f"no bundled triangulation for {s.name}")
