"""Margulis invariants, crooked planes and photons.

An infinitesimal deformation ``u`` of the holonomy defines affine
isometries ``x -> Ad(rho(g)) x + u(g)`` of Minkowski space.  Its Margulis
invariant on a hyperbolic element is the first variation of translation
length.  Crooked planes built from the arcs of a strip deformation bound
fundamental domains, and the motions of the decorated spikes define
lightlike affine lines (photons).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from crownstrip import words as W
from crownstrip.arc_complex import ArcKind, WeightedArcFamily, endpoint_vector, geodesic_between
from crownstrip.errors import (
    DisjointnessFailure,
    IntersectingPhotons,
    MismatchedLinearPart,
    NotEdgeToEdge,
    NotHyperbolic,
    NotInPlane,
    SpikeNotFound,
    StemsCross,
)
from crownstrip.hyperbolic import geodesic_from_dual, intersection
from crownstrip.isometry import Isometry, IsometryType, act, adjoint, classify_isometry, neutral_vector
from crownstrip.minkowski import bilinear, mcross, norm2
from crownstrip.strip import Cocycle, TangentVector, TileMap, dl_horoball_tangent, tile_map
from crownstrip.surface import DecoratedSurface, enumerate_closed_geodesics, enumerate_horoball_connections

# ----------------------------------------------------------------------------
# Margulis invariant


def margulis_invariant(u: Cocycle, word) -> float:
    """``<u(w), v0(w)>`` with ``v0`` the neutral vector of ``rho(w)``."""
    g = u.holonomy(word)
    if classify_isometry(g) not in (IsometryType.HYPERBOLIC, IsometryType.GLIDE_REFLECTION):
        raise NotHyperbolic(f"{W.to_str(word)} is not hyperbolic")
    return bilinear(u(word), neutral_vector(g))


@dataclass
class Witness:
    kind: str
    label: str
    length: float
    dl: float
    ratio: float


@dataclass
class AdmissibilityReport:
    """Verdict up to the cutoffs; never a proof of properness."""

    admissible: bool
    epsilon: float
    minimum: float | None
    witness: Witness | None
    checked: int
    entries: list[Witness] = field(default_factory=list)

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "admissible_up_to_cutoffs": self.admissible,
            "epsilon": self.epsilon,
            "minimum": self.minimum,
            "checked": self.checked,
            "witness": None if w is None else w.__dict__,
        }


def admissible_check(s: DecoratedSurface, t: TangentVector, word_cutoff: int, length_cutoff: float,
                     epsilon: float) -> AdmissibilityReport:
    """Compare the relative length variations of short curves against ``epsilon``.

    Closed geodesics use ``dl / l``.  Horoball connections use ``dl / l`` for
    positive length and the raw ``dl`` otherwise.
    """
    if word_cutoff < 1 or length_cutoff < 1:
        raise ValueError("cutoffs must be at least 1")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    entries: list[Witness] = []
    if s.rank:
        for g in enumerate_closed_geodesics(s, word_cutoff):
            if g.length > length_cutoff:
                continue
            dl = margulis_invariant(t.cocycle, g.word)
            entries.append(Witness("closed", W.to_str(g.word), g.length, dl, dl / g.length))
    if s.spike_count:
        for c in enumerate_horoball_connections(s, word_cutoff, length_cutoff):
            dl = dl_horoball_tangent(s, t, c)
            ratio = dl / c.length if c.length > 0 else dl
            label = f"{c.spike_from}->{c.spike_to} [{W.to_str(c.word)}]"
            entries.append(Witness("horoball", label, c.length, dl, ratio))
    if not entries:
        return AdmissibilityReport(True, epsilon, None, None, 0, entries)
    worst = min(entries, key=lambda e: (e.ratio, e.length))
    return AdmissibilityReport(worst.ratio >= epsilon, epsilon, worst.ratio, worst, len(entries), entries)


@dataclass
class SignCensus:
    verdict: str
    positive: int
    negative: int
    zero: int
    witnesses: tuple[W.Word, ...] = ()


def opposite_sign_check(u: Cocycle, word_cutoff: int, tol: float = 1e-12) -> SignCensus:
    """Sign census of the Margulis invariant over conjugacy classes.

    Returns ``AllPositive``, ``AllNegative``, ``Mixed`` (with one witness of
    each sign) or ``Degenerate`` when some invariant vanishes.
    """
    if word_cutoff < 1:
        raise ValueError("word_cutoff must be at least 1")
    pos: list[W.Word] = []
    neg: list[W.Word] = []
    zero: list[W.Word] = []
    for w in W.conjugacy_representatives(len(u.generators), word_cutoff, unoriented=True):
        a = margulis_invariant(u, w)
        (pos if a > tol else neg if a < -tol else zero).append(w)
    if pos and neg:
        return SignCensus("Mixed", len(pos), len(neg), len(zero), (pos[0], neg[0]))
    if zero:
        return SignCensus("Degenerate", len(pos), len(neg), len(zero), (zero[0],))
    return SignCensus("AllPositive" if pos else "AllNegative", len(pos), len(neg), 0)


def mixed_schottky_example(translation_length: float = 3.0) -> Cocycle:
    """Rank-two Schottky group with a cocycle whose invariants change sign."""
    h = translation_length / 2.0
    g1 = Isometry.from_matrix(np.diag([np.exp(h), np.exp(-h)]))
    r = np.array([[np.cos(np.pi / 4), -np.sin(np.pi / 4)], [np.sin(np.pi / 4), np.cos(np.pi / 4)]])
    g2 = Isometry.from_matrix(r @ g1.m @ r.T)
    return Cocycle([g1, g2], np.array([neutral_vector(g1), -0.5 * neutral_vector(g2)]))


# ----------------------------------------------------------------------------
# crooked planes


@dataclass(frozen=True)
class StemQuadrant:
    vplus: np.ndarray
    vminus: np.ndarray


QUADRANT_TOL = 1e-9


def stem_quadrant_contains(sq: StemQuadrant, w, tol: float = QUADRANT_TOL) -> bool:
    """Whether ``w = a vplus - b vminus`` with ``a, b > 0``."""
    w = np.asarray(w, dtype=float)
    m = np.column_stack([sq.vplus, -sq.vminus])
    coef, *_ = np.linalg.lstsq(m, w, rcond=None)
    scale = max(1.0, float(np.linalg.norm(w)))
    if np.linalg.norm(m @ coef - w) > 1e-8 * scale:
        raise NotInPlane("vector is not in the plane of the quadrant")
    return bool(np.all(coef > tol * scale))


@dataclass(frozen=True)
class CrookedPlane:
    """Crooked plane with vertex ``w`` and spacelike director ``v``.

    ``vplus`` and ``vminus`` are the attracting and repelling fixed points of
    the Killing field ``v``, normalized to ``z = 1``.  The set only depends on
    ``v`` up to sign; the sign selects the stem quadrant.
    """

    w: np.ndarray
    v: np.ndarray
    vplus: np.ndarray
    vminus: np.ndarray

    @property
    def quadrant(self) -> StemQuadrant:
        return StemQuadrant(self.vplus, self.vminus)

    def reoriented(self) -> "CrookedPlane":
        return CrookedPlane(self.w, -self.v, self.vminus, self.vplus)

    def pieces(self) -> list[tuple[np.ndarray, list]]:
        """Closed convex pieces as ``(2 spanning columns, bounds)``: two stem halves, two wings."""
        free, pos = (None, None), (0, None)
        vp, vm, v = self.vplus, self.vminus, self.v
        return [
            (np.column_stack([vp, vm]), [pos, pos]),
            (np.column_stack([-vp, -vm]), [pos, pos]),
            (np.column_stack([vp, v]), [free, pos]),
            (np.column_stack([vm, -v]), [free, pos]),
        ]

    def to_dict(self) -> dict:
        return {k: [float(x) for x in getattr(self, k)] for k in ("w", "v", "vplus", "vminus")}


def crooked_plane(w, v) -> CrookedPlane:
    g = geodesic_from_dual(v)
    return CrookedPlane(np.asarray(w, dtype=float).copy(), g.n.copy(), g.vplus / g.vplus[2], g.vminus / g.vminus[2])


def transform_plane(g: Isometry, u, p: CrookedPlane) -> CrookedPlane:
    """Image of a crooked plane under ``x -> Ad(g) x + u``."""
    return crooked_plane(adjoint(g, p.w) + np.asarray(u, dtype=float), adjoint(g, p.v))


def _arc_plane(tm: TileMap, k: int, word=()) -> CrookedPlane:
    """Plane of the translate ``rho(word)`` of arc ``k`` computed from lifted data."""
    s = tm.surface
    arc = tm.tiling.arcs[k]
    lo, hi = sorted(tm.tiling.chord_pieces[k])
    g = tm.cocycle.holonomy(word)
    geo = geodesic_between(act(g, endpoint_vector(s, arc.start)), act(g, endpoint_vector(s, arc.end)))
    inside = act(g, tm.piece_points[hi])
    plane = crooked_plane(0.5 * (tm.value(lo, word) + tm.value(hi, word)), geo.n)
    # the tile across which the strip pushes lies to the left when looking from vminus
    if det_sign(plane.vminus, plane.vplus, inside) < 0:
        plane = plane.reoriented()
    return plane


def det_sign(a, b, p) -> float:
    """Orientation of the Klein-model triangle ``(a, b, p)``."""
    ka, kb, kp = (np.asarray(x[:2]) / x[2] for x in (a, b, p))
    d1, d2 = kb - ka, kp - ka
    return float(np.sign(d1[0] * d2[1] - d1[1] * d2[0]))


def crooked_from_arc(tm: TileMap, k: int) -> CrookedPlane:
    """Crooked plane of an edge-to-edge arc: vertex at the mean of the adjacent tile values."""
    if tm.tiling.arcs[k].kind is not ArcKind.EDGE_TO_EDGE:
        raise NotEdgeToEdge(f"arc {k} ends in a spike")
    return _arc_plane(tm, k)


def crooked_equivariance_residual(tm: TileMap, k: int, max_len: int = 3) -> float:
    """Mismatch between directly lifted planes and translates of the base plane."""
    base = crooked_from_arc(tm, k)
    worst = 0.0
    for w in W.enumerate_reduced(tm.surface.rank, max_len):
        g = tm.cocycle.holonomy(w)
        a = transform_plane(g, tm.cocycle(w), base)
        b = _arc_plane(tm, k, w)
        worst = max(worst, _plane_mismatch(a, b))
    return worst


def _plane_mismatch(a: CrookedPlane, b: CrookedPlane) -> float:
    """Relative difference of vertices and of directors up to sign."""
    dv = min(np.max(np.abs(a.v - b.v)), np.max(np.abs(a.v + b.v))) / max(1.0, float(np.max(np.abs(a.v))))
    dw = np.max(np.abs(a.w - b.w)) / max(1.0, float(np.max(np.abs(a.w))))
    return float(max(dv, dw))


def _oriented_director(p: CrookedPlane, toward: CrookedPlane) -> CrookedPlane:
    """Reorient ``p`` so that the stem geodesic of ``toward`` lies on its positive side."""
    mid = toward.vplus + toward.vminus
    return p if bilinear(mid, p.v) > 0 else p.reoriented()


def _in_open_cone(d, vectors, tol: float = QUADRANT_TOL) -> bool:
    m = np.column_stack(vectors)
    n = m.shape[1]
    res = linprog(
        np.r_[np.zeros(n), -1.0],
        A_eq=np.column_stack([m, np.zeros(3)]), b_eq=d,
        A_ub=np.column_stack([-np.eye(n), np.ones(n)]), b_ub=np.zeros(n),
        bounds=[(None, None)] * n + [(None, 1.0)], method="highs",
    )
    return res.status == 0 and -res.fun > tol


def quadrant_criterion(p1: CrookedPlane, p2: CrookedPlane) -> bool:
    """``w2 - w1`` in the open sum of the stem quadrants, oriented apart."""
    a = _oriented_director(p1, p2).reoriented()
    b = _oriented_director(p2, p1)
    return _in_open_cone(p2.w - p1.w, [a.vplus, -a.vminus, b.vplus, -b.vminus])


def planes_meet_exact(p1: CrookedPlane, p2: CrookedPlane) -> bool:
    """Feasibility of a common point of some pair of closed convex pieces."""
    for (m1, b1), (m2, b2) in itertools.product(p1.pieces(), p2.pieces()):
        res = linprog(np.zeros(4), A_eq=np.column_stack([m1, -m2]), b_eq=p2.w - p1.w,
                      bounds=b1 + b2, method="highs")
        if res.status == 0:
            return True
    return False


def _unit_pieces(p: CrookedPlane) -> list[tuple[np.ndarray, bool]]:
    """Pieces with unit spanning columns and whether the first parameter is signed."""
    return [(m / np.linalg.norm(m, axis=0), bounds[0] == (None, None)) for m, bounds in p.pieces()]


def _initial_cells(p: CrookedPlane, samples: int, radius: float) -> np.ndarray:
    """Grid cells ``(piece, a0, a1, b0, b1)`` covering the window, about ``samples`` per plane."""
    side = max(1, int(np.sqrt(samples / 4)))
    rows = []
    for k, (_, signed) in enumerate(_unit_pieces(p)):
        a = np.linspace(-radius if signed else 0.0, radius, side + 1)
        b = np.linspace(0.0, radius, side + 1)
        for i in range(side):
            for j in range(side):
                rows.append((k, a[i], a[i + 1], b[j], b[j + 1]))
    return np.array(rows)


def _cell_geometry(p: CrookedPlane, cells: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centres and radii of the images of parameter cells."""
    cols = np.array([m for m, _ in _unit_pieces(p)])[cells[:, 0].astype(int)]
    am = 0.5 * (cells[:, 1] + cells[:, 2])
    bm = 0.5 * (cells[:, 3] + cells[:, 4])
    centre = p.w + am[:, None] * cols[:, :, 0] + bm[:, None] * cols[:, :, 1]
    radius = 0.5 * ((cells[:, 2] - cells[:, 1]) + (cells[:, 4] - cells[:, 3]))
    return centre, radius


def _split(cells: np.ndarray) -> np.ndarray:
    """Four children of every cell, in order."""
    k, a0, a1, b0, b1 = cells.T
    am, bm = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
    kids = [(a0, am, b0, bm), (am, a1, b0, bm), (a0, am, bm, b1), (am, a1, bm, b1)]
    return np.stack([np.column_stack([k, *kid]) for kid in kids], axis=1).reshape(-1, 5)


def sampled_separation(p1: CrookedPlane, p2: CrookedPlane, samples: int = 1000, radius: float = 4.0,
                       max_pairs: int = 2_000_000, min_step: float = 1e-4) -> tuple[bool, float, float]:
    """Coarse-to-fine sampled separation of two crooked planes inside a window.

    Cell centres are the samples.  A pair of cells is discarded once the
    distance of their centres exceeds the sum of their radii; the rest are
    subdivided.  Returns ``(disjoint, upper, lower)`` where ``upper`` is the
    smallest sampled distance and ``lower`` a bound valid for the window.
    Pairs that survive to cells of size ``min_step`` count as meeting.
    """
    c1, c2 = _initial_cells(p1, samples, radius), _initial_cells(p2, samples, radius)
    i1, i2 = np.meshgrid(np.arange(len(c1)), np.arange(len(c2)), indexing="ij")
    left, right = c1[i1.ravel()], c2[i2.ravel()]
    upper, lower = np.inf, np.inf
    while True:
        x1, r1 = _cell_geometry(p1, left)
        x2, r2 = _cell_geometry(p2, right)
        d = np.linalg.norm(x1 - x2, axis=1)
        upper = min(upper, float(d.min()))
        gap = d - r1 - r2
        keep = gap <= 0.0
        lower = min(lower, float(gap[~keep].min())) if (~keep).any() else lower
        if not keep.any():
            return True, upper, lower
        left, right = left[keep], right[keep]
        if max(r1[keep].max(), r2[keep].max()) < min_step or 16 * len(left) > max_pairs:
            return False, upper, 0.0
        n = len(left)
        left = np.repeat(_split(left).reshape(n, 4, 5), 4, axis=1).reshape(-1, 5)
        right = np.tile(_split(right).reshape(n, 4, 5), (1, 4, 1)).reshape(-1, 5)


@dataclass
class DisjointnessReport:
    quadrant: bool
    exact: bool
    sampled_separation: float
    sampled_disjoint: bool

    @property
    def disjoint(self) -> bool:
        return self.quadrant

    @property
    def agree(self) -> bool:
        return self.quadrant == self.exact == self.sampled_disjoint


def crooked_disjoint_report(p1: CrookedPlane, p2: CrookedPlane, samples: int = 1000,
                            radius: float | None = None) -> DisjointnessReport:
    """Quadrant criterion, exact piecewise feasibility and sampled separation.

    The sampled verdict only covers a window around the vertices whose size
    grows with their distance.
    """
    g1, g2 = geodesic_from_dual(p1.v), geodesic_from_dual(p2.v)
    if intersection(g1, g2) is not None:
        raise StemsCross("stem geodesics intersect")
    radius = radius or 4.0 * (1.0 + float(np.linalg.norm(p2.w - p1.w)))
    ok, upper, _ = sampled_separation(p1, p2, samples, radius)
    return DisjointnessReport(quadrant_criterion(p1, p2), not planes_meet_exact(p1, p2), upper, ok)


def crooked_disjoint(p1: CrookedPlane, p2: CrookedPlane, samples: int = 1000) -> bool:
    """Stem-quadrant criterion; see :func:`crooked_disjoint_report` for corroboration."""
    return crooked_disjoint_report(p1, p2, samples).quadrant


# ----------------------------------------------------------------------------
# photons


@dataclass(frozen=True)
class Photon:
    """Affine lightlike line ``w + R v0``."""

    w: np.ndarray
    v0: np.ndarray

    def to_dict(self) -> dict:
        return {"w": [float(x) for x in self.w], "v0": [float(x) for x in self.v0]}


def photon_from_spike(tm: TileMap, spike_id: int, word=()) -> Photon:
    """Photon of the translate ``rho(word)`` of a decorated spike."""
    s = tm.surface
    if not 0 <= spike_id < s.spike_count:
        raise SpikeNotFound(f"no spike {spike_id}")
    base = tm.spike_tile_value(spike_id)
    g = tm.cocycle.holonomy(word)
    return Photon(tm.cocycle(word) + adjoint(g, base), act(g, s.spikes[spike_id].v))


def photon_pairing(l1: Photon, l2: Photon) -> float:
    return bilinear(l1.w - l2.w, mcross(l1.v0, l2.v0))


def _parallel(a, b) -> bool:
    return float(np.linalg.norm(np.cross(a, b))) <= 1e-12 * float(np.linalg.norm(a) * np.linalg.norm(b))


def photons_intersect(l1: Photon, l2: Photon, tol: float = 1e-10) -> bool:
    if _parallel(l1.v0, l2.v0):
        d = l1.w - l2.w
        return float(np.linalg.norm(np.cross(d, l1.v0))) <= tol * max(1.0, float(np.linalg.norm(d)))
    scale = max(1.0, float(np.linalg.norm(l1.w - l2.w))) * float(np.linalg.norm(mcross(l1.v0, l2.v0)))
    return abs(photon_pairing(l1, l2)) <= tol * scale


def handedness(l1: Photon, l2: Photon) -> int:
    """Sign of ``<w1 - w2, mcross(v1, v2)>`` for the pair in the given order."""
    if photons_intersect(l1, l2):
        raise IntersectingPhotons("photons meet")
    return 1 if photon_pairing(l1, l2) > 0 else -1


# ----------------------------------------------------------------------------
# decorated spacetimes


@dataclass
class CrookedPair:
    generator: int
    arc: int
    source: CrookedPlane
    target: CrookedPlane
    residual: float


@dataclass
class DecoratedSpacetime:
    holonomy: list[Isometry]
    cocycle: Cocycle
    photons: list[Photon]
    crooked_fd: list[CrookedPair]
    checks: dict

    def to_dict(self) -> dict:
        return {
            "cocycle": [[float(x) for x in u] for u in self.cocycle.values],
            "photons": [p.to_dict() for p in self.photons],
            "crooked_planes": [
                {**pair.source.to_dict(), "paired_with": 2 * i + 1, "pairing_word": [pair.generator]}
                for i, pair in enumerate(self.crooked_fd)
            ] + [
                {**pair.target.to_dict(), "paired_with": 2 * i, "pairing_word": [-pair.generator]}
                for i, pair in enumerate(self.crooked_fd)
            ],
            "checks": self.checks,
        }


def photon_census(tm: TileMap, word_cutoff: int = 2, length_cutoff: float = 50.0) -> tuple[set[int], list[str]]:
    """Handedness signs and intersections over photon pairs joined by horoball connections."""
    s = tm.surface
    signs: set[int] = set()
    meets: list[str] = []
    if s.spike_count == 0:
        return signs, meets
    for c in enumerate_horoball_connections(s, word_cutoff, length_cutoff):
        l1 = photon_from_spike(tm, c.spike_from)
        l2 = photon_from_spike(tm, c.spike_to, c.word)
        if photons_intersect(l1, l2):
            meets.append(f"{c.spike_from}->{c.spike_to} [{W.to_str(c.word)}]")
        else:
            signs.add(handedness(l1, l2))
    return signs, meets


def build_decorated_spacetime(s: DecoratedSurface, x: WeightedArcFamily, word_cutoff: int = 2) -> DecoratedSpacetime:
    """Cocycle, photons and crooked planes of the strip deformation of ``x``.

    Each generator is paired with one edge-to-edge arc: the plane of the arc
    and of its translate by the generator.
    """
    tm = tile_map(s, x)
    photons = [photon_from_spike(tm, i) for i in range(s.spike_count)]
    signs, meets = photon_census(tm, word_cutoff)
    problems = [f"photons meet: {m}" for m in meets]
    if len(signs) > 1:
        problems.append("photon pairs have mixed handedness")
    pairs: list[CrookedPair] = []
    edge_arcs = [k for k, a in enumerate(tm.tiling.arcs) if a.kind is ArcKind.EDGE_TO_EDGE and tm.weights[k] > 0]
    for i in range(s.rank):
        if not edge_arcs:
            problems.append(f"no edge-to-edge arc for generator {i + 1}")
            continue
        k = edge_arcs[0]
        src = crooked_from_arc(tm, k)
        tgt = transform_plane(s.generators[i], tm.cocycle.values[i], src)
        direct = _arc_plane(tm, k, (i + 1,))
        residual = _plane_mismatch(tgt, direct)
        try:
            rep = crooked_disjoint_report(src, tgt)
            if rep.quadrant and not rep.exact:
                problems.append(f"criteria disagree for generator {i + 1}")
            if not rep.exact:
                problems.append(f"crooked planes of generator {i + 1} meet")
        except StemsCross:
            problems.append(f"stems of generator {i + 1} cross")
        pairs.append(CrookedPair(i + 1, k, src, tgt, residual))
    if problems:
        raise DisjointnessFailure("; ".join(problems), problems)
    checks = {
        "handedness": sorted(signs)[0] if signs else None,
        "disjointness": True,
        "opposite_sign": opposite_sign_check(tm.cocycle, word_cutoff).verdict if s.rank else None,
        "crooked_residual": max((p.residual for p in pairs), default=0.0),
    }
    return DecoratedSpacetime(list(s.generators), tm.cocycle, photons, pairs, checks)


def recover_tangent(dst: DecoratedSpacetime, s: DecoratedSurface, tol: float = 1e-9) -> TangentVector:
    """Tangent vector whose spike motions are realized by the photons."""
    if len(dst.holonomy) != s.rank or len(dst.photons) != s.spike_count:
        raise MismatchedLinearPart("spacetime and surface have different shapes")
    for a, b in zip(dst.holonomy, s.generators):
        if a.det_sign != b.det_sign or not np.allclose(a.m, b.m, atol=tol):
            raise MismatchedLinearPart("linear parts differ from the surface holonomy")
    for p, d in zip(dst.photons, s.spikes):
        if not _parallel(p.v0, d.v) or norm2(p.v0) > 1e-9 * float(np.dot(p.v0, p.v0)):
            raise MismatchedLinearPart("photon direction is not the spike decoration")
    motions = np.array([mcross(p.w, d.v) for p, d in zip(dst.photons, s.spikes)]).reshape(s.spike_count, 3)
    return TangentVector(Cocycle(list(s.generators), dst.cocycle.values.copy()), motions)
