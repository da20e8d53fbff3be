"""Acceptance suite: one test per criterion, each recorded as PASS or FAIL.

The verdict lines are printed at the end of the pytest run (and to stdout
when run with ``-s``).
"""

from __future__ import annotations

import contextlib
import time

import numpy as np
import pytest

from conftest import CRITERIA, SURFACE_NAMES, bundled_tile_map, family, surface
from crownstrip import words as W
from crownstrip.arc_complex import ArcKind
from crownstrip.hyperbolic import dist, dist_hilbert, polar_point
from crownstrip.isometry import longitudinal_motion
from crownstrip.margulis import (
    _arc_plane,
    admissible_check,
    build_decorated_spacetime,
    crooked_disjoint_report,
    crooked_equivariance_residual,
    crooked_from_arc,
    margulis_invariant,
    opposite_sign_check,
    photon_from_spike,
    photon_pairing,
)
from crownstrip.minkowski import mcross, spacelike_norm
from crownstrip.strip import (
    Cocycle,
    coboundary,
    dl_closed_analytic,
    dl_closed_fd,
    dl_horoball_analytic,
    dl_horoball_fd,
    quotient_rank,
    tile_map,
    tile_map_from_tiling,
)
from crownstrip.surface import (
    deformation_dim,
    deformation_dim_formula,
    enumerate_closed_geodesics,
    enumerate_horoball_connections,
    rescale_decorations,
)

RANKED = [n for n in SURFACE_NAMES if surface(n).rank]
SPIKED = [n for n in SURFACE_NAMES if surface(n).spike_count]


@contextlib.contextmanager
def criterion(k: int, title: str):
    try:
        yield
    except BaseException:
        CRITERIA[k] = ("FAIL", title)
        print(f"criterion {k}: FAIL  {title}")
        raise
    CRITERIA[k] = ("PASS", title)
    print(f"criterion {k}: PASS  {title}")


def _scaled_error(a: float, b: float) -> float:
    # relative for |dl| >= 1, absolute below
    return abs(a - b) / max(abs(a), abs(b), 1.0)


def _unit_tile_maps(name: str):
    tm = bundled_tile_map(name)
    yield tm
    for k in range(len(tm.tiling.arcs)):
        w = np.zeros(len(tm.tiling.arcs))
        w[k] = 1.0
        yield tile_map_from_tiling(tm.tiling, w)


def test_criterion_01_derivative_oracles():
    """Analytic length derivatives match finite differences on every bundled surface."""
    with criterion(1, "analytic dl = finite-difference dl (< 1e-6, under 30 s)"):
        start = time.perf_counter()
        worst, rows = 0.0, 0
        for name in SURFACE_NAMES:
            s = surface(name)
            closed = enumerate_closed_geodesics(s, 4) if s.rank else []
            conns = enumerate_horoball_connections(s, 4, 6.0) if s.spike_count else []
            for tm in _unit_tile_maps(name):
                t = tm.tangent()
                for g in closed:
                    worst = max(worst, _scaled_error(dl_closed_analytic(tm, g.word)[0], dl_closed_fd(t, g.word)))
                    rows += 1
                for c in conns:
                    worst = max(worst, _scaled_error(dl_horoball_analytic(tm, c), dl_horoball_fd(s, t, c)))
                    rows += 1
        elapsed = time.perf_counter() - start
        print(f"  {rows} comparisons, worst {worst:.2e}, {elapsed:.1f} s")
        assert rows > 0
        assert worst < 1e-6
        assert elapsed < 30.0


def test_criterion_02_margulis_identity():
    """The Margulis invariant is the length derivative and vanishes on coboundaries."""
    with criterion(2, "alpha = FD derivative (1e-8); alpha = 0 on 100 coboundaries (1e-9)"):
        rng = np.random.default_rng(2)
        for name in RANKED:
            s = surface(name)
            t = bundled_tile_map(name).tangent()
            reps = W.conjugacy_representatives(s.rank, 5, unoriented=False)
            for w in reps:
                a = margulis_invariant(t.cocycle, w)
                assert abs(a - dl_closed_fd(t, w)) < 1e-8 * max(1.0, abs(a)), w
            for _ in range(100):
                u = Cocycle(list(s.generators), coboundary(s.generators, rng.normal(size=3)))
                for w in reps:
                    assert abs(margulis_invariant(u, w)) < 1e-9


def test_criterion_03_basis_rank():
    """Strip vectors of each triangulation span a space of the deformation dimension."""
    with criterion(3, "quotient rank = deformation dimension (exact)"):
        assert deformation_dim_formula(True, 0, 3, 2) == 7
        assert deformation_dim(surface("ideal_square")) == 5
        for name in SURFACE_NAMES:
            s = surface(name)
            assert quotient_rank(s) == deformation_dim(s), name


def test_criterion_04_admissibility():
    """Positive weights lengthen every connection; the negated vector is rejected."""
    with criterion(4, "positivity; admissible at 1e-6; negation fails with a witness"):
        for name in SURFACE_NAMES:
            s = surface(name)
            t = bundled_tile_map(name).tangent()
            report = admissible_check(s, t, 4, 6.0, 1e-6)
            assert report.checked > 0
            assert all(e.dl > 0 for e in report.entries), name
            assert report.admissible, name
            bad = admissible_check(s, -t, 4, 6.0, 1e-6)
            assert not bad.admissible and bad.witness is not None, name


def _photon_signs(tm, word_cutoff: int = 3):
    s = tm.surface
    pairings = []
    for c in enumerate_horoball_connections(s, word_cutoff, 50.0):
        l1 = photon_from_spike(tm, c.spike_from)
        l2 = photon_from_spike(tm, c.spike_to, c.word)
        pairings.append(photon_pairing(l1, l2))
    return np.array(pairings)


def test_criterion_05_photons():
    """Photons are pairwise disjoint with one handedness, flipped by negation."""
    with criterion(5, "photons disjoint (|pairing| > 1e-8), constant handedness, flipped by -u"):
        for name in SPIKED:
            tm = bundled_tile_map(name)
            p = _photon_signs(tm)
            assert len(p) > 0
            assert np.min(np.abs(p)) > 1e-8, name
            signs = set(np.sign(p))
            assert len(signs) == 1, name
            neg = _photon_signs(tile_map_from_tiling(tm.tiling, -tm.weights))
            assert np.array_equal(np.sign(neg), -np.sign(p)), name


def test_criterion_06_crooked_planes():
    """Crooked planes are equivariant and the disjointness predicates agree."""
    with criterion(6, "crooked residual < 1e-10 (words <= 3); predicates agree (10^3 samples)"):
        tested = 0
        for name in RANKED:
            tm = bundled_tile_map(name)
            edge = [k for k, a in enumerate(tm.tiling.arcs) if a.kind is ArcKind.EDGE_TO_EDGE]
            for k in edge:
                assert crooked_equivariance_residual(tm, k, 3) < 1e-10, (name, k)
                base = crooked_from_arc(tm, k)
                for w in W.enumerate_reduced(tm.surface.rank, 2):
                    rep = crooked_disjoint_report(base, _arc_plane(tm, k, w), samples=1000)
                    assert rep.agree, (name, k, w)
                    tested += 1
            dst = build_decorated_spacetime(surface(name), family(name))
            for pair in dst.crooked_fd:
                rep = crooked_disjoint_report(pair.source, pair.target, samples=1000)
                assert rep.agree and rep.disjoint
                tested += 1
        print(f"  {tested} plane pairs")


def test_criterion_07_opposite_sign_census():
    """Every pipeline cocycle has positive Margulis invariants up to length 6."""
    with criterion(7, "sign census AllPositive up to word length 6"):
        for name in RANKED:
            census = opposite_sign_check(bundled_tile_map(name).cocycle, 6)
            assert census.verdict == "AllPositive", (name, census)


def test_criterion_08_rescaling():
    """Rescaling decorations shifts connection lengths by 2 ln s and keeps verdicts."""
    with criterion(8, "rescale shifts lengths by 2 ln s (< 1e-12); verdicts unchanged"):
        for name in SPIKED:
            s = surface(name)
            base = {(c.spike_from, c.spike_to, c.word): c.length for c in enumerate_horoball_connections(s, 3, 50.0)}
            verdict = admissible_check(s, bundled_tile_map(name).tangent(), 3, 6.0, 1e-6).admissible
            for scale in (0.5, 2.0, 3.7):
                r = rescale_decorations(s, scale)
                for c in enumerate_horoball_connections(r, 3, 60.0):
                    key = (c.spike_from, c.spike_to, c.word)
                    if key in base:
                        assert abs(c.length - base[key] - 2.0 * np.log(scale)) < 1e-12
                t = tile_map(r, family(name)).tangent()
                assert admissible_check(r, t, 3, 6.0, 1e-6).admissible == verdict


def test_criterion_09_metric_models():
    """Hyperboloid and Hilbert distances agree on random pairs."""
    with criterion(9, "hyperboloid vs Hilbert distance < 1e-10 over 10^4 pairs"):
        rng = np.random.default_rng(9)
        worst = 0.0
        for _ in range(10_000):
            p = polar_point(rng.uniform(0, 6), rng.uniform(0, 2 * np.pi))
            q = polar_point(rng.uniform(0, 6), rng.uniform(0, 2 * np.pi))
            worst = max(worst, abs(dist(p, q) - dist_hilbert(p, q)))
        print(f"  worst {worst:.2e}")
        assert worst < 1e-10


ANGLES = (np.pi / 6, np.pi / 4, np.pi / 3)
TITLE_10 = "longitudinal motions: -8 sin^2 reproduced; 4 cos^2 not reproduced"


def _rectangle(theta: float):
    c, s = np.cos(theta), np.sin(theta)
    return (np.array([-c, -s, 1.0]), np.array([c, -s, 1.0]), np.array([c, s, 1.0]), np.array([-c, s, 1.0]))


def test_criterion_10_longitudinal_sine_branch():
    """The diagonal field moves both sides of the rectangle by -8 sin^2."""
    for theta in ANGLES:
        a, b, c, d = _rectangle(theta)
        x_g = mcross(mcross(a, c), mcross(b, d))
        expected = -8.0 * np.sin(theta) ** 2
        assert abs(longitudinal_motion(x_g, a, b) - expected) < 1e-10
        assert abs(longitudinal_motion(x_g, c, d) - expected) < 1e-10
    CRITERIA[10] = ("PASS", TITLE_10)


@pytest.mark.xfail(strict=True, reason="the cosine closed form is not reproduced; see the decisions ledger")
def test_criterion_10_longitudinal_cosine_branch():
    """The side-crossing field was expected to move the sides by 4 cos^2."""
    try:
        for theta in ANGLES:
            a, b, c, d = _rectangle(theta)
            x_e = mcross(mcross(a, d), mcross(c, b))
            assert spacelike_norm(x_e) > 0
            expected = 4.0 * np.cos(theta) ** 2
            assert abs(abs(longitudinal_motion(x_e, a, b)) - expected) < 1e-10
    except AssertionError:
        CRITERIA[10] = ("FAIL", TITLE_10)
        print(f"criterion 10: FAIL  {TITLE_10}")
        raise
