"""Hyperboloid and Klein models, geodesics and horoballs."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crownstrip.errors import CoincidentPoints, DependentEndpoints, NonLightlike, PointNotOnGeodesic, SameCenter
from crownstrip.hyperbolic import (
    ORIGIN,
    Horoball,
    dist,
    dist_hilbert,
    foot_of_perpendicular,
    from_klein,
    geodesic_from_dual,
    geodesic_from_endpoints,
    geodesic_through,
    horoball_connection_length,
    horoball_contains,
    ideal_point,
    intersection,
    is_point,
    klein,
    midpoint,
    on_geodesic,
    on_horocycle,
    perpendicular_at,
    polar_point,
    sin_angle_at,
)
from crownstrip.isometry import act, flow
from crownstrip.minkowski import bilinear, det3

radii = st.floats(0.0, 5.0)
angles = st.floats(0.0, 2 * np.pi)
points = st.tuples(radii, angles).map(lambda t: polar_point(*t))


def test_distance_example():
    """The point at height cosh 1 on the x axis is at distance 1 from the origin."""
    q = np.array([np.sinh(1.0), 0.0, np.cosh(1.0)])
    assert dist(ORIGIN, q) == pytest.approx(1.0, abs=1e-14)
    assert dist_hilbert(ORIGIN, q) == pytest.approx(1.0, abs=1e-14)


@given(points, points)
def test_models_agree(p, q):
    """Hyperboloid and Hilbert distances coincide."""
    if dist(p, q) < 1e-6:
        return
    assert abs(dist(p, q) - dist_hilbert(p, q)) < 1e-10


@given(points, points, points)
def test_triangle_inequality(p, q, r):
    """Distance is symmetric and satisfies the triangle inequality."""
    assert dist(p, q) == pytest.approx(dist(q, p), abs=1e-12)
    assert dist(p, r) <= dist(p, q) + dist(q, r) + 1e-9


@given(points, points, st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_distance_invariant(p, q, a, b, c):
    """Flows of Killing fields preserve distance."""
    g = flow(np.array([a, b, c]), 1.0)
    assert dist(act(g, p), act(g, q)) == pytest.approx(dist(p, q), abs=1e-8)


def test_hilbert_needs_distinct_points():
    with pytest.raises(CoincidentPoints):
        dist_hilbert(ORIGIN, ORIGIN)


@given(points)
def test_klein_round_trip(p):
    """Klein projection and lift are inverse."""
    np.testing.assert_allclose(from_klein(klein(p)), p, rtol=1e-9)
    assert is_point(p)


def test_geodesic_orientation_example():
    """The x-axis geodesic from (-1,0,1) to (1,0,1) has dual (0,-1,0)."""
    g = geodesic_from_endpoints([-1, 0, 1], [1, 0, 1])
    np.testing.assert_allclose(g.n, [0, -1, 0], atol=1e-15)
    assert det3(g.vminus, g.n, g.vplus) > 0
    assert on_geodesic(ORIGIN, g)


def test_geodesic_errors():
    with pytest.raises(DependentEndpoints):
        geodesic_from_endpoints([1, 0, 1], [2, 0, 2])
    with pytest.raises(NonLightlike):
        geodesic_from_endpoints([1, 0, 0], [0, 1, 1])


@given(angles, st.floats(0.1, 3.0))
def test_geodesic_from_dual_round_trip(theta, gap):
    """Endpoints and dual determine each other."""
    g = geodesic_from_endpoints(ideal_point(theta), ideal_point(theta + gap))
    h = geodesic_from_dual(g.n)
    np.testing.assert_allclose(h.n, g.n, atol=1e-12)
    np.testing.assert_allclose(klein(h.vplus), klein(g.vplus), atol=1e-9)


@given(points, points)
def test_geodesic_through(p, q):
    """The geodesic through two points contains both, oriented from p to q."""
    if dist(p, q) < 1e-3:
        return
    g = geodesic_through(p, q)
    assert on_geodesic(p, g) and on_geodesic(q, g)
    kp, kq, kv = klein(p), klein(q), klein(g.vplus)
    assert (kq - kp) @ (kv - kp) > 0


def test_horoball_connection_examples():
    """Tangent horoballs have length 0; scaling both by e adds 2."""
    assert horoball_connection_length([0, 1, 1], [0, -1, 1]) == pytest.approx(0.0, abs=1e-15)
    e = np.e
    assert horoball_connection_length(e * np.array([0, 1, 1]), e * np.array([0, -1, 1])) == pytest.approx(2.0)
    with pytest.raises(SameCenter):
        horoball_connection_length([0, 1, 1], [0, 2, 2])


def test_sin_angle_example():
    """Duals at sixty degrees meet at the origin with sine sqrt(3)/2."""
    g1 = geodesic_from_dual([1, 0, 0])
    g2 = geodesic_from_dual([np.cos(np.pi / 3), np.sin(np.pi / 3), 0])
    assert sin_angle_at(ORIGIN, g1, g2) == pytest.approx(np.sqrt(3) / 2, abs=1e-15)
    with pytest.raises(PointNotOnGeodesic):
        sin_angle_at(polar_point(1, 0), g1, g2)


def test_perpendicular_example():
    """The perpendicular to the x axis at the origin is the y axis."""
    h = perpendicular_at(geodesic_from_dual([0, 1, 0]), ORIGIN)
    np.testing.assert_allclose(np.abs(h.n), [1, 0, 0], atol=1e-15)


@given(points, angles, st.floats(0.1, 3.0))
def test_foot_is_closest(x, theta, gap):
    """The foot of the perpendicular lies on the geodesic and minimizes distance."""
    g = geodesic_from_endpoints(ideal_point(theta), ideal_point(theta + gap))
    f = foot_of_perpendicular(g, x)
    assert on_geodesic(f, g, 1e-6)
    for t in (-0.5, 0.5):
        assert dist(x, act(flow(g.n, t), f)) >= dist(x, f) - 1e-9


def test_intersection():
    """Coordinate axes meet at the origin; ultraparallel geodesics do not meet."""
    x = intersection(geodesic_from_dual([0, 1, 0]), geodesic_from_dual([1, 0, 0]))
    np.testing.assert_allclose(x, ORIGIN, atol=1e-15)
    far = geodesic_from_endpoints(ideal_point(0.1), ideal_point(0.3))
    near = geodesic_from_endpoints(ideal_point(2.0), ideal_point(2.5))
    assert intersection(far, near) is None


@given(points, points)
def test_midpoint_equidistant(p, q):
    m = midpoint(p, q)
    assert dist(m, p) == pytest.approx(dist(m, q), abs=1e-8)


def test_horoball_membership_examples():
    """Membership is the open condition <p, v> > -1."""
    assert not horoball_contains([0, 1, 1], ORIGIN)
    assert on_horocycle([0, 1, 1], ORIGIN)
    assert not horoball_contains([0, 2, 2], ORIGIN)
    assert horoball_contains([0, 0.5, 0.5], ORIGIN)
    assert horoball_contains(Horoball(np.array([0.0, 0.5, 0.5])), ORIGIN)
    with pytest.raises(NonLightlike):
        Horoball(np.array([1.0, 0.0, 0.0]))


@given(angles, st.floats(0.2, 5.0))
def test_horocycle_flow_invariant(theta, scale):
    """The parabolic flow fixing a horoball centre preserves its horocycle."""
    v = ideal_point(theta, scale)
    p = np.array([0.0, 0.0, 1.0])
    level = bilinear(p, v)
    q = act(flow(v, 0.7), p)
    assert bilinear(q, v) == pytest.approx(level, rel=1e-9)
