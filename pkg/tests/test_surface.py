"""Decorated crowned surfaces: constructors, audits, enumeration, dimensions."""

import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SURFACE_NAMES, surface
from crownstrip import surface as S
from crownstrip.errors import BadOrder, BadSpikeOrder, InvariantViolation, NonPositiveLength, NonPositiveScale, TooFewPoints
from crownstrip.hyperbolic import ideal_point
from crownstrip.isometry import Isometry, exp_killing


def test_bundled_surfaces_pass_audit(name):
    """Every bundled surface is sound."""
    assert S.audit(surface(name)) == []


def test_bundled_topology():
    """Rank, spikes and orientability of the five examples."""
    shape = {n: (surface(n).rank, surface(n).spike_count, surface(n).orientable) for n in SURFACE_NAMES}
    assert shape == {
        "ideal_triangle": (0, 3, True),
        "ideal_square": (0, 4, True),
        "crown_q1": (1, 1, True),
        "spiked_annulus_1_1": (1, 2, True),
        "spiked_moebius_q1": (1, 1, False),
    }


def test_deformation_dimensions():
    """Formula values, including the three-holed sphere with two spikes."""
    assert S.deformation_dim_formula(True, 0, 3, 2) == 7
    assert S.deformation_dim_formula(False, 1, 1, 1) == 2
    dims = {n: S.deformation_dim(surface(n)) for n in SURFACE_NAMES}
    assert dims == {"ideal_triangle": 3, "ideal_square": 5, "crown_q1": 2,
                    "spiked_annulus_1_1": 4, "spiked_moebius_q1": 2}


def test_crown_closed_geodesics():
    """The crown's classes are the powers of its generator with lengths 2k."""
    found = S.enumerate_closed_geodesics(surface("crown_q1"), 3)
    assert [g.word for g in found] == [(1,), (1, 1), (1, 1, 1)]
    np.testing.assert_allclose([g.length for g in found], [2.0, 4.0, 6.0], atol=1e-12)
    with pytest.raises(ValueError):
        S.enumerate_closed_geodesics(surface("crown_q1"), 0)


def test_square_connections():
    """Identity words on the square give four sides of length -ln 2 and two diagonals of length 0."""
    found = S.enumerate_horoball_connections(surface("ideal_square"), 0, 50.0)
    lengths = sorted(round(c.length, 12) for c in found)
    assert len(found) == 6
    np.testing.assert_allclose(lengths, [-np.log(2)] * 4 + [0.0] * 2, atol=1e-12)


@pytest.mark.parametrize("scale", [np.e, 0.3, 5.0])
def test_rescaling_shifts_lengths(scale):
    """Scaling every decoration by lambda adds 2 ln lambda to every connection."""
    s = surface("spiked_annulus_1_1")
    before = {(c.spike_from, c.spike_to, c.word): c.length for c in S.enumerate_horoball_connections(s, 2, 50.0)}
    after = S.enumerate_horoball_connections(S.rescale_decorations(s, scale), 2, 80.0)
    matched = 0
    for c in after:
        key = (c.spike_from, c.spike_to, c.word)
        if key in before:
            assert c.length - before[key] == pytest.approx(2 * np.log(scale), abs=1e-12)
            matched += 1
    assert matched == len(before)
    with pytest.raises(NonPositiveScale):
        S.rescale_decorations(s, 0.0)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_conjugation_preserves_lengths(a, b, c):
    """Conjugating the whole surface leaves every length unchanged."""
    s = surface("spiked_annulus_1_1")
    t = S.conjugate(s, exp_killing(np.array([a, b, c]), 1.0))
    for g, h in zip(S.enumerate_closed_geodesics(s, 2), S.enumerate_closed_geodesics(t, 2)):
        assert h.length == pytest.approx(g.length, abs=1e-9)
    for g, h in zip(S.enumerate_horoball_connections(s, 1, 20.0), S.enumerate_horoball_connections(t, 1, 20.0)):
        assert h.length == pytest.approx(g.length, abs=1e-9)


def test_json_round_trip(name):
    """Surfaces survive serialization exactly."""
    s = surface(name)
    text = json.dumps(S.to_dict(s), sort_keys=True)
    t = S.from_dict(json.loads(text))
    assert json.dumps(S.to_dict(t), sort_keys=True) == text


def test_from_dict_rejects_broken_surface():
    """A parabolic generator fails the audit on load."""
    d = S.to_dict(surface("crown_q1"))
    d["generators"][0] = [[1.0, 1.0], [0.0, 1.0]]
    with pytest.raises(InvariantViolation):
        S.from_dict(d)


def test_audit_reports_parabolic_generator():
    s = dataclasses.replace(surface("crown_q1"), generators=(Isometry.from_matrix([[1.0, 1.0], [0.0, 1.0]]),))
    assert any("Parabolic" in p for p in S.audit(s))


def test_polygon_constructor_errors():
    with pytest.raises(TooFewPoints):
        S.build_ideal_polygon([ideal_point(0.0), ideal_point(1.0)])
    with pytest.raises(BadOrder):
        S.build_ideal_polygon([ideal_point(0.0), ideal_point(2.0), ideal_point(1.0)])


def test_crown_constructor_errors():
    with pytest.raises(NonPositiveLength):
        S.build_crown(1, -1.0)
    with pytest.raises(BadSpikeOrder):
        S.build_crown(2, 2.0, [0.5])


@pytest.mark.parametrize("q", [3, 5, 7])
def test_regular_polygon_dimension(q):
    """A decorated ideal q-gon has deformation dimension 2q - 3."""
    s = S.regular_ideal_polygon(q)
    assert S.audit(s) == []
    assert S.deformation_dim(s) == 2 * q - 3
