"""Shared fixtures: the bundled surfaces, their arc families and tile maps."""

from __future__ import annotations

import functools

import pytest
from hypothesis import settings

from crownstrip import io as cio
from crownstrip.strip import tile_map
from crownstrip.surface import bundled_surfaces

settings.register_profile("crownstrip", max_examples=60, deadline=None)
settings.load_profile("crownstrip")

SURFACE_NAMES = ("ideal_triangle", "ideal_square", "crown_q1", "spiked_annulus_1_1", "spiked_moebius_q1")

# acceptance verdicts, filled by tests/test_acceptance.py
CRITERIA: dict[int, tuple[str, str]] = {}


@functools.lru_cache(maxsize=None)
def surface(name: str):
    return bundled_surfaces()[name]


@functools.lru_cache(maxsize=None)
def family(name: str):
    return cio.load_arcs(cio.bundled_path(f"{name}.arcs.json"))


@functools.lru_cache(maxsize=None)
def bundled_tile_map(name: str):
    return tile_map(surface(name), family(name))


@pytest.fixture(params=SURFACE_NAMES)
def name(request) -> str:
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        verdict, title = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d}  {verdict}  {title}")
