"""JSON documents, the command-line interface and SVG rendering."""

import json

import numpy as np
import pytest

from conftest import family, surface
from crownstrip import io as cio
from crownstrip.arc_complex import WeightedArcFamily, edge_arc, spike_arc
from crownstrip.cli import EXIT_INPUT, EXIT_OK, EXIT_VERDICT, main
from crownstrip.errors import MismatchedSurface, ParseError
from crownstrip.render import ARC_COLOURS, horocycle_klein, render_klein
from crownstrip.strip import strip_map
from crownstrip.surface import regular_ideal_polygon


def _run(capsys, *argv):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:
        # argparse rejects bad arguments by exiting
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def crown_files(tmp_path):
    spec = tmp_path / "crown.json"
    spec.write_text(json.dumps({"bundled": "crown_q1"}))
    return spec, cio.bundled_path("crown_q1.arcs.json")


def test_bundled_data_files_match_constructors(name):
    """Shipped surface files reproduce the constructors."""
    doc = cio.read_json(cio.bundled_path(f"{name}.json"))
    assert cio.dumps(cio.surface_document(cio.surface_from_spec(doc))) == cio.dumps(cio.surface_document(surface(name)))


def test_surface_document_round_trip_is_byte_identical(tmp_path, name):
    """Reading and rewriting a surface file reproduces it byte for byte."""
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    cio.write_json(cio.surface_document(surface(name)), first)
    cio.write_json(cio.surface_document(cio.load_surface(first)), second)
    assert first.read_bytes() == second.read_bytes()


def test_construction_specs():
    assert cio.surface_from_spec({"family": "polygon", "q": 5}).spike_count == 5
    assert cio.surface_from_spec({"family": "crown", "q": 2}).spike_count == 2
    assert cio.surface_from_spec({"family": "spiked_moebius", "q": 1}).orientable is False
    with pytest.raises(ParseError):
        cio.surface_from_spec({"family": "torus"})
    with pytest.raises(ParseError):
        cio.surface_from_spec({"bundled": "nowhere"})
    with pytest.raises(ParseError):
        cio.surface_from_spec([1, 2])


def test_read_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        cio.read_json(bad)
    with pytest.raises(ParseError):
        cio.read_json(tmp_path / "missing.json")


def test_tangent_document_checks_surface(tmp_path):
    t = strip_map(surface("crown_q1"), family("crown_q1"))
    path = tmp_path / "t.json"
    cio.write_json(cio.tangent_document(surface("crown_q1"), t), path)
    np.testing.assert_array_equal(cio.load_tangent(path, surface("crown_q1")).as_array(), t.as_array())
    with pytest.raises(MismatchedSurface):
        cio.load_tangent(path, surface("spiked_moebius_q1"))


def test_dumps_handles_numpy_and_rejects_nan():
    assert json.loads(cio.dumps({"a": np.float64(0.5), "b": np.arange(2), "c": np.bool_(True)})) == \
        {"a": 0.5, "b": [0, 1], "c": True}
    with pytest.raises(ValueError):
        cio.dumps({"a": float("nan")})


def test_cli_surface_build_and_audit(capsys, crown_files):
    spec, _ = crown_files
    code, out, _ = _run(capsys, "surface", "build", spec)
    assert code == EXIT_OK and json.loads(out)["name"] == "crown_q1"
    code, out, _ = _run(capsys, "surface", "audit", spec)
    assert code == EXIT_OK and json.loads(out)["ok"] is True


def test_cli_arcs_check(capsys, tmp_path, crown_files):
    spec, arcs = crown_files
    code, out, _ = _run(capsys, "arcs", "check", spec, arcs)
    assert code == EXIT_OK and json.loads(out)["ok"]
    lonely = tmp_path / "lonely.json"
    cio.write_json(WeightedArcFamily.create([spike_arc(3, 0, 0.5)]).to_dict(), lonely)
    code, out, _ = _run(capsys, "arcs", "check", spec, lonely)
    doc = json.loads(out)
    assert code == EXIT_VERDICT and doc["witnesses"] == ["tile 0 has 2 spikes"]


def test_cli_strip_map_warns_on_normalization(capsys, caplog, tmp_path, crown_files):
    spec, _ = crown_files
    arcs = tmp_path / "arcs.json"
    x = family("crown_q1")
    cio.write_json({"arcs": [a.to_dict() for a in x.arcs], "weights": [2.0, 2.0]}, arcs)
    out_path = tmp_path / "tangent.json"
    code, _, _ = _run(capsys, "strip", "map", spec, arcs, "-o", out_path)
    assert code == EXIT_OK
    assert "normalized" in caplog.text
    doc = cio.read_json(out_path)
    assert doc["self_check"]["equivariance_residual"] < 1e-10
    assert doc["config"]["seed"] == 0


def test_cli_admissible(capsys, tmp_path, crown_files):
    spec, arcs = crown_files
    t = strip_map(surface("crown_q1"), family("crown_q1"))
    good, bad = tmp_path / "good.json", tmp_path / "bad.json"
    cio.write_json(cio.tangent_document(surface("crown_q1"), t), good)
    cio.write_json(cio.tangent_document(surface("crown_q1"), -t), bad)
    assert _run(capsys, "admissible", "check", spec, good)[0] == EXIT_OK
    code, out, _ = _run(capsys, "admissible", "check", spec, bad)
    assert code == EXIT_VERDICT and json.loads(out)["witness"] is not None
    assert _run(capsys, "admissible", "check", spec, good, "--epsilon", "0")[0] == EXIT_INPUT


def test_cli_margulis_and_verify(capsys, crown_files):
    spec, arcs = crown_files
    code, out, _ = _run(capsys, "margulis", "fd", spec, arcs)
    assert code == EXIT_OK and json.loads(out)["checks"]["opposite_sign"] == "AllPositive"
    code, out, _ = _run(capsys, "verify", "derivatives", spec, arcs, "--word-length", "3")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["max_relative_error"] < 1e-6 and doc["rows"]


def test_cli_input_errors(capsys, tmp_path, crown_files):
    spec, arcs = crown_files
    assert _run(capsys, "surface", "build", tmp_path / "missing.json")[0] == EXIT_INPUT
    assert _run(capsys, "nonsense")[0] == EXIT_INPUT
    assert _run(capsys, "--threads", "0", "surface", "build", spec)[0] == EXIT_INPUT
    crossing = tmp_path / "crossing.json"
    cio.write_json(WeightedArcFamily.create([edge_arc(0, 0.5, 2, 0.5), edge_arc(1, 0.5, 3, 0.5)]).to_dict(), crossing)
    square = tmp_path / "square.json"
    square.write_text(json.dumps({"bundled": "ideal_square"}))
    assert _run(capsys, "strip", "map", square, crossing)[0] == EXIT_INPUT


def test_cli_not_filling_prints_witnesses(capsys, tmp_path, crown_files):
    spec, _ = crown_files
    lonely = tmp_path / "lonely.json"
    cio.write_json(WeightedArcFamily.create([spike_arc(3, 0, 0.5)]).to_dict(), lonely)
    code, _, err = _run(capsys, "strip", "map", spec, lonely)
    assert code == EXIT_INPUT
    assert "tile 0 has 2 spikes" in err


def test_render_is_deterministic(capsys, tmp_path, crown_files):
    spec, arcs = crown_files
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert _run(capsys, "render", "klein", spec, "--arcs", arcs, "-o", a)[0] == EXIT_OK
    assert _run(capsys, "render", "klein", spec, "--arcs", arcs, "-o", b)[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("<svg")


def test_render_pentagon_chords():
    """A triangulated pentagon shows its boundary, five horoballs and five corner chords."""
    p = regular_ideal_polygon(5)
    arcs = [edge_arc((v - 1) % 5, 0.75, v, 0.25) for v in range(5)]
    svg = render_klein(p, arcs)
    assert svg.count(f'stroke="{ARC_COLOURS[arcs[0].kind]}"') == 5
    assert svg.count("<path") == 5
    assert svg.count('stroke="black" stroke-width="0.008000"') == 5


def test_horocycle_passes_through_centre():
    """The drawn horocycle closes at its centre and stays inside the disk."""
    v = np.array([0.0, 2.0, 2.0])
    pts = horocycle_klein(v)
    np.testing.assert_allclose(pts[-1], [0.0, 1.0])
    assert np.all(np.linalg.norm(pts[:-1], axis=1) < 1.0)
