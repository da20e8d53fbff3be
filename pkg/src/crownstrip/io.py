"""JSON documents for surfaces, arc families, tangent vectors and reports.

Files are written with sorted keys and shortest round-trip float literals,
so reading and rewriting a file reproduces it byte for byte.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from crownstrip import surface as S
from crownstrip.arc_complex import WeightedArcFamily
from crownstrip.errors import MismatchedSurface, ParseError
from crownstrip.hyperbolic import ideal_point
from crownstrip.strip import TangentVector

DATA_PACKAGE = "crownstrip.data"


def _builtin(obj: Any) -> Any:
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False, default=_builtin) + "\n"


def write_json(doc: Any, path: str | Path | None) -> str:
    """Write ``doc`` to ``path`` (or just return the text when ``path`` is None)."""
    text = dumps(doc)
    if path is not None:
        Path(path).write_text(text)
    return text


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def surface_document(s: S.DecoratedSurface) -> dict:
    """Surface JSON with its audit embedded."""
    return {**S.to_dict(s), "audit": S.audit(s)}


def surface_from_spec(spec: dict) -> S.DecoratedSurface:
    """Build a surface from a construction spec or parse a full surface document.

    Construction specs name a ``family``: ``polygon`` (``q`` or ``angles``),
    ``crown`` (``q``, ``translation_length``, ``spike_params``),
    ``spiked_annulus`` (``q1``, ``q2``, ``params``) or ``spiked_moebius``
    (``q``, ``params``).  ``{"bundled": name}`` selects a bundled surface.
    """
    if not isinstance(spec, dict):
        raise ParseError("a surface spec is a JSON object")
    if "domain" in spec:
        return S.from_dict(spec)
    if "bundled" in spec:
        table = S.bundled_surfaces()
        if spec["bundled"] not in table:
            raise ParseError(f"unknown bundled surface {spec['bundled']!r}")
        return table[spec["bundled"]]
    family = spec.get("family")
    name = spec.get("name")
    try:
        if family == "polygon":
            if "angles" in spec:
                return S.build_ideal_polygon([ideal_point(float(a)) for a in spec["angles"]], name or "ideal_polygon")
            return S.regular_ideal_polygon(int(spec["q"]), float(spec.get("offset", 0.0)), name)
        if family == "crown":
            return S.build_crown(int(spec.get("q", 1)), float(spec.get("translation_length", 2.0)),
                                 spec.get("spike_params"), name)
        if family == "spiked_annulus":
            return S.build_spiked_annulus(int(spec.get("q1", 1)), int(spec.get("q2", 1)), spec.get("params"), name)
        if family == "spiked_moebius":
            return S.build_spiked_moebius(int(spec.get("q", 1)), spec.get("params"), name)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed surface spec: {exc}") from exc
    raise ParseError(f"unknown surface family {family!r}")


def load_surface(path: str | Path) -> S.DecoratedSurface:
    return surface_from_spec(read_json(path))


def arcs_document(s: S.DecoratedSurface, x: WeightedArcFamily) -> dict:
    return {"surface": s.name, **x.to_dict()}


def load_arcs(path: str | Path) -> WeightedArcFamily:
    doc = read_json(path)
    try:
        return WeightedArcFamily.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed arc family: {exc}") from exc


def tangent_document(s: S.DecoratedSurface, t: TangentVector) -> dict:
    return {"surface": s.name, **t.to_dict()}


def load_tangent(path: str | Path, s: S.DecoratedSurface) -> TangentVector:
    doc = read_json(path)
    if doc.get("surface") not in (None, s.name):
        raise MismatchedSurface(f"tangent belongs to {doc.get('surface')!r}, not {s.name!r}")
    try:
        return TangentVector.from_dict(doc, s)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed tangent vector: {exc}") from exc


def bundled_path(name: str) -> Path:
    """Path of a bundled data file such as ``ideal_square.json``."""
    return Path(str(resources.files(DATA_PACKAGE) / name))


def bundled_names() -> list[str]:
    return sorted(S.bundled_surfaces())
