"""Command-line interface.

Exit codes: 0 success, 2 a mathematical verdict failed, 3 bad input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from crownstrip import __version__
from crownstrip import io as cio
from crownstrip import words as W
from crownstrip.arc_complex import tile_types, validate_pruned_point
from crownstrip.errors import DisjointnessFailure, GeometryError, NotFilling
from crownstrip.margulis import admissible_check, build_decorated_spacetime, margulis_invariant
from crownstrip.render import render_klein
from crownstrip.strip import (
    dl_closed_analytic,
    dl_closed_fd,
    dl_horoball_analytic,
    dl_horoball_fd,
    equivariance_residual,
    tile_map,
)
from crownstrip.surface import enumerate_closed_geodesics, enumerate_horoball_connections

EXIT_OK = 0
EXIT_VERDICT = 2
EXIT_INPUT = 3

log = logging.getLogger("crownstrip")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be strictly positive")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _config(args: argparse.Namespace) -> dict:
    keys = ("command", "action", "surface", "arcs", "tangent", "word_length", "max_length",
            "epsilon", "dt", "seed", "threads")
    cfg = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    cfg["version"] = __version__
    return cfg


def _emit(doc: dict, args: argparse.Namespace) -> None:
    text = cio.write_json(doc, args.output)
    if args.output is None:
        sys.stdout.write(text)


def _surface(args):
    return cio.load_surface(args.surface)


# ----------------------------------------------------------------------------
# commands


def cmd_surface(args) -> int:
    s = _surface(args)
    doc = cio.surface_document(s)
    if args.action == "audit":
        _emit({"surface": s.name, "audit": doc["audit"], "ok": not doc["audit"]}, args)
    else:
        _emit(doc, args)
    return EXIT_OK


def cmd_arcs(args) -> int:
    s = _surface(args)
    x = cio.load_arcs(args.arcs)
    report = validate_pruned_point(s, x)
    doc = {"surface": s.name, **report.to_dict(), "config": _config(args)}
    if report.ok:
        doc["tile_types"] = {str(k): v for k, v in sorted(tile_types(tile_map(s, x).tiling).items())}
    _emit(doc, args)
    return EXIT_OK if report.ok else EXIT_VERDICT


def cmd_strip(args) -> int:
    s = _surface(args)
    x = cio.load_arcs(args.arcs)
    if x.was_normalized:
        log.warning("weights summed to %r; normalized to one", x.normalized_from)
    tm = tile_map(s, x)
    doc = {
        **cio.tangent_document(s, tm.tangent()),
        "tile_map": {str(p.id): [float(c) for c in tm.values[p.id]] for p in tm.tiling.pieces},
        "tiles": [{"pieces": t.pieces, "spike_corners": t.spike_corners, "internal_sides": t.internal_sides}
                  for t in tm.tiling.tiles],
        "self_check": {"equivariance_residual": equivariance_residual(tm)},
        "config": _config(args),
    }
    _emit(doc, args)
    return EXIT_OK


def cmd_admissible(args) -> int:
    s = _surface(args)
    t = cio.load_tangent(args.tangent, s)
    report = admissible_check(s, t, args.word_length, args.max_length, args.epsilon)
    _emit({"surface": s.name, **report.to_dict(), "config": _config(args)}, args)
    return EXIT_OK if report.admissible else EXIT_VERDICT


def cmd_margulis(args) -> int:
    s = _surface(args)
    x = cio.load_arcs(args.arcs)
    try:
        dst = build_decorated_spacetime(s, x, args.word_length)
    except DisjointnessFailure as exc:
        _emit({"surface": s.name, "ok": False, "failures": exc.witnesses, "config": _config(args)}, args)
        return EXIT_VERDICT
    _emit({"surface": s.name, "ok": True, **dst.to_dict(), "config": _config(args)}, args)
    return EXIT_OK


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def cmd_verify(args) -> int:
    s = _surface(args)
    x = cio.load_arcs(args.arcs)
    tm = tile_map(s, x)
    t = tm.tangent()
    rows = []
    if s.rank:
        for g in enumerate_closed_geodesics(s, args.word_length):
            analytic, _ = dl_closed_analytic(tm, g.word)
            rows.append({"kind": "closed", "word": W.to_str(g.word), "length": g.length, "analytic": analytic,
                         "margulis": margulis_invariant(t.cocycle, g.word),
                         "fd": dl_closed_fd(t, g.word, args.dt)})
    if s.spike_count:
        for c in enumerate_horoball_connections(s, args.word_length, args.max_length):
            rows.append({"kind": "horoball", "word": f"{c.spike_from}->{c.spike_to} [{W.to_str(c.word)}]",
                         "length": c.length, "analytic": dl_horoball_analytic(tm, c),
                         "fd": dl_horoball_fd(s, t, c, args.dt)})
    worst = max((_relative(r["analytic"], r["fd"]) for r in rows), default=0.0)
    ok = worst < args.tolerance
    _emit({"surface": s.name, "rows": rows, "max_relative_error": worst, "ok": ok, "config": _config(args)}, args)
    return EXIT_OK if ok else EXIT_VERDICT


def cmd_render(args) -> int:
    s = _surface(args)
    arcs = cio.load_arcs(args.arcs).arcs if args.arcs else ()
    svg = render_klein(s, arcs)
    if args.output:
        Path(args.output).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crownstrip", description="Strip deformations of decorated crowned surfaces.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0, help="recorded in every output")
    parser.add_argument("--threads", type=_positive_int, default=1, help="worker count (computation is serial)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, arcs=False, tangent=False):
        p.add_argument("surface", help="surface document or construction spec (JSON)")
        if arcs:
            p.add_argument("arcs", help="weighted arc family (JSON)")
        if tangent:
            p.add_argument("tangent", help="tangent vector (JSON)")
        p.add_argument("-o", "--output", help="output path (default: stdout)")

    def cutoffs(p):
        p.add_argument("--word-length", type=_positive_int, default=4)
        p.add_argument("--max-length", type=_positive_float, default=6.0)

    surf = sub.add_parser("surface", help="build or audit a surface")
    surf_sub = surf.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("build", "audit"):
        common(surf_sub.add_parser(name))
    surf.set_defaults(func=cmd_surface)

    arcs = sub.add_parser("arcs", help="validate a weighted arc family")
    arcs_sub = arcs.add_subparsers(dest="action", required=True, parser_class=_Parser)
    common(arcs_sub.add_parser("check"), arcs=True)
    arcs.set_defaults(func=cmd_arcs)

    strip = sub.add_parser("strip", help="infinitesimal strip deformation")
    strip_sub = strip.add_subparsers(dest="action", required=True, parser_class=_Parser)
    common(strip_sub.add_parser("map"), arcs=True)
    strip.set_defaults(func=cmd_strip)

    adm = sub.add_parser("admissible", help="admissibility up to cutoffs")
    adm_sub = adm.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = adm_sub.add_parser("check")
    common(p, tangent=True)
    cutoffs(p)
    p.add_argument("--epsilon", type=_positive_float, default=1e-6)
    adm.set_defaults(func=cmd_admissible)

    mar = sub.add_parser("margulis", help="decorated Margulis spacetime")
    mar_sub = mar.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = mar_sub.add_parser("fd")
    common(p, arcs=True)
    p.add_argument("--word-length", type=_positive_int, default=2)
    mar.set_defaults(func=cmd_margulis)

    ver = sub.add_parser("verify", help="analytic against finite-difference derivatives")
    ver_sub = ver.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ver_sub.add_parser("derivatives")
    common(p, arcs=True)
    cutoffs(p)
    p.add_argument("--dt", type=_positive_float, default=1e-4)
    p.add_argument("--tolerance", type=_positive_float, default=1e-6)
    ver.set_defaults(func=cmd_verify)

    ren = sub.add_parser("render", help="SVG drawing in the Klein disk")
    ren_sub = ren.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ren_sub.add_parser("klein")
    common(p)
    p.add_argument("--arcs", help="optional weighted arc family (JSON)")
    ren.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except NotFilling as exc:
        print(f"error: {exc}", file=sys.stderr)
        for w in exc.witnesses:
            print(f"  {w}", file=sys.stderr)
        return EXIT_INPUT
    except (GeometryError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
