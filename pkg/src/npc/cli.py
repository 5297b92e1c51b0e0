"""Command-line front end: subcommand dispatch and the suite runner.

Every command prints a single JSON object to stdout. Text rendering is a
formatting of that JSON; the JSON is the contract. Exit code 0 means pass,
1 means a failed verdict, 2 means an error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .complex_core import POLYGONAL, SIMPLICIAL, is_flag, validate
from .diagram import (area, classify, gauss_bonnet_audit, is_reduced,
                      max_degree, multiplicity, reduced_diagram_search,
                      validate_diagram, verify_tight)
from .errors import ConfigError, NpcError, Unclassifiable
from .metric import (OrientedGeodesic, delta_estimate, distance,
                     enumerate_geodesics, interval)
from .report import CheckReport, jsonable
from .sap import sap_probe, tight_hexagon_probe, verify_sap_bound
from .smallcancel import (check_c16_complex, check_c16_presentation,
                          dehn_reduce, enumerate_pieces_complex,
                          enumerate_pieces_presentation, is_trivial)
from .storage import (COMPLEX_FORMAT, PRESENTATION_FORMAT, detect_format,
                      load_complex, load_diagram, load_presentation,
                      save_complex, save_diagram)
from .wsys import (check_locally, check_systolic, check_weak_modularity,
                   check_weakly_systolic, fill_bigon, fill_triangle)
from . import generators


def _emit(payload, out=None) -> None:
    text = json.dumps(jsonable(payload), indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _parse_vertex_list(text):
    return [int(x) for x in text.replace(" ", "").split(",") if x != ""]


def _cmd_gen(args):
    name = args.generator
    if name == "equilateral-disc":
        cx = generators.gen_equilateral_disc(args.r)
    elif name == "tree":
        cx = generators.gen_tree(args.branching, args.depth)
    elif name == "polygon":
        cx = generators.gen_polygon(args.k)
    elif name == "parallelogram":
        cx = generators.gen_flat_parallelogram(args.p, args.q)
    elif name == "join-lines":
        cx = generators.gen_join_lines(args.r)
    elif name == "cayley-ball":
        pres = load_presentation(args.presentation)
        cx = generators.gen_cayley_ball(pres, args.r)
    elif name == "ladder":
        diagram, target = generators.gen_ladder_diagram(
            [int(x) for x in args.lengths.split(",")])
        save_complex(target, args.output + ".target.json")
        save_diagram(diagram, args.output,
                     os.path.basename(args.output) + ".target.json")
        _emit({"op": "gen", "generator": name, "output": args.output})
        return 0
    else:
        raise ConfigError(f"unknown generator {name!r}")
    save_complex(cx, args.output)
    _emit({"op": "gen", "generator": name, "output": args.output,
           "vertices": len(cx.vertices), "edges": len(cx.edges),
           "cells": len(cx.cells)})
    return 0


def _cmd_distance(args):
    cx = load_complex(args.file)
    d = distance(cx, args.u, args.v)
    _emit({"op": "distance", "u": args.u, "v": args.v, "distance": d})
    return 0


def _cmd_interval(args):
    cx = load_complex(args.file)
    iv = interval(cx, args.u, args.v)
    _emit({"op": "interval", "u": args.u, "v": args.v, "distance": iv.distance,
           "size": len(iv), "vertices": list(iv.vertices)})
    return 0


def _cmd_geodesics(args):
    cx = load_complex(args.file)
    gs = enumerate_geodesics(cx, args.u, args.v, cap=args.cap)
    _emit({"op": "geodesics", "u": args.u, "v": args.v, "count": len(gs),
           "geodesics": [list(g.vertices) for g in gs]})
    return 0


def _cmd_delta(args):
    cx = load_complex(args.file)
    est = delta_estimate(cx, method=args.method)
    _emit({"op": "delta", "method": est.method, "value": est.value,
           "witness": jsonable(est.witness)})
    return 0


def _report_exit(rep) -> int:
    payload = rep.as_dict() if hasattr(rep, "as_dict") else rep
    _emit(payload)
    return 0 if payload.get("verdict") == "pass" else 1


def _cmd_check_wsys(args):
    cx = load_complex(args.file)
    rep = check_locally(cx) if args.local else check_weakly_systolic(cx)
    return _report_exit(rep)


def _cmd_check_systolic(args):
    return _report_exit(check_systolic(load_complex(args.file)))


def _cmd_check_weak_modularity(args):
    return _report_exit(check_weak_modularity(load_complex(args.file)))


def _cmd_fill_bigon(args):
    cx = load_complex(args.file)
    g1 = OrientedGeodesic.create(cx, _parse_vertex_list(args.g1))
    g2 = OrientedGeodesic.create(cx, _parse_vertex_list(args.g2))
    d = fill_bigon(cx, g1, g2, backend=args.backend)
    if args.output:
        save_diagram(d, args.output, os.path.basename(args.file))
    _emit({"op": "fill-bigon", "area": area(d), "multiplicity": multiplicity(d),
           "max_degree": max_degree(d), "valid": validate_diagram(d).verdict})
    return 0


def _cmd_fill_triangle(args):
    cx = load_complex(args.file)
    d = fill_triangle(cx, args.u, args.v, args.w)
    if args.output:
        save_diagram(d, args.output, os.path.basename(args.file))
    _emit({"op": "fill-triangle", "area": area(d), "multiplicity": multiplicity(d),
           "max_degree": max_degree(d), "valid": validate_diagram(d).verdict})
    return 0


def _cmd_pieces(args):
    fmt = detect_format(args.file)
    if fmt == PRESENTATION_FORMAT:
        pieces = enumerate_pieces_presentation(load_presentation(args.file))
    else:
        pieces = enumerate_pieces_complex(load_complex(args.file))
    _emit({"op": "pieces", "count": len(pieces),
           "max_length": max((p.length for p in pieces), default=0),
           "pieces": [p.as_dict() for p in pieces]})
    return 0


def _cmd_check_c16(args):
    fmt = detect_format(args.file)
    if fmt == PRESENTATION_FORMAT:
        rep = check_c16_presentation(load_presentation(args.file))
    elif fmt == COMPLEX_FORMAT:
        rep = check_c16_complex(load_complex(args.file))
    else:
        raise ConfigError(f"cannot auto-detect schema of {args.file}")
    payload = rep.as_dict()
    _emit(payload)
    return 0 if rep.verdict else 1


def _cmd_dehn(args):
    pres = load_presentation(args.file)
    reduced = dehn_reduce(pres, args.word)
    _emit({"op": "dehn", "word": args.word, "reduced": reduced,
           "trivial": reduced == ""})
    return 0


def _cmd_diagram(args):
    d = load_diagram(args.file)
    if args.action == "validate":
        return _report_exit(validate_diagram(d))
    if args.action == "classify":
        try:
            cls = classify(d)
            _emit({"op": "classify", "kind": cls.kind, "detail": jsonable(cls.detail)})
            return 0
        except Unclassifiable as exc:
            _emit({"op": "classify", "kind": "unclassifiable", "message": str(exc)})
            return 1
    if args.action == "gauss-bonnet":
        table = gauss_bonnet_audit(d)
        _emit({"op": "gauss-bonnet", "total": table.total,
               "defects": [list(x) for x in table.defects],
               "verdict": "pass" if table.total == 6 else "fail"})
        return 0 if table.total == 6 else 1
    if args.action == "is-reduced":
        return _report_exit(is_reduced(d))
    raise ConfigError(f"unknown diagram action {args.action!r}")


def _cmd_fill(args):
    cx = load_complex(args.file)
    loop = _parse_vertex_list(args.loop)
    d = reduced_diagram_search(cx, loop, args.cap)
    if args.output:
        save_diagram(d, args.output, os.path.basename(args.file))
    _emit({"op": "fill", "area": area(d), "multiplicity": multiplicity(d),
           "max_degree": max_degree(d), "valid": validate_diagram(d).verdict})
    return 0


def _cmd_sap(args):
    cx = load_complex(args.file)
    probe = sap_probe(cx, args.n, radius_cap=args.radius, geodesic_cap=args.cap)
    payload = {"op": "sap", **probe.as_dict()}
    if args.N is not None:
        rep = verify_sap_bound(probe, args.N)
        payload["bound_check"] = rep.as_dict()
    _emit(payload, out=args.json)
    return 0


def _cmd_tight_hex(args):
    cx = load_complex(args.file)
    spec = {"exhaustive": args.exhaustive} if args.exhaustive else \
        {"samples": args.samples, "seed": args.seed}
    rep = tight_hexagon_probe(cx, args.N, spec)
    return _report_exit(rep)


SUITE_CHECKS = {
    "validate": lambda path, params: validate(load_complex(path)),
    "is-flag": lambda path, params: is_flag(load_complex(path)),
    "check-wsys": lambda path, params: check_weakly_systolic(load_complex(path)),
    "check-wsys-local": lambda path, params: check_locally(load_complex(path)),
    "check-systolic": lambda path, params: check_systolic(load_complex(path)),
    "check-weak-modularity":
        lambda path, params: check_weak_modularity(load_complex(path)),
    "check-c16": lambda path, params: (
        check_c16_presentation(load_presentation(path))
        if detect_format(path) == PRESENTATION_FORMAT
        else check_c16_complex(load_complex(path))),
    "validate-diagram": lambda path, params: validate_diagram(load_diagram(path)),
    "is-reduced": lambda path, params: is_reduced(load_diagram(path)),
    "gauss-bonnet": lambda path, params: _gb_check(path),
    "tight-hex": lambda path, params: tight_hexagon_probe(
        load_complex(path), params.get("N", 14),
        {"samples": params.get("samples", 50), "seed": params.get("seed", 0)}),
}


def _gb_check(path):
    table = gauss_bonnet_audit(load_diagram(path))
    return CheckReport("gauss_bonnet", table.total == 6,
                       stats={"total": table.total})


def run_suite(config_path: str) -> dict:
    """Execute all configured checks on a bounded worker pool."""
    try:
        with open(config_path) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{config_path}: {exc}")
    if config.get("format") != "npc-suite-v1":
        raise ConfigError(f"{config_path}: unsupported format")
    checks = config.get("checks", [])
    base = os.path.dirname(os.path.abspath(config_path))
    jobs = []
    for i, chk in enumerate(checks):
        name = chk.get("name")
        if name not in SUITE_CHECKS:
            raise ConfigError(f"unknown check name {name!r}")
        target = chk.get("target")
        path = target if os.path.isabs(target) else os.path.join(base, target)
        if not os.path.exists(path):
            raise ConfigError(f"missing target file {target!r}")
        jobs.append((i, name, path, chk.get("params", {})))

    def run_one(job):
        i, name, path, params = job
        try:
            rep = SUITE_CHECKS[name](path, params)
            payload = rep.as_dict()
        except NpcError as exc:
            payload = {"check": name, "verdict": "fail",
                       "witness": {"error": type(exc).__name__, "message": str(exc)},
                       "stats": {}}
        payload["target"] = os.path.basename(path)
        return i, payload

    threads = max(1, int(os.environ.get("NPC_THREADS", os.cpu_count() or 1)))
    started = time.time()
    if threads == 1:
        results = [run_one(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, jobs))
    results.sort(key=lambda r: r[0])
    ordered = [payload for _, payload in results]
    verdict = all(p.get("verdict") == "pass" for p in ordered)
    return {
        "format": "npc-suite-report-v1",
        "verdict": "pass" if verdict else "fail",
        "checks": ordered,
        "version": __version__,
        "wall_time": round(time.time() - started, 6),
    }


def _cmd_suite(args):
    report = run_suite(args.config)
    _emit(report, out=args.output)
    return 0 if report["verdict"] == "pass" else 1


def _cmd_version(args):
    _emit({"op": "version", "version": __version__})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npc",
        description="combinatorial non-positive curvature toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a fixture complex")
    p.add_argument("generator", choices=[
        "equilateral-disc", "tree", "polygon", "parallelogram", "join-lines",
        "cayley-ball", "ladder"])
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--presentation")
    p.add_argument("--lengths", default="7,7,7")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("distance")
    p.add_argument("file")
    p.add_argument("u", type=int)
    p.add_argument("v", type=int)
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("interval")
    p.add_argument("file")
    p.add_argument("u", type=int)
    p.add_argument("v", type=int)
    p.set_defaults(func=_cmd_interval)

    p = sub.add_parser("geodesics")
    p.add_argument("file")
    p.add_argument("u", type=int)
    p.add_argument("v", type=int)
    p.add_argument("--cap", type=int, default=10 ** 6)
    p.set_defaults(func=_cmd_geodesics)

    p = sub.add_parser("delta")
    p.add_argument("file")
    p.add_argument("--method", choices=["slim", "4pt"], default="slim")
    p.set_defaults(func=_cmd_delta)

    p = sub.add_parser("check-wsys")
    p.add_argument("file")
    p.add_argument("--local", action="store_true")
    p.set_defaults(func=_cmd_check_wsys)

    p = sub.add_parser("check-systolic")
    p.add_argument("file")
    p.set_defaults(func=_cmd_check_systolic)

    p = sub.add_parser("check-weak-modularity")
    p.add_argument("file")
    p.set_defaults(func=_cmd_check_weak_modularity)

    p = sub.add_parser("fill-bigon")
    p.add_argument("file")
    p.add_argument("--g1", required=True)
    p.add_argument("--g2", required=True)
    p.add_argument("--backend", choices=["structured", "oracle"],
                   default="structured")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_fill_bigon)

    p = sub.add_parser("fill-triangle")
    p.add_argument("file")
    p.add_argument("u", type=int)
    p.add_argument("v", type=int)
    p.add_argument("w", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_fill_triangle)

    p = sub.add_parser("pieces")
    p.add_argument("file")
    p.set_defaults(func=_cmd_pieces)

    p = sub.add_parser("check-c16")
    p.add_argument("file")
    p.set_defaults(func=_cmd_check_c16)

    p = sub.add_parser("dehn")
    p.add_argument("file")
    p.add_argument("word")
    p.set_defaults(func=_cmd_dehn)

    p = sub.add_parser("diagram")
    p.add_argument("action", choices=["validate", "classify", "gauss-bonnet",
                                      "is-reduced"])
    p.add_argument("file")
    p.set_defaults(func=_cmd_diagram)

    p = sub.add_parser("fill")
    p.add_argument("file")
    p.add_argument("--loop", required=True)
    p.add_argument("--cap", type=int, default=16)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_fill)

    p = sub.add_parser("sap")
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--cap", type=int, default=10 ** 5)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--json", default=None)
    p.set_defaults(func=_cmd_sap)

    p = sub.add_parser("tight-hex")
    p.add_argument("file")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", type=int, default=None)
    p.set_defaults(func=_cmd_tight_hex)

    p = sub.add_parser("suite")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_suite)

    p = sub.add_parser("version")
    p.set_defaults(func=_cmd_version)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NpcError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)})
        return 2


if __name__ == "__main__":
    sys.exit(main())
