"""JSON file formats for complexes, presentations, and diagrams.

save followed by load returns a structurally equal object. Parse failures
carry the offending field; unknown format tags raise SchemaVersionError.
"""

from __future__ import annotations

import json
import os

from .complex_core import (POLYGONAL, SIMPLICIAL, Complex, Presentation)
from .diagram import DiagramCell, DiscDiagram
from .errors import ParseError, SchemaVersionError

COMPLEX_FORMAT = "npc-complex-v1"
PRESENTATION_FORMAT = "npc-presentation-v1"
DIAGRAM_FORMAT = "npc-diagram-v1"


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    except OSError as exc:
        raise ParseError(f"{path}: {exc}")


def _expect(data, field, types, path):
    if field not in data:
        raise ParseError(f"{path}: missing field {field!r}")
    if not isinstance(data[field], types):
        raise ParseError(f"{path}: field {field!r} has wrong type")
    return data[field]


def _int_list(items, field, path, depth=1):
    try:
        if depth == 1:
            return [int(x) for x in items]
        return [_int_list(x, field, path, depth - 1) for x in items]
    except (TypeError, ValueError):
        raise ParseError(f"{path}: field {field!r} must contain integers")


def detect_format(path) -> str:
    data = _read_json(path)
    return data.get("format", "")


def load_complex(path) -> Complex:
    data = _read_json(path)
    fmt = data.get("format")
    if fmt != COMPLEX_FORMAT:
        raise SchemaVersionError(f"{path}: unsupported format {fmt!r}")
    kind = _expect(data, "kind", str, path)
    vertices = _int_list(_expect(data, "vertices", list, path), "vertices", path)
    edges = _int_list(_expect(data, "edges", list, path), "edges", path, depth=2)
    for e in edges:
        if len(e) != 2:
            raise ParseError(f"{path}: edge {e} must be a pair")
    if kind == SIMPLICIAL:
        tris = _int_list(data.get("triangles", []), "triangles", path, depth=2)
        for t in tris:
            if len(t) != 3:
                raise ParseError(f"{path}: triangle {t} must have 3 vertices")
        return Complex.simplicial(vertices, edges, tris)
    if kind == POLYGONAL:
        polys = _int_list(data.get("polygons", []), "polygons", path, depth=2)
        for p in polys:
            if len(p) < 3:
                raise ParseError(f"{path}: polygon {p} needs at least 3 vertices")
        return Complex.polygonal(vertices, edges, polys)
    raise ParseError(f"{path}: unknown kind {kind!r}")


def save_complex(cx: Complex, path):
    data = {
        "format": COMPLEX_FORMAT,
        "kind": cx.kind,
        "vertices": list(cx.vertices),
        "edges": [list(e) for e in cx.edges],
    }
    if cx.kind == SIMPLICIAL:
        data["triangles"] = [list(t) for t in cx.cells]
    else:
        data["polygons"] = [list(p) for p in cx.cells]
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_presentation(path) -> Presentation:
    data = _read_json(path)
    fmt = data.get("format")
    if fmt != PRESENTATION_FORMAT:
        raise SchemaVersionError(f"{path}: unsupported format {fmt!r}")
    gens = _expect(data, "generators", list, path)
    rels = _expect(data, "relators", list, path)
    try:
        return Presentation.create([str(g) for g in gens], [str(r) for r in rels])
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}")


def save_presentation(p: Presentation, path):
    data = {
        "format": PRESENTATION_FORMAT,
        "generators": list(p.generators),
        "relators": list(p.relators),
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_diagram(path, target: Complex | None = None) -> DiscDiagram:
    data = _read_json(path)
    fmt = data.get("format")
    if fmt != DIAGRAM_FORMAT:
        raise SchemaVersionError(f"{path}: unsupported format {fmt!r}")
    if target is None:
        ref = _expect(data, "target", str, path)
        ref_path = ref if os.path.isabs(ref) else os.path.join(os.path.dirname(path), ref)
        target = load_complex(ref_path)
    cells = []
    for i, cd in enumerate(_expect(data, "cells", list, path)):
        if not isinstance(cd, dict):
            raise ParseError(f"{path}: cell {i} must be an object")
        walk = tuple(_int_list(_expect(cd, "walk", list, path), "walk", path))
        cells.append(DiagramCell(walk, int(cd.get("target_cell", -1)),
                                 int(cd.get("offset", 0)), bool(cd.get("reflected", False))))
    boundary = tuple(_int_list(_expect(data, "boundary", list, path), "boundary", path))
    vmap_raw = data.get("vertex_map", {})
    if not isinstance(vmap_raw, dict):
        raise ParseError(f"{path}: field 'vertex_map' must be an object")
    try:
        vmap = {int(k): int(v) for k, v in vmap_raw.items()}
    except (TypeError, ValueError):
        raise ParseError(f"{path}: vertex_map keys and values must be integers")
    return DiscDiagram(target, tuple(cells), boundary, tuple(sorted(vmap.items())))


def save_diagram(d: DiscDiagram, path, target_ref: str):
    data = {
        "format": DIAGRAM_FORMAT,
        "cells": [
            {"walk": list(c.walk), "target_cell": c.target_cell,
             "offset": c.offset, "reflected": c.reflected}
            for c in d.cells
        ],
        "boundary": list(d.boundary),
        "target": target_ref,
        "vertex_map": {str(k): v for k, v in d.vmap_items},
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
