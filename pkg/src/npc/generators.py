"""Deterministic fixture complexes used across the test corpus.

Same parameters always give byte-identical structures: vertex ids are
assigned by sorting the underlying coordinate or word representations.
"""

from __future__ import annotations

from collections import deque

from .complex_core import Complex, Presentation, canonical_cycle
from .diagram import DiscDiagram, build_diagram
from .errors import InvalidSpec, NotC16, NotSimplicial
from .smallcancel import (check_c16_presentation, cyclic_shifts, free_reduce,
                          invert_word, is_trivial)


def _hex_norm(x: int, y: int) -> int:
    return (abs(x) + abs(y) + abs(x + y)) // 2


_HEX_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def gen_equilateral_disc(r: int) -> Complex:
    """Radius-r combinatorial ball in the equilateral triangulation."""
    if r < 0:
        raise InvalidSpec("radius must be non-negative")
    coords = sorted((x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)
                    if _hex_norm(x, y) <= r)
    ids = {c: i for i, c in enumerate(coords)}
    edges = []
    for (x, y) in coords:
        for dx, dy in _HEX_STEPS:
            other = (x + dx, y + dy)
            if other in ids and ids[other] > ids[(x, y)]:
                edges.append((ids[(x, y)], ids[other]))
    triangles = []
    for x in range(-r - 1, r + 1):
        for y in range(-r - 1, r + 1):
            for tri in (((x, y), (x + 1, y), (x, y + 1)),
                        ((x + 1, y), (x, y + 1), (x + 1, y + 1))):
                if all(c in ids for c in tri):
                    triangles.append(tuple(ids[c] for c in tri))
    return Complex.simplicial(ids.values(), edges, triangles)


def equilateral_coords(r: int) -> dict:
    """Map from vertex id of gen_equilateral_disc(r) back to lattice coords."""
    coords = sorted((x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)
                    if _hex_norm(x, y) <= r)
    return {i: c for i, c in enumerate(coords)}


def gen_flat_parallelogram(p: int, q: int) -> Complex:
    """p x q parallelogram patch of the equilateral triangulation."""
    if p < 1 or q < 1:
        raise InvalidSpec("parallelogram sides must be at least 1")
    coords = sorted((x, y) for x in range(p + 1) for y in range(q + 1))
    ids = {c: i for i, c in enumerate(coords)}
    edges = []
    for (x, y) in coords:
        for dx, dy in _HEX_STEPS:
            other = (x + dx, y + dy)
            if other in ids and ids[other] > ids[(x, y)]:
                edges.append((ids[(x, y)], ids[other]))
    triangles = []
    for (x, y) in coords:
        for tri in (((x, y), (x + 1, y), (x, y + 1)),
                    ((x + 1, y), (x, y + 1), (x + 1, y + 1))):
            if all(c in ids for c in tri):
                triangles.append(tuple(ids[c] for c in tri))
    return Complex.simplicial(ids.values(), edges, triangles)


def gen_tree(branching: int, depth: int) -> Complex:
    if branching < 1 or depth < 0:
        raise InvalidSpec("branching >= 1 and depth >= 0 required")
    edges = []
    count = 1
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for _ in range(branching):
                edges.append((v, count))
                nxt.append(count)
                count += 1
        frontier = nxt
    return Complex.simplicial(range(count), edges)


def gen_polygon(k: int) -> Complex:
    if k < 3:
        raise InvalidSpec("polygon needs at least 3 sides")
    edges = [(i, (i + 1) % k) for i in range(k)]
    return Complex.polygonal(range(k), edges, [tuple(range(k))])


def gen_join_lines(r: int) -> Complex:
    """2-skeleton of the join of two simplicial lines of 2r+1 vertices."""
    if r < 1:
        raise InvalidSpec("join-lines radius must be at least 1")
    m = 2 * r + 1
    line1 = list(range(m))
    line2 = list(range(m, 2 * m))
    edges = [(line1[i], line1[i + 1]) for i in range(m - 1)]
    edges += [(line2[i], line2[i + 1]) for i in range(m - 1)]
    edges += [(a, b) for a in line1 for b in line2]
    triangles = []
    for i in range(m - 1):
        for b in line2:
            triangles.append((line1[i], line1[i + 1], b))
    for j in range(m - 1):
        for a in line1:
            triangles.append((a, line2[j], line2[j + 1]))
    return Complex.simplicial(range(2 * m), edges, triangles)


def genus2_presentation() -> Presentation:
    return Presentation.create(("a", "b", "c", "d"), ("abABcdCD",))


def _abelianization(word: str, gens) -> tuple:
    vec = {g: 0 for g in gens}
    for ch in word:
        if ch.islower():
            vec[ch] += 1
        else:
            vec[ch.lower()] -= 1
    return tuple(vec[g] for g in gens)


def gen_cayley_ball(p: Presentation, r: int) -> Complex:
    """Radius-r Cayley graph ball with fully contained relator polygons.

    Group elements are discovered by BFS; equality of candidate words is
    decided by Dehn's algorithm, so the presentation must pass C'(1/6).
    """
    if not check_c16_presentation(p).verdict:
        raise NotC16("gen_cayley_ball needs a C'(1/6) presentation")
    letters = list(p.generators) + [g.upper() for g in p.generators]
    words = [""]
    level_of = {0: 0}
    buckets = {_abelianization("", p.generators): [0]}

    def lookup(w):
        key = _abelianization(w, p.generators)
        for vid in buckets.get(key, ()):
            if is_trivial(p, free_reduce(w + invert_word(words[vid]))):
                return vid
        return None

    frontier = [0]
    for level in range(1, r + 1):
        nxt = []
        for vid in frontier:
            for ch in letters:
                w = free_reduce(words[vid] + ch)
                known = lookup(w)
                if known is None:
                    new_id = len(words)
                    words.append(w)
                    level_of[new_id] = level
                    buckets.setdefault(
                        _abelianization(w, p.generators), []).append(new_id)
                    nxt.append(new_id)
        frontier = nxt
    edges = set()
    for vid, w in enumerate(words):
        for ch in letters:
            other = lookup(free_reduce(w + ch))
            if other is not None and other != vid:
                edges.add((min(vid, other), max(vid, other)))
            if other == vid:
                raise NotSimplicial(f"generator {ch} fixes element {w!r}")
    # parallel edges cannot arise in this representation, but two letters
    # reaching the same neighbour means a length-2 relation slipped through
    for vid, w in enumerate(words):
        targets = [lookup(free_reduce(w + ch)) for ch in letters]
        hit = [t for t in targets if t is not None]
        if len(hit) != len(set(hit)):
            raise NotSimplicial("two generators give the same edge")
    polygons = set()
    for vid, w in enumerate(words):
        for rel in p.relators:
            cycle = []
            ok = True
            prefix = w
            for ch in rel:
                cur = lookup(free_reduce(prefix))
                if cur is None:
                    ok = False
                    break
                cycle.append(cur)
                prefix = free_reduce(prefix + ch)
            if not ok or len(set(cycle)) != len(cycle):
                continue
            polygons.add(canonical_cycle(tuple(cycle)))
    return Complex.polygonal(range(len(words)), sorted(edges), sorted(polygons))


def gen_ladder_diagram(lengths, gluings=None):
    """Chain of polygons glued along single edges, plus the identity diagram.

    Returns (diagram, target). Gluings, when given, must pair consecutive
    cells only; anything else is rejected as an invalid ladder description.
    """
    sizes = list(lengths)
    if not sizes or any(m < 3 for m in sizes):
        raise InvalidSpec("each ladder cell needs at least 3 sides")
    if gluings is None:
        gluings = [(i, i + 1) for i in range(len(sizes) - 1)]
    for (i, j) in gluings:
        if abs(i - j) != 1 or not (0 <= i < len(sizes)) or not (0 <= j < len(sizes)):
            raise InvalidSpec("ladder cells may share edges consecutively only")
    walks = []
    next_id = 0
    prev_edge = None
    for k, m in enumerate(sizes):
        if prev_edge is None:
            walk = list(range(next_id, next_id + m))
            next_id += m
        else:
            a, b = prev_edge
            fresh = list(range(next_id, next_id + m - 2))
            next_id += m - 2
            walk = [b, a] + fresh
        # the next cell glues along the edge "opposite" the previous one
        half = len(walk) // 2
        prev_edge = (walk[half], walk[(half + 1) % len(walk)])
        walks.append(tuple(walk))
    vertices = range(next_id)
    edges = set()
    for walk in walks:
        m = len(walk)
        for i in range(m):
            a, b = walk[i], walk[(i + 1) % m]
            edges.add((min(a, b), max(a, b)))
    target = Complex.polygonal(vertices, sorted(edges), walks)
    raw = []
    for walk in walks:
        cid = target.cells.index(canonical_cycle(walk))
        raw.append((walk, cid))
    vmap = {v: v for v in vertices}
    diagram = build_diagram(target, raw, vmap)
    return diagram, target
