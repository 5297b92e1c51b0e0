"""Immutable incidence model of finite 2-complexes with a simplicial 1-skeleton.

Two kinds are supported: ``simplicial`` (cells are triangles, stored as sorted
id triples) and ``polygonal`` (cells are boundary walks, stored as canonical
cyclic sequences). All operations treat complexes as read-only values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import KindMismatch, UnknownVertex
from .report import CheckReport

SIMPLICIAL = "simplicial"
POLYGONAL = "polygonal"


def edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


def canonical_cycle(walk: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically least rotation among the walk and its reversal."""
    w = tuple(walk)
    if not w:
        return w
    candidates = []
    for seq in (w, w[::-1]):
        for i in range(len(seq)):
            candidates.append(seq[i:] + seq[:i])
    return min(candidates)


def cycle_edges(walk: Sequence[int]) -> list[tuple[int, int]]:
    return [edge_key(walk[i], walk[(i + 1) % len(walk)]) for i in range(len(walk))]


@dataclass(frozen=True)
class Complex:
    """Finite 2-complex: vertex ids, unordered edges, and 2-cells.

    The constructor normalizes representations but does not reject invalid
    data; ``validate`` reports violations as verdicts so that malformed inputs
    can be inspected.
    """

    kind: str
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    cells: tuple[tuple[int, ...], ...]

    @staticmethod
    def simplicial(vertices: Iterable[int], edges: Iterable[Sequence[int]],
                   triangles: Iterable[Sequence[int]] = ()) -> "Complex":
        return Complex(
            kind=SIMPLICIAL,
            vertices=tuple(sorted(set(vertices))),
            edges=tuple(sorted(edge_key(a, b) for a, b in edges)),
            cells=tuple(sorted(tuple(sorted(t)) for t in triangles)),
        )

    @staticmethod
    def polygonal(vertices: Iterable[int], edges: Iterable[Sequence[int]],
                  polygons: Iterable[Sequence[int]] = ()) -> "Complex":
        return Complex(
            kind=POLYGONAL,
            vertices=tuple(sorted(set(vertices))),
            edges=tuple(sorted(edge_key(a, b) for a, b in edges)),
            cells=tuple(sorted(canonical_cycle(p) for p in polygons)),
        )

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})

    def _cached(self, key, builder):
        cache = self._cache
        if key not in cache:
            cache[key] = builder()
        return cache[key]

    # -- derived views ----------------------------------------------------

    @property
    def vertex_set(self) -> frozenset:
        return self._cached("vset", lambda: frozenset(self.vertices))

    @property
    def edge_set(self) -> frozenset:
        return self._cached("eset", lambda: frozenset(self.edges))

    @property
    def adjacency(self) -> dict:
        def build():
            adj = {v: set() for v in self.vertices}
            for a, b in self.edges:
                if a == b or a not in adj or b not in adj:
                    continue
                adj[a].add(b)
                adj[b].add(a)
            return {v: tuple(sorted(ns)) for v, ns in adj.items()}
        return self._cached("adj", build)

    @property
    def cells_at_vertex(self) -> dict:
        def build():
            at = {v: [] for v in self.vertices}
            for i, cell in enumerate(self.cells):
                for v in set(cell):
                    if v in at:
                        at[v].append(i)
            return at
        return self._cached("cav", build)

    @property
    def cells_at_edge(self) -> dict:
        def build():
            at = {}
            for i, cell in enumerate(self.cells):
                walk = self.cell_walk(i)
                for e in cycle_edges(walk):
                    at.setdefault(e, []).append(i)
            return at
        return self._cached("cae", build)

    def cell_walk(self, cell_id: int) -> tuple[int, ...]:
        """Boundary walk of a cell: the triple itself for triangles."""
        return self.cells[cell_id]

    def neighbors(self, v: int) -> tuple[int, ...]:
        try:
            return self.adjacency[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v} not in complex")

    def has_edge(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self.edge_set

    def has_triangle(self, a: int, b: int, c: int) -> bool:
        if self.kind != SIMPLICIAL:
            return False
        return tuple(sorted((a, b, c))) in self._cached(
            "tset", lambda: frozenset(self.cells))

    def distances(self, source: int) -> dict:
        """BFS distance map from ``source`` over the 1-skeleton."""
        cache = self._cached("bfs", dict)
        if source not in cache:
            if source not in self.vertex_set:
                raise UnknownVertex(f"vertex {source} not in complex")
            from collections import deque
            dist = {source: 0}
            queue = deque([source])
            adj = self.adjacency
            while queue:
                x = queue.popleft()
                dx = dist[x]
                for y in adj[x]:
                    if y not in dist:
                        dist[y] = dx + 1
                        queue.append(y)
            cache[source] = dist
        return cache[source]


@dataclass(frozen=True)
class Subcomplex:
    """Face-closed selection of vertices, edges, and cell ids of a parent."""

    parent: Complex
    vertices: frozenset
    edges: frozenset
    cell_ids: frozenset

    @staticmethod
    def create(parent: Complex, vertices=(), edges=(), cell_ids=()) -> "Subcomplex":
        """Build and check face-closure; raises ValueError on violations."""
        vs = frozenset(vertices)
        es = frozenset(edge_key(a, b) for a, b in edges)
        cs = frozenset(cell_ids)
        for v in vs:
            if v not in parent.vertex_set:
                raise UnknownVertex(f"vertex {v} not in parent complex")
        for e in es:
            if e not in parent.edge_set:
                raise ValueError(f"edge {e} not in parent complex")
            if e[0] not in vs or e[1] not in vs:
                raise ValueError(f"edge {e} endpoints not all in subcomplex")
        for c in cs:
            walk = parent.cell_walk(c)
            for e in cycle_edges(walk):
                if e not in es:
                    raise ValueError(f"cell {c} boundary edge {e} missing from subcomplex")
        return Subcomplex(parent, vs, es, cs)

    @staticmethod
    def spanned_by_edges(parent: Complex, edges) -> "Subcomplex":
        es = frozenset(edge_key(a, b) for a, b in edges)
        vs = frozenset(v for e in es for v in e)
        return Subcomplex.create(parent, vs, es, ())

    def contains_edge(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self.edges

    def issubset(self, other: "Subcomplex") -> bool:
        return (self.vertices <= other.vertices and self.edges <= other.edges
                and self.cell_ids <= other.cell_ids)


@dataclass(frozen=True)
class Presentation:
    """Generators plus cyclically reduced relator words.

    Words use lowercase generators with uppercase denoting inverses.
    """

    generators: tuple[str, ...]
    relators: tuple[str, ...]

    @staticmethod
    def create(generators: Iterable[str], relators: Iterable[str]) -> "Presentation":
        gens = tuple(generators)
        rels = tuple(relators)
        seen = set()
        for g in gens:
            if len(g) != 1 or not g.isalpha() or not g.islower():
                raise ValueError(f"generator {g!r} must be a single lowercase letter")
            if g in seen:
                raise ValueError(f"duplicate generator {g!r}")
            seen.add(g)
        for r in rels:
            if not r:
                raise ValueError("empty relator")
            for ch in r:
                if ch.lower() not in seen:
                    raise ValueError(f"relator {r!r} uses unknown letter {ch!r}")
            if _free_reduce(r) != r or _cyclic_reduce(r) != r:
                raise ValueError(f"relator {r!r} is not freely and cyclically reduced")
        return Presentation(gens, rels)


def _invert_letter(ch: str) -> str:
    return ch.lower() if ch.isupper() else ch.upper()


def _free_reduce(word: str) -> str:
    out = []
    for ch in word:
        if out and out[-1] == _invert_letter(ch):
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def _cyclic_reduce(word: str) -> str:
    w = _free_reduce(word)
    while len(w) >= 2 and w[0] == _invert_letter(w[-1]):
        w = w[1:-1]
        w = _free_reduce(w)
    return w


# -- operations ------------------------------------------------------------

def validate(cx: Complex) -> CheckReport:
    """Check the structural invariants of a complex; failures are verdicts."""
    stats = {"vertices": len(cx.vertices), "edges": len(cx.edges), "cells": len(cx.cells)}
    vset = cx.vertex_set
    seen_edges = set()
    for e in cx.edges:
        a, b = e
        if a == b:
            return CheckReport("validate", False, witness={"loop_edge": e}, stats=stats)
        if e in seen_edges:
            return CheckReport("validate", False, witness={"parallel_edge": e}, stats=stats)
        seen_edges.add(e)
        if a not in vset or b not in vset:
            return CheckReport("validate", False, witness={"edge_unknown_vertex": e}, stats=stats)
    for i, cell in enumerate(cx.cells):
        walk = cx.cell_walk(i)
        expected = 3 if cx.kind == SIMPLICIAL else len(walk)
        if len(walk) < 3 or len(set(walk)) != expected:
            return CheckReport("validate", False, witness={"cell": i, "walk_not_embedded": list(walk)}, stats=stats)
        for v in walk:
            if v not in vset:
                return CheckReport("validate", False, witness={"cell": i, "unknown_vertex": v}, stats=stats)
        for e in cycle_edges(walk):
            if e not in seen_edges:
                return CheckReport("validate", False, witness={"cell": i, "missing_edge": list(e)}, stats=stats)
    return CheckReport("validate", True, stats=stats)


def is_flag(cx: Complex) -> CheckReport:
    """Pass iff every 3-clique of the 1-skeleton spans a triangle cell."""
    if cx.kind != SIMPLICIAL:
        raise KindMismatch("is_flag requires a simplicial complex")
    adj = cx.adjacency
    triangles = frozenset(cx.cells)
    count = 0
    for a in cx.vertices:
        for b in adj[a]:
            if b <= a:
                continue
            nb = set(adj[b])
            for c in adj[a]:
                if c <= b or c not in nb:
                    continue
                count += 1
                if (a, b, c) not in triangles:
                    return CheckReport("is_flag", False, witness={"empty_clique": [a, b, c]},
                                       stats={"cliques": count})
    return CheckReport("is_flag", True, stats={"cliques": count})


def star(cx: Complex, v: int) -> Subcomplex:
    """All cells (and edges) containing ``v``, closed under faces."""
    if v not in cx.vertex_set:
        raise UnknownVertex(f"vertex {v} not in complex")
    vs = {v}
    es = set()
    for w in cx.adjacency[v]:
        es.add(edge_key(v, w))
        vs.add(w)
    cs = set(cx.cells_at_vertex[v])
    for c in cs:
        walk = cx.cell_walk(c)
        vs.update(walk)
        es.update(cycle_edges(walk))
    return Subcomplex.create(cx, vs, es, cs)


def neighborhood(cx: Complex, k: Subcomplex) -> Subcomplex:
    """``k`` plus every cell and edge meeting it, closed under faces."""
    if k.parent is not cx and k.parent != cx:
        raise ValueError("subcomplex does not belong to this complex")
    vs = set(k.vertices)
    es = set(k.edges)
    cs = set(k.cell_ids)
    for v in k.vertices:
        for w in cx.adjacency[v]:
            es.add(edge_key(v, w))
            vs.add(w)
        cs.update(cx.cells_at_vertex[v])
    for c in cs:
        walk = cx.cell_walk(c)
        vs.update(walk)
        es.update(cycle_edges(walk))
    return Subcomplex.create(cx, vs, es, cs)
