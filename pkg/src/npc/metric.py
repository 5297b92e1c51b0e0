"""Shortest-path metric on the 1-skeleton.

Distances are exact BFS counts; geodesics are enumerated through the DAG of
distance-decreasing edges inside the interval, never by naive path search, so
a returned geodesic is correct by construction and blow-ups hit the cap early.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .complex_core import Complex, Subcomplex
from .errors import CapExceeded, Disconnected
from .report import CheckReport

DEFAULT_GEODESIC_CAP = 10 ** 6


@dataclass(frozen=True)
class OrientedGeodesic:
    """Vertex sequence of a shortest path, certified against BFS distances."""

    complex: Complex
    vertices: tuple[int, ...]

    @staticmethod
    def create(cx: Complex, vertices: Sequence[int]) -> "OrientedGeodesic":
        vs = tuple(vertices)
        if not vs:
            raise ValueError("empty geodesic")
        for a, b in zip(vs, vs[1:]):
            if not cx.has_edge(a, b):
                raise ValueError(f"({a},{b}) is not an edge")
        if len(vs) - 1 != distance(cx, vs[0], vs[-1]):
            raise ValueError("path length does not equal BFS distance")
        return OrientedGeodesic(cx, vs)

    def __len__(self) -> int:
        return len(self.vertices) - 1

    @property
    def source(self) -> int:
        return self.vertices[0]

    @property
    def target(self) -> int:
        return self.vertices[-1]

    def edges(self) -> list[tuple[int, int]]:
        from .complex_core import edge_key
        return [edge_key(a, b) for a, b in zip(self.vertices, self.vertices[1:])]

    def reversed(self) -> "OrientedGeodesic":
        return OrientedGeodesic(self.complex, self.vertices[::-1])


@dataclass(frozen=True)
class Interval:
    """I(u,v): vertices x with d(u,x) + d(x,v) = d(u,v), with both distances."""

    source: int
    target: int
    distance: int
    vertices: tuple[int, ...]
    dist_pairs: tuple[tuple[int, tuple[int, int]], ...]

    @property
    def pair_map(self) -> dict:
        return dict(self.dist_pairs)

    def __contains__(self, x: int) -> bool:
        return x in self.pair_map

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class DeltaEstimate:
    """Hyperbolicity value with the witness tuple attaining it."""

    value: float
    method: str
    witness: tuple = ()


def distances(cx: Complex, u: int) -> dict:
    return dict(cx.distances(u))


def distance(cx: Complex, u: int, v: int) -> int:
    d = cx.distances(u)
    if v not in d:
        raise Disconnected(f"no path from {u} to {v}")
    return d[v]


def interval(cx: Complex, u: int, v: int) -> Interval:
    du = cx.distances(u)
    if v not in du:
        raise Disconnected(f"no path from {u} to {v}")
    dv = cx.distances(v)
    d = du[v]
    members = sorted(x for x, k in du.items() if k + dv.get(x, d + 1) == d)
    pairs = tuple((x, (du[x], dv[x])) for x in members)
    return Interval(u, v, d, tuple(members), pairs)


def _interval_dag(cx: Complex, u: int, v: int) -> tuple[dict, int]:
    """Successor map x -> sorted targets one step closer to v inside I(u,v)."""
    du = cx.distances(u)
    if v not in du:
        raise Disconnected(f"no path from {u} to {v}")
    dv = cx.distances(v)
    d = du[v]
    inside = {x for x, k in du.items() if k + dv.get(x, d + 1) == d}
    succ = {}
    for x in inside:
        succ[x] = tuple(sorted(
            y for y in cx.adjacency[x]
            if y in inside and du[y] == du[x] + 1))
    return succ, d


def iter_geodesics(cx: Complex, u: int, v: int) -> Iterator[tuple[int, ...]]:
    """Yield geodesic vertex tuples from u to v in lexicographic order."""
    succ, d = _interval_dag(cx, u, v)
    stack = [(u,)]
    while stack:
        path = stack.pop()
        x = path[-1]
        if x == v:
            yield path
            continue
        for y in reversed(succ[x]):
            stack.append(path + (y,))


def count_geodesics(cx: Complex, u: int, v: int) -> int:
    succ, _ = _interval_dag(cx, u, v)
    counts = {v: 1}

    def count(x):
        if x not in counts:
            counts[x] = sum(count(y) for y in succ[x])
        return counts[x]

    return count(u)


def enumerate_geodesics(cx: Complex, u: int, v: int,
                        cap: int = DEFAULT_GEODESIC_CAP) -> list[OrientedGeodesic]:
    out = []
    for path in iter_geodesics(cx, u, v):
        if len(out) >= cap:
            raise CapExceeded(f"more than {cap} geodesics from {u} to {v}", count=len(out))
        out.append(OrientedGeodesic(cx, path))
    return out


def lex_geodesic(cx: Complex, u: int, v: int) -> OrientedGeodesic:
    """The lexicographically least geodesic from u to v."""
    succ, _ = _interval_dag(cx, u, v)
    path = [u]
    while path[-1] != v:
        path.append(succ[path[-1]][0])
    return OrientedGeodesic(cx, tuple(path))


def embedded_cycles_up_to(cx: Complex, max_len: int) -> Iterator[tuple[int, ...]]:
    """All embedded cycles with at most max_len edges, each listed once.

    Cycles are anchored at their least vertex and oriented with the smaller
    second endpoint; the search prunes branches that cannot return to the
    anchor within the remaining budget.
    """
    adj = cx.adjacency
    for start in cx.vertices:
        dist = cx.distances(start)
        stack = [(start,)]
        while stack:
            path = stack.pop()
            last = path[-1]
            if len(path) >= 3 and start in adj[last] and path[1] < path[-1]:
                yield path
            if len(path) == max_len:
                continue
            budget = max_len - len(path)
            for nxt in adj[last]:
                if nxt > start and nxt not in path and dist.get(nxt, max_len + 1) <= budget:
                    stack.append(path + (nxt,))


def is_convex(cx: Complex, k: Subcomplex, cap: int = DEFAULT_GEODESIC_CAP) -> CheckReport:
    """Pass iff every ambient geodesic between vertices of k stays in k."""
    verts = sorted(k.vertices)
    checked = 0
    for i, a in enumerate(verts):
        for b in verts[i + 1:]:
            for path in iter_geodesics(cx, a, b):
                checked += 1
                if checked > cap:
                    raise CapExceeded("geodesic enumeration blew up in is_convex", count=checked)
                ok = all(x in k.vertices for x in path) and all(
                    k.contains_edge(x, y) for x, y in zip(path, path[1:]))
                if not ok:
                    return CheckReport("is_convex", False,
                                       witness={"geodesic": list(path)},
                                       stats={"geodesics_checked": checked})
    return CheckReport("is_convex", True, stats={"geodesics_checked": checked})


def _component(cx: Complex, u: int) -> list[int]:
    return sorted(cx.distances(u))


def delta_estimate(cx: Complex, method: str = "slim") -> DeltaEstimate:
    """Exhaustive hyperbolicity constant; intended for desk-scale complexes."""
    if method in ("slim", "slim-triangles-exhaustive"):
        return _delta_slim(cx)
    if method in ("4pt", "four-point", "four-point-exhaustive"):
        return _delta_four_point(cx)
    raise ValueError(f"unknown delta method {method!r}")


def _delta_four_point(cx: Complex) -> DeltaEstimate:
    verts = cx.vertices
    if len(verts) < 4:
        return DeltaEstimate(0.0, "four-point-exhaustive", tuple(verts))
    dist = {v: cx.distances(v) for v in verts}
    best = 0.0
    witness = tuple(verts[:4])
    for q in itertools.combinations(verts, 4):
        a, b, c, d = q
        try:
            s1 = dist[a][b] + dist[c][d]
            s2 = dist[a][c] + dist[b][d]
            s3 = dist[a][d] + dist[b][c]
        except KeyError:
            raise Disconnected("four-point method requires a connected complex")
        x, y, _ = sorted((s1, s2, s3), reverse=True)
        val = (x - y) / 2.0
        if val > best:
            best, witness = val, q
    return DeltaEstimate(best, "four-point-exhaustive", witness)


def _delta_slim(cx: Complex) -> DeltaEstimate:
    verts = cx.vertices
    dist = {v: cx.distances(v) for v in verts}
    best = 0.0
    witness = ()
    for t in itertools.combinations(verts, 3):
        a, b, c = t
        if b not in dist[a] or c not in dist[a]:
            raise Disconnected("slim-triangle method requires a connected complex")
        sides = {}
        for (x, y) in ((a, b), (b, c), (c, a)):
            sides[(x, y)] = [tuple(p) for p in iter_geodesics(cx, x, y)]
        for gab in sides[(a, b)]:
            for gbc in sides[(b, c)]:
                for gca in sides[(c, a)]:
                    tri = (gab, gbc, gca)
                    eps = 0
                    for i in range(3):
                        other = set(tri[(i + 1) % 3]) | set(tri[(i + 2) % 3])
                        for p in tri[i]:
                            eps = max(eps, min(dist[p][o] for o in other))
                    if eps > best:
                        best, witness = eps, (t, tri)
    return DeltaEstimate(float(best), "slim-triangles-exhaustive", witness)


def recheck_delta_witness(cx: Complex, est: DeltaEstimate) -> float:
    """Recompute the estimate value on its stored witness."""
    if est.method == "four-point-exhaustive":
        if len(est.witness) < 4:
            return 0.0
        a, b, c, d = est.witness[:4]
        dm = {v: cx.distances(v) for v in (a, b, c, d)}
        s = sorted((dm[a][b] + dm[c][d], dm[a][c] + dm[b][d], dm[a][d] + dm[b][c]),
                   reverse=True)
        return (s[0] - s[1]) / 2.0
    if est.method == "slim-triangles-exhaustive":
        if not est.witness:
            return 0.0
        _, tri = est.witness
        eps = 0
        for i in range(3):
            other = set(tri[(i + 1) % 3]) | set(tri[(i + 2) % 3])
            for p in tri[i]:
                eps = max(eps, min(distance(cx, p, o) for o in other))
        return float(eps)
    raise ValueError(f"unknown method {est.method!r}")
