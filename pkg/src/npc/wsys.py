"""Weakly systolic complexes: condition checkers and disc-diagram fillings.

The edge condition (E) asks that an edge with both ends at distance n from a
basepoint has a common neighbour at distance n-1; the vertex condition (V)
asks that the lower neighbours of any vertex form a clique. Both are checked
exhaustively over the finite complex.

Fillings have two backends: a structured one that builds the flat disc layer
by layer inside the interval, and an oracle one that runs the exhaustive
minimal-area search. The two must agree on minimal area, which is tested.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .complex_core import SIMPLICIAL, Complex, edge_key
from .diagram import (DiscDiagram, build_diagram, max_degree, merge_pieces,
                      multiplicity, path_diagram, reduced_diagram_search,
                      single_vertex_diagram)
from .errors import (BoundViolated, Disconnected, FillFailed, KindMismatch,
                     NotFillable, NotFlag, NotMetricTriangle)
from .metric import OrientedGeodesic, interval, lex_geodesic
from .report import CheckReport
from .complex_core import is_flag


def _require_flag(cx: Complex):
    if cx.kind != SIMPLICIAL:
        raise KindMismatch("weak systolicity applies to simplicial complexes")
    rep = is_flag(cx)
    if not rep.verdict:
        raise NotFlag(f"complex is not flag: {rep.witness}")


def _require_connected(cx: Complex):
    if not cx.vertices:
        return
    if len(cx.distances(cx.vertices[0])) != len(cx.vertices):
        raise Disconnected("complex is not connected")


def check_edge_condition(cx: Complex, v: int, radii=None) -> CheckReport:
    """Condition (E) at basepoint v, over every radius unless restricted."""
    _require_flag(cx)
    dist = cx.distances(v)
    adj = cx.adjacency
    checked = 0
    for a, b in cx.edges:
        if a not in dist or b not in dist:
            continue
        n = dist[a]
        if n == 0 or dist[b] != n:
            continue
        if radii is not None and n not in radii:
            continue
        checked += 1
        common = set(adj[a]) & set(adj[b])
        if not any(dist[u] == n - 1 for u in common):
            return CheckReport("edge_condition", False,
                               witness={"v": v, "n": n, "edge": [a, b]},
                               stats={"edges_checked": checked})
    return CheckReport("edge_condition", True, stats={"edges_checked": checked})


def check_vertex_condition(cx: Complex, v: int, radii=None) -> CheckReport:
    """Condition (V) at basepoint v: lower neighbours induce a clique."""
    _require_flag(cx)
    dist = cx.distances(v)
    adj = cx.adjacency
    checked = 0
    for w in cx.vertices:
        n = dist.get(w)
        if n is None or n == 0:
            continue
        if radii is not None and n not in radii:
            continue
        checked += 1
        lower = [u for u in adj[w] if dist.get(u) == n - 1]
        for x, y in itertools.combinations(lower, 2):
            if not cx.has_edge(x, y):
                return CheckReport("vertex_condition", False,
                                   witness={"v": v, "n": n, "w": w,
                                            "nonadjacent": [x, y]},
                                   stats={"vertices_checked": checked})
    return CheckReport("vertex_condition", True,
                       stats={"vertices_checked": checked})


@dataclass(frozen=True)
class WsysReport:
    check: str
    verdict: bool
    witness: dict | None
    stats: dict

    @property
    def passed(self) -> bool:
        return self.verdict

    def as_dict(self) -> dict:
        from .report import jsonable
        return {"check": self.check, "verdict": "pass" if self.verdict else "fail",
                "witness": jsonable(self.witness), "stats": jsonable(self.stats)}


def check_weakly_systolic(cx: Complex, radii=None, name="check_weakly_systolic") -> WsysReport:
    """(E) and (V) for every basepoint; radii can restrict n (local check)."""
    _require_flag(cx)
    _require_connected(cx)
    stats = {"vertices": len(cx.vertices)}
    for v in cx.vertices:
        for checker, tag in ((check_edge_condition, "E"),
                             (check_vertex_condition, "V")):
            rep = checker(cx, v, radii=radii)
            if not rep.verdict:
                witness = dict(rep.witness)
                witness["condition"] = tag
                return WsysReport(name, False, witness, stats)
    return WsysReport(name, True, None, stats)


def check_locally(cx: Complex) -> WsysReport:
    return check_weakly_systolic(cx, radii={1, 2, 3}, name="check_locally")


def _embedded_cycles(cx: Complex, length: int):
    """Embedded cycles of exact length, each reported once."""
    adj = cx.adjacency
    for start in cx.vertices:
        stack = [(start,)]
        while stack:
            path = stack.pop()
            last = path[-1]
            if len(path) == length:
                if start in adj[last] and path[1] < path[-1]:
                    yield path
                continue
            for nxt in adj[last]:
                if nxt > start and nxt not in path:
                    stack.append(path + (nxt,))


def check_systolic(cx: Complex) -> CheckReport:
    """Every embedded 4- or 5-cycle must have a diagonal."""
    _require_flag(cx)
    count = 0
    for length in (4, 5):
        for cycle in _embedded_cycles(cx, length):
            count += 1
            has_chord = any(
                cx.has_edge(cycle[i], cycle[j])
                for i in range(length) for j in range(i + 2, length)
                if (i, j) != (0, length - 1))
            if not has_chord:
                return CheckReport("check_systolic", False,
                                   witness={"cycle": list(cycle)},
                                   stats={"cycles_checked": count})
    return CheckReport("check_systolic", True, stats={"cycles_checked": count})


# -- metric triangles ---------------------------------------------------------

@dataclass(frozen=True)
class MetricTriangle:
    inputs: tuple[int, int, int]
    triple: tuple[int, int, int]
    sizes: tuple[int, int, int]

    @property
    def size(self) -> int:
        return self.sizes[0]

    @property
    def equilateral(self) -> bool:
        return len(set(self.sizes)) == 1


def _quasi_median_corner(cx: Complex, a: int, b: int, c: int) -> int:
    """Vertex of I(a,b) and I(a,c) farthest from a, least id on ties."""
    da = cx.distances(a)
    i_ab = set(interval(cx, a, b).vertices)
    i_ac = set(interval(cx, a, c).vertices)
    both = i_ab & i_ac
    far = max(da[x] for x in both)
    return min(x for x in both if da[x] == far)


def _is_metric_triangle(cx: Complex, a: int, b: int, c: int) -> bool:
    iab = set(interval(cx, a, b).vertices)
    ibc = set(interval(cx, b, c).vertices)
    ica = set(interval(cx, c, a).vertices)
    return (iab & ibc == {b}) and (ibc & ica == {c}) and (ica & iab == {a})


def metric_triangle(cx: Complex, u: int, v: int, w: int) -> MetricTriangle:
    """Canonical quasi-median triple of (u, v, w), verified."""
    u1 = _quasi_median_corner(cx, u, v, w)
    v1 = _quasi_median_corner(cx, v, u, w)
    w1 = _quasi_median_corner(cx, w, u, v)
    if len({u1, v1, w1}) < 3:
        # degenerate: coinciding corners always satisfy the property
        sizes = (cx.distances(u1)[v1], cx.distances(v1)[w1], cx.distances(w1)[u1])
        return MetricTriangle((u, v, w), (u1, v1, w1), sizes)
    if not _is_metric_triangle(cx, u1, v1, w1):
        raise NotMetricTriangle("canonical quasi-median triple fails the "
                                "metric-triangle property", triple=(u1, v1, w1))
    sizes = (cx.distances(u1)[v1], cx.distances(v1)[w1], cx.distances(w1)[u1])
    return MetricTriangle((u, v, w), (u1, v1, w1), sizes)


def check_weak_modularity(cx: Complex) -> CheckReport:
    """Every metric triangle is equidistant from its opposite corners, and
    equilateral; exhaustive over vertex triples."""
    _require_connected(cx)
    found = 0
    for a, b, c in itertools.combinations(cx.vertices, 3):
        if not _is_metric_triangle(cx, a, b, c):
            continue
        found += 1
        sizes = (cx.distances(a)[b], cx.distances(b)[c], cx.distances(c)[a])
        if len(set(sizes)) != 1:
            return CheckReport("check_weak_modularity", False,
                               witness={"triple": [a, b, c], "sizes": list(sizes)},
                               stats={"metric_triangles": found})
        for corner, far1, far2 in ((a, b, c), (b, c, a), (c, a, b)):
            dc = cx.distances(corner)
            dists = {dc[x] for x in interval(cx, far1, far2).vertices}
            if len(dists) != 1:
                return CheckReport("check_weak_modularity", False,
                                   witness={"triple": [a, b, c], "corner": corner},
                                   stats={"metric_triangles": found})
    return CheckReport("check_weak_modularity", True,
                       stats={"metric_triangles": found})


# -- flat discs and bigon filling ----------------------------------------------

class _StructuredFailed(Exception):
    """Internal: structured construction inapplicable, fall back to oracle."""


@dataclass(frozen=True)
class FlatDisc:
    """Grid realization z^i_j of a simple bigon filling."""

    complex: Complex
    grid: tuple[tuple[int, ...], ...]
    diagram: DiscDiagram
    side1_ids: tuple[int, ...]
    side2_ids: tuple[int, ...]

    def check_invariants(self) -> CheckReport:
        """Re-verify distances, grid adjacency, and degree bounds."""
        cx = self.complex
        g1 = tuple(self.grid[i][0] for i in range(len(self.grid)))
        g2 = tuple(self.grid[i][-1] for i in range(len(self.grid)))
        v, u = g1[0], g1[-1]
        n = len(self.grid) - 1
        du, dvert = cx.distances(v), cx.distances(u)
        for i, layer in enumerate(self.grid):
            for x in layer:
                if du[x] != i or dvert[x] != n - i:
                    return CheckReport("flat_disc", False,
                                       witness={"vertex": x, "layer": i})
        seen = [x for layer in self.grid for x in layer]
        if len(seen) != len(set(seen)):
            return CheckReport("flat_disc", False, witness={"not_embedded": True})
        d = self.diagram
        deg = d.degree
        bset = d.boundary_vertices
        for vert in d.vertices:
            if vert in bset:
                if deg[vert] > 5:
                    return CheckReport("flat_disc", False,
                                       witness={"boundary_degree": [vert, deg[vert]]})
            elif deg[vert] != 6:
                return CheckReport("flat_disc", False,
                                   witness={"interior_degree": [vert, deg[vert]]})
        ok = _grid_adjacency_ok(d, self.grid)
        if not ok:
            return CheckReport("flat_disc", False, witness={"grid_adjacency": False})
        return CheckReport("flat_disc", True,
                           stats={"layers": [len(l) for l in self.grid]})


def _grid_adjacency_ok(d: DiscDiagram, grid) -> bool:
    pos = {}
    ids = _grid_ids(grid)
    for i, layer in enumerate(grid):
        for j in range(len(layer)):
            pos[ids[(i, j)]] = (i, j)
    ups = {}
    for a, b in d.edges:
        (i1, j1), (i2, j2) = pos[a], pos[b]
        if i1 == i2:
            if abs(j1 - j2) != 1:
                return False
        else:
            if abs(i1 - i2) != 1 or abs(j1 - j2) > 1:
                return False
            low = (i1, j1) if i1 < i2 else (i2, j2)
            high_j = j2 if i1 < i2 else j1
            ups.setdefault(low, []).append(high_j)
    for js in ups.values():
        if len(js) > 2 or (len(js) == 2 and abs(js[0] - js[1]) != 1):
            return False
    return True


def _grid_ids(grid) -> dict:
    ids = {}
    count = 0
    for i, layer in enumerate(grid):
        for j in range(len(layer)):
            ids[(i, j)] = count
            count += 1
    return ids


def _layer_paths(cx: Complex, members, start, end, cap=512):
    """Simple paths from start to end inside the induced subgraph."""
    if start == end:
        return [(start,)]
    allowed = set(members)
    out = []
    stack = [(start,)]
    while stack:
        path = stack.pop()
        if len(out) > cap:
            raise _StructuredFailed("layer path enumeration blew up")
        last = path[-1]
        for nxt in cx.adjacency[last]:
            if nxt not in allowed or nxt in path:
                continue
            if nxt == end:
                out.append(path + (nxt,))
            else:
                stack.append(path + (nxt,))
    if not out:
        raise _StructuredFailed("no layer path")
    return sorted(out)


def _strip_lattice_path(cx: Complex, low, high):
    """Monotone triangulation of the strip between two consecutive layers.

    Walks pointers (j, l) from (0, 0) to the far corner, staying inside the
    |j - l| <= 1 band; prefers advancing the lower layer. Triangles come out
    oriented so shared edges are traversed in opposite directions.
    """
    a, b = len(low) - 1, len(high) - 1
    if abs(a - b) > 1:
        return None
    memo = {}

    def feasible(j, l):
        if (j, l) == (a, b):
            return []
        if (j, l) in memo:
            return memo[(j, l)]
        memo[(j, l)] = None
        if j < a and abs((j + 1) - l) <= 1 and \
                cx.has_edge(low[j + 1], high[l]) and \
                cx.has_triangle(low[j], low[j + 1], high[l]):
            rest = feasible(j + 1, l)
            if rest is not None:
                memo[(j, l)] = [(low[j], low[j + 1], high[l])] + rest
                return memo[(j, l)]
        if l < b and abs(j - (l + 1)) <= 1 and \
                cx.has_edge(low[j], high[l + 1]) and \
                cx.has_triangle(low[j], high[l], high[l + 1]):
            rest = feasible(j, l + 1)
            if rest is not None:
                memo[(j, l)] = [(low[j], high[l + 1], high[l])] + rest
                return memo[(j, l)]
        return memo[(j, l)]

    return feasible(0, 0)


def _fill_simple_bigon_structured(cx: Complex, g1, g2) -> FlatDisc:
    """Layered flat-disc filling of a simple bigon between certified geodesics."""
    n = len(g1) - 1
    v, u = g1[0], g1[-1]
    inter = interval(cx, v, u)
    du = cx.distances(v)
    layers = {}
    for x in inter.vertices:
        layers.setdefault(du[x], []).append(x)
    options = []
    for i in range(n + 1):
        members = layers.get(i, [])
        options.append(_layer_paths(cx, members, g1[i], g2[i]))
    # minimize total area = sum of strip sizes via layer-by-layer DP
    best = {p: (len(p) - 1, None, None) for p in options[0]}
    tables = [best]
    for i in range(1, n + 1):
        cur = {}
        for p in options[i]:
            for q, (cost, _, _) in tables[i - 1].items():
                tri = _strip_lattice_path(cx, q, p)
                if tri is None:
                    continue
                total = cost + len(p) - 1
                if p not in cur or (total, q) < (cur[p][0], cur[p][1]):
                    cur[p] = (total, q, tri)
        if not cur:
            raise _StructuredFailed(f"no strip triangulation into layer {i}")
        tables.append(cur)
    # walk back the optimum
    final = min(tables[n], key=lambda p: (tables[n][p][0], p))
    chosen = [final]
    strips = []
    for i in range(n, 0, -1):
        _, prev, tri = tables[i][chosen[-1]]
        strips.append(tri)
        chosen.append(prev)
    chosen.reverse()
    strips.reverse()
    grid = tuple(tuple(p) for p in chosen)
    ids = _grid_ids(grid)
    coord = {}
    for i, layer in enumerate(grid):
        for j, x in enumerate(layer):
            coord[(i, x)] = ids[(i, j)]
    raw = []
    cell_index = cx._cached("tri_index",
                            lambda: {c: i for i, c in enumerate(cx.cells)})
    for i, tri in enumerate(strips):
        for t in tri:
            walk = []
            for x in t:
                key = (i, x) if (i, x) in coord else (i + 1, x)
                walk.append(coord[key])
            raw.append((tuple(walk), cell_index[tuple(sorted(t))]))
    vmap = {}
    for i, layer in enumerate(grid):
        for j, x in enumerate(layer):
            vmap[ids[(i, j)]] = x
    diagram = build_diagram(cx, raw, vmap)
    side1 = tuple(ids[(i, 0)] for i in range(n + 1))
    side2 = tuple(ids[(i, len(grid[i]) - 1)] for i in range(n + 1))
    disc = FlatDisc(cx, grid, diagram, side1, side2)
    rep = disc.check_invariants()
    if not rep.verdict:
        raise _StructuredFailed(f"flat disc invariants failed: {rep.witness}")
    return disc


def _split_indices(g1, g2):
    return [i for i in range(len(g1)) if g1[i] == g2[i]]


def bigon_pieces(cx: Complex, g1: OrientedGeodesic, g2: OrientedGeodesic,
                 backend: str = "structured"):
    """Simple pieces of a bigon: FlatDisc, oracle diagram, or shared path."""
    if g1.source != g2.source or g1.target != g2.target:
        raise FillFailed("bigon sides must share both endpoints")
    w1, w2 = g1.vertices, g2.vertices
    splits = _split_indices(w1, w2)
    pieces = []
    for s, t in zip(splits, splits[1:]):
        sub1, sub2 = w1[s:t + 1], w2[s:t + 1]
        if sub1 == sub2:
            pieces.append(("path", sub1))
        else:
            pieces.append(_fill_simple_piece(cx, sub1, sub2, backend))
    if not pieces:
        pieces.append(("path", w1))
    return pieces


def _fill_simple_piece(cx, sub1, sub2, backend):
    n = len(sub1) - 1
    if backend == "structured":
        try:
            return ("flat", _fill_simple_bigon_structured(cx, sub1, sub2))
        except _StructuredFailed:
            backend = "oracle"
    if backend != "oracle":
        raise ValueError(f"unknown backend {backend!r}")
    cap = max(1, math.ceil(n * n / 2))
    loop = sub1 + tuple(reversed(sub2))[1:-1]
    diagram = reduced_diagram_search(cx, loop, cap)
    side1 = tuple(diagram.boundary[:n + 1])
    side2 = (diagram.boundary[0],) + tuple(reversed(diagram.boundary[n + 1:])) \
        + (diagram.boundary[n],)
    return ("oracle", diagram, side1, side2)


def _piece_parts(cx, piece):
    """(diagram, side1 ids, side2 ids) for any bigon piece."""
    kind = piece[0]
    if kind == "path":
        d = path_diagram(cx, piece[1])
        ids = tuple(range(len(piece[1])))
        return d, ids, ids
    if kind == "flat":
        disc = piece[1]
        return disc.diagram, disc.side1_ids, disc.side2_ids
    _, diagram, side1, side2 = piece
    return diagram, side1, side2


def fill_bigon(cx: Complex, g1: OrientedGeodesic, g2: OrientedGeodesic,
               backend: str = "structured") -> DiscDiagram:
    """Disc diagram bounded by g1 followed by g2 reversed."""
    d, _, _ = fill_bigon_with_sides(cx, g1, g2, backend)
    return d


def fill_bigon_with_sides(cx: Complex, g1: OrientedGeodesic, g2: OrientedGeodesic,
                          backend: str = "structured"):
    pieces = bigon_pieces(cx, g1, g2, backend)
    parts = [_piece_parts(cx, p) for p in pieces]
    if len(parts) == 1:
        d, s1, s2 = parts[0]
        return d, tuple(s1), tuple(s2)
    idents = []
    for k in range(len(parts) - 1):
        idents.append((k, parts[k][1][-1], k + 1, parts[k + 1][1][0]))
    merged, maps = merge_pieces(cx, [p[0] for p in parts], idents)
    side1 = []
    side2 = []
    for k, (_, s1, s2) in enumerate(parts):
        m = maps[k]
        s1m = [m[x] for x in s1]
        s2m = [m[x] for x in s2]
        if k:
            s1m, s2m = s1m[1:], s2m[1:]
        side1.extend(s1m)
        side2.extend(s2m)
    return merged, tuple(side1), tuple(side2)


# -- triangle and hexagon fillings ----------------------------------------------

def _tri_grid_points(k: int):
    return [(a, b, k - a - b) for a in range(k, -1, -1) for b in range(k - a + 1)]


def _tri_dist(p, q) -> int:
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]), abs(p[2] - q[2]))


def _fill_equilateral_core(cx: Complex, u1: int, v1: int, w1: int):
    """Isometric flat equilateral triangle spanned by a metric triangle.

    Grid points carry coordinates (a, b, c), a+b+c = k, with corners
    (k,0,0) -> u1, (0,k,0) -> v1, (0,0,k) -> w1. Every grid point must land
    on the unique vertex at the prescribed distances from the three corners.
    """
    du, dv, dw = cx.distances(u1), cx.distances(v1), cx.distances(w1)
    k = du[v1]
    if k == 0:
        d = single_vertex_diagram(cx, u1)
        return d, ((0,), (0,), (0,))
    if du[w1] != k or dv[w1] != k:
        raise FillFailed("metric triangle is not equilateral")
    points = _tri_grid_points(k)
    candidates = {}
    for (a, b, c) in points:
        opts = sorted(x for x in cx.vertices
                      if du.get(x) == k - a and dv.get(x) == k - b and dw.get(x) == k - c)
        if not opts:
            raise FillFailed(f"no realization for grid point {(a, b, c)}")
        candidates[(a, b, c)] = opts
    assignment = _assign_grid(cx, points, candidates)
    if assignment is None:
        raise FillFailed("no isometric grid assignment")
    # verify the embedding is isometric on all pairs
    for p, q in itertools.combinations(points, 2):
        if cx.distances(assignment[p])[assignment[q]] != _tri_dist(p, q):
            raise FillFailed("grid assignment is not isometric")
    ids = {p: i for i, p in enumerate(points)}
    cell_index = cx._cached("tri_index",
                            lambda: {c: i for i, c in enumerate(cx.cells)})
    raw = []
    # orient lattice triangles consistently in the (b, c) projection
    for b in range(k + 1):
        for c in range(k + 1 - b):
            a = k - b - c
            up = ((a, b, c), (a - 1, b + 1, c), (a - 1, b, c + 1))
            down = ((a - 1, b, c + 1), (a - 1, b + 1, c), (a - 2, b + 1, c + 1))
            for walk in (up, down):
                if any(p[0] < 0 for p in walk):
                    continue
                t = tuple(sorted(assignment[p] for p in walk))
                raw.append((tuple(ids[p] for p in walk), cell_index[t]))
    vmap = {ids[p]: assignment[p] for p in points}
    diagram = build_diagram(cx, raw, vmap)
    side_uv = tuple(ids[(k - t, t, 0)] for t in range(k + 1))
    side_vw = tuple(ids[(0, k - t, t)] for t in range(k + 1))
    side_wu = tuple(ids[(t, 0, k - t)] for t in range(k + 1))
    return diagram, (side_uv, side_vw, side_wu)


def _assign_grid(cx: Complex, points, candidates, budget=20000):
    """Backtracking assignment of grid points to vertices, edges checked."""
    order = sorted(points, key=lambda p: (len(candidates[p]), p))
    assignment = {}
    attempts = [0]

    def ok(p, x):
        for q, y in assignment.items():
            d = _tri_dist(p, q)
            if d == 1 and not cx.has_edge(x, y):
                return False
            if d == 0 or (x == y and d != 0):
                return False
        return True

    def rec(idx):
        if idx == len(order):
            return True
        p = order[idx]
        for x in candidates[p]:
            attempts[0] += 1
            if attempts[0] > budget:
                return False
            if ok(p, x):
                assignment[p] = x
                if rec(idx + 1):
                    return True
                del assignment[p]
        return False

    if rec(0):
        return dict(assignment)
    return None


def _as_geodesic(cx, vertices) -> OrientedGeodesic:
    return OrientedGeodesic.create(cx, vertices)


def _concat_path(*paths):
    out = list(paths[0])
    for p in paths[1:]:
        if out and p and out[-1] != p[0]:
            raise FillFailed("paths do not chain")
        out.extend(p[1:])
    return tuple(out)


def fill_triangle_with_sides(cx: Complex, g_uv: OrientedGeodesic,
                             g_vw: OrientedGeodesic, g_wu: OrientedGeodesic,
                             backend: str = "structured"):
    """Fill a geodesic triangle: flat core plus three bigons.

    Returns (diagram, (side ids along uv, vw, wu)).
    """
    u, v, w = g_uv.source, g_vw.source, g_wu.source
    if (g_uv.target, g_vw.target, g_wu.target) != (v, w, u):
        raise FillFailed("triangle sides do not chain")
    if u == v == w:
        d = single_vertex_diagram(cx, u)
        return d, ((0,), (0,), (0,))
    mt = metric_triangle(cx, u, v, w)
    u1, v1, w1 = mt.triple
    core, (c_uv, c_vw, c_wu) = _fill_equilateral_core(cx, u1, v1, w1)
    core_uv = tuple(core.vertex_map[i] for i in c_uv)
    core_vw = tuple(core.vertex_map[i] for i in c_vw)
    core_wu = tuple(core.vertex_map[i] for i in c_wu)
    g_uu1 = lex_geodesic(cx, u, u1).vertices
    g_vv1 = lex_geodesic(cx, v, v1).vertices
    g_ww1 = lex_geodesic(cx, w, w1).vertices
    path_uv = _concat_path(g_uu1, core_uv, tuple(reversed(g_vv1)))
    path_vw = _concat_path(g_vv1, core_vw, tuple(reversed(g_ww1)))
    path_wu = _concat_path(g_ww1, core_wu, tuple(reversed(g_uu1)))
    for path, a, b in ((path_uv, u, v), (path_vw, v, w), (path_wu, w, u)):
        if len(path) - 1 != cx.distances(a)[b]:
            raise FillFailed("quasi-median connector is not geodesic")
    d1, s1a, s1b = fill_bigon_with_sides(cx, g_uv, _as_geodesic(cx, path_uv), backend)
    d2, s2a, s2b = fill_bigon_with_sides(cx, g_vw, _as_geodesic(cx, path_vw), backend)
    d3, s3a, s3b = fill_bigon_with_sides(cx, g_wu, _as_geodesic(cx, path_wu), backend)
    pieces = [d1, d2, d3, core]
    la, lb, lc = len(g_uu1) - 1, len(g_vv1) - 1, len(g_ww1) - 1
    k = mt.size
    idents = []

    def seam(pi, ids_i, pj, ids_j):
        for x, y in zip(ids_i, ids_j):
            idents.append((pi, x, pj, y))

    # connector seams between neighbouring bigons (reversed directions)
    seam(0, s1b[:la + 1], 2, tuple(reversed(s3b[lc + k:])))
    seam(1, s2b[:lb + 1], 0, tuple(reversed(s1b[la + k:])))
    seam(2, s3b[:lc + 1], 1, tuple(reversed(s2b[lb + k:])))
    # core seams
    seam(0, s1b[la:la + k + 1], 3, c_uv)
    seam(1, s2b[lb:lb + k + 1], 3, c_vw)
    seam(2, s3b[lc:lc + k + 1], 3, c_wu)
    merged, maps = merge_pieces(cx, pieces, idents)
    side_uv = tuple(maps[0][x] for x in s1a)
    side_vw = tuple(maps[1][x] for x in s2a)
    side_wu = tuple(maps[2][x] for x in s3a)
    return merged, (side_uv, side_vw, side_wu)


def fill_triangle(cx: Complex, u: int, v: int, w: int,
                  backend: str = "structured",
                  check_bounds: bool = True) -> DiscDiagram:
    """Tight filling of the lex-least geodesic triangle on (u, v, w)."""
    g_uv = lex_geodesic(cx, u, v)
    g_vw = lex_geodesic(cx, v, w)
    g_wu = lex_geodesic(cx, w, u)
    d, _ = fill_triangle_with_sides(cx, g_uv, g_vw, g_wu, backend)
    if check_bounds:
        mult, deg = multiplicity(d), max_degree(d)
        if mult > 4:
            raise BoundViolated("triangle filling exceeds 4-to-1", diagram=d,
                                bound="multiplicity", value=mult)
        if deg > 14:
            raise BoundViolated("triangle filling exceeds degree 14", diagram=d,
                                bound="max_degree", value=deg)
    return d


def fill_geodesic_polygon(cx: Complex, sides, backend: str = "structured") -> DiscDiagram:
    """Fill a closed chain of up to six geodesics by a fan of triangles.

    Non-embedded input is split at a repeated vertex and the parts are filled
    recursively, then joined at the split vertex.
    """
    sides = [s if isinstance(s, OrientedGeodesic) else _as_geodesic(cx, s)
             for s in sides]
    sides = [s for s in sides if len(s) > 0]
    if not sides:
        raise FillFailed("all sides degenerate")
    for a, b in zip(sides, sides[1:] + sides[:1]):
        if a.target != b.source:
            raise FillFailed("polygon sides do not chain")
    walk = []
    for s in sides:
        walk.extend(s.vertices[:-1])
    n = len(walk)
    seen = {}
    repeat = None
    for i, x in enumerate(walk):
        if x in seen:
            repeat = (seen[x], i)
            break
        seen[x] = i
    if repeat is not None:
        i, j = repeat
        part1 = walk[i:j] + [walk[i]]
        part2 = walk[j:] + walk[:i] + [walk[j]]
        filled = []
        for part in (part1, part2):
            if len(part) <= 2:
                continue
            segs = _geodesic_segments(cx, part)
            filled.append(fill_geodesic_polygon(cx, segs, backend))
        if not filled:
            return path_diagram(cx, [walk[i]])
        if len(filled) == 1:
            return filled[0]
        anchor = walk[i]
        ids = []
        for d in filled:
            on_boundary = [x for x in d.boundary if d.vertex_map[x] == anchor]
            ids.append(min(on_boundary) if on_boundary else
                       min(x for x, t in d.vmap_items if t == anchor))
        merged, _ = merge_pieces(cx, filled, [(0, ids[0], 1, ids[1])])
        return merged
    if len(sides) == 1:
        raise FillFailed("a single closed geodesic cannot bound")
    if len(sides) == 2:
        return fill_bigon(cx, sides[0], sides[1].reversed(), backend)
    # fan into triangles; an anchor works when all its triangle loops embed
    m = len(sides)
    for shift in range(m):
        rot = sides[shift:] + sides[:shift]
        chords = _fan_chords(cx, rot)
        if chords is not None:
            return _fill_fan(cx, rot, chords, backend)
    # every fan anchor pinches: fall back to the exhaustive search
    perimeter = len(walk)
    cap = 2 * perimeter
    while True:
        try:
            return reduced_diagram_search(cx, walk, cap)
        except NotFillable:
            if cap > 4 * perimeter * perimeter:
                raise
            cap *= 2


def _fan_chords(cx: Complex, sides):
    """Lex chords from the anchor corner, or None if a fan loop pinches."""
    m = len(sides)
    p0 = sides[0].source
    chords = {t: lex_geodesic(cx, p0, sides[t].source) for t in range(2, m - 1)}
    for t in range(1, m - 1):
        g_ab = sides[0] if t == 1 else chords[t]
        g_bc = sides[t]
        g_ca = sides[m - 1] if t == m - 2 else chords[t + 1].reversed()
        loop = g_ab.vertices[:-1] + g_bc.vertices[:-1] + g_ca.vertices[:-1]
        if len(set(loop)) != len(loop):
            return None
    return chords


def _fill_fan(cx: Complex, sides, chords, backend) -> DiscDiagram:
    m = len(sides)
    diagrams = []
    for t in range(1, m - 1):
        g_ab = sides[0] if t == 1 else chords[t]
        g_bc = sides[t]
        g_ca = sides[m - 1] if t == m - 2 else chords[t + 1].reversed()
        d, (sa, sb, sc) = fill_triangle_with_sides(cx, g_ab, g_bc, g_ca, backend)
        diagrams.append((d, sa, sb, sc))
    if len(diagrams) == 1:
        return diagrams[0][0]
    pieces = [d for d, *_ in diagrams]
    idents = []
    for r in range(len(diagrams) - 1):
        _, _, _, sc = diagrams[r]
        _, sa_next, _, _ = diagrams[r + 1]
        for x, y in zip(sc, tuple(reversed(sa_next))):
            idents.append((r, x, r + 1, y))
    merged, _ = merge_pieces(cx, pieces, idents)
    return merged


def _geodesic_segments(cx, closed_walk):
    """Cut a closed walk into maximal geodesic arcs."""
    verts = list(closed_walk)
    segs = []
    start = 0
    for i in range(1, len(verts)):
        seg = verts[start:i + 1]
        if len(seg) - 1 != cx.distances(seg[0])[seg[-1]]:
            segs.append(tuple(verts[start:i]))
            start = i - 1
    segs.append(tuple(verts[start:]))
    return [s for s in segs if len(s) >= 2]


def fill_hexagon(cx: Complex, corners, sides=None,
                 backend: str = "structured") -> DiscDiagram:
    """Fill a geodesic hexagon; degenerate sides are allowed."""
    if len(corners) != 6:
        raise FillFailed("hexagon needs six corners")
    if sides is None:
        sides = []
        for a, b in zip(corners, corners[1:] + type(corners)(corners[:1])):
            sides.append(lex_geodesic(cx, a, b))
    sides = [s for s in sides if len(s.vertices) > 1]
    if not sides:
        return single_vertex_diagram(cx, corners[0])
    return fill_geodesic_polygon(cx, sides, backend)
