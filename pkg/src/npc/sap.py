"""Exit edges, paths around subcomplexes, and Small Angle Property probing.

The probe enumerates convex subgraphs K with a bounded number of edges, all
geodesics issued from K toward geodesics disjoint from K, and measures the
minimal path-around length between the exit edges. Boundary points of the
ideal boundary are approximated by the farthest vertices available, so every
result carries its truncation radius.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass

from .complex_core import SIMPLICIAL, Complex, Subcomplex, edge_key
from .diagram import reduced_diagram_search, verify_tight, multiplicity, max_degree
from .errors import (CapExceeded, DoesNotGoThrough, EndsInside, NoPath,
                     NonExhaustiveProbe, NotFillable)
from .metric import OrientedGeodesic, is_convex, iter_geodesics, lex_geodesic
from .report import CheckReport
from .wsys import fill_hexagon


@dataclass(frozen=True)
class ExitEdge:
    geodesic: tuple[int, ...]
    edge: tuple[int, int]
    index: int


@dataclass(frozen=True)
class PathAround:
    cells: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def length(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class SapProbeResult:
    n: int
    r_emp: int
    witness: dict | None
    configurations: int
    subgraphs: int
    exhaustive: bool
    radius_cap: int
    no_path_configs: int

    def as_dict(self) -> dict:
        from .report import jsonable
        return {
            "n": self.n, "r_emp": self.r_emp, "witness": jsonable(self.witness),
            "configurations": self.configurations, "subgraphs": self.subgraphs,
            "exhaustive": self.exhaustive, "radius_cap": self.radius_cap,
            "no_path_configs": self.no_path_configs,
        }


def exit_edge(k: Subcomplex, g: OrientedGeodesic) -> ExitEdge:
    """First edge of g outside k after which g never meets an edge of k."""
    verts = g.vertices
    if not any(x in k.vertices for x in verts):
        raise DoesNotGoThrough("geodesic misses the subcomplex")
    if verts[-1] in k.vertices:
        raise EndsInside("geodesic ends inside the subcomplex")
    edges = [edge_key(a, b) for a, b in zip(verts, verts[1:])]
    last_in = -1
    for i, e in enumerate(edges):
        if e in k.edges:
            last_in = i
    idx = last_in + 1
    return ExitEdge(verts, edges[idx], idx)


def _around_nodes(k: Subcomplex) -> list:
    cx = k.parent
    out = []
    for e in cx.edges:
        if e in k.edges:
            continue
        if e[0] in k.vertices or e[1] in k.vertices:
            out.append(e)
    return out


def _around_neighbors(cx: Complex, nodes: set):
    """edge -> list of (neighbor edge, shared cell) in the around-graph."""
    nbrs = {e: [] for e in nodes}
    cae = cx.cells_at_edge
    for e in nodes:
        cells_e = cae.get(e, ())
        for c in cells_e:
            walk = cx.cell_walk(c)
            m = len(walk)
            for i in range(m):
                f = edge_key(walk[i], walk[(i + 1) % m])
                if f != e and f in nodes:
                    nbrs[e].append((f, c))
    return nbrs


def path_around(k: Subcomplex, e, e_prime, length_cap: int = 10 ** 6) -> PathAround:
    """Minimal path around k between two edges meeting it, via BFS."""
    cx = k.parent
    e = edge_key(*e)
    e_prime = edge_key(*e_prime)
    nodes = set(_around_nodes(k))
    for x in (e, e_prime):
        if x not in nodes:
            raise NoPath(f"edge {x} is in k or does not meet k")
    cae = cx.cells_at_edge
    if e == e_prime:
        cells = cae.get(e, ())
        if not cells:
            raise NoPath("no cell contains the edge")
        return PathAround((cells[0],), (e, e))
    nbrs = _around_neighbors(cx, nodes)
    parent = {e: None}
    queue = deque([e])
    while queue:
        cur = queue.popleft()
        for nxt, cell in nbrs[cur]:
            if nxt not in parent:
                parent[nxt] = (cur, cell)
                if nxt == e_prime:
                    queue.clear()
                    break
                queue.append(nxt)
        else:
            continue
        break
    if e_prime not in parent:
        raise NoPath("around-graph does not connect the edges")
    chain_edges = [e_prime]
    chain_cells = []
    cur = e_prime
    while parent[cur] is not None:
        prev, cell = parent[cur]
        chain_cells.append(cell)
        chain_edges.append(prev)
        cur = prev
    chain_edges.reverse()
    chain_cells.reverse()
    if len(chain_cells) > length_cap:
        raise CapExceeded("path around exceeds the cap", count=len(chain_cells))
    return PathAround(tuple(chain_cells), tuple(chain_edges))


def verify_path_around(k: Subcomplex, pa: PathAround) -> bool:
    """Re-check the PathAround invariants directly from the definition."""
    cx = k.parent
    if len(pa.edges) != len(pa.cells) + 1:
        return False
    for e in pa.edges:
        if e in k.edges or (e[0] not in k.vertices and e[1] not in k.vertices):
            return False
    for i, c in enumerate(pa.cells):
        walk_edges = set()
        walk = cx.cell_walk(c)
        m = len(walk)
        for j in range(m):
            walk_edges.add(edge_key(walk[j], walk[(j + 1) % m]))
        if pa.edges[i] not in walk_edges or pa.edges[i + 1] not in walk_edges:
            return False
    return True


def _connected_edge_subgraphs(cx: Complex, max_edges: int):
    """Connected subgraphs with 0..max_edges edges (0 edges = one vertex)."""
    for v in cx.vertices:
        yield Subcomplex.create(cx, {v}, (), ())
    edges = list(cx.edges)
    seen = set()
    frontier = {frozenset((e,)) for e in edges}
    for size in range(1, max_edges + 1):
        nxt = set()
        for es in sorted(frontier, key=sorted):
            if es in seen:
                continue
            seen.add(es)
            yield Subcomplex.spanned_by_edges(cx, es)
            if size == max_edges:
                continue
            verts = {x for e in es for x in e}
            for e in edges:
                if e in es:
                    continue
                if e[0] in verts or e[1] in verts:
                    nxt.add(es | {e})
        frontier = nxt


def _exit_edge_set(cx, k: Subcomplex, v: int, w: int, geodesic_cap: int):
    """All exit edges achievable by geodesics from v (in k) to w (outside)."""
    out = set()
    count = 0
    for path in iter_geodesics(cx, v, w):
        count += 1
        if count > geodesic_cap:
            raise CapExceeded("geodesic enumeration overflow in sap probe",
                              count=count)
        g = OrientedGeodesic(cx, path)
        try:
            out.add(exit_edge(k, g).edge)
        except (DoesNotGoThrough, EndsInside):
            pass
    return out


def sap_probe(cx: Complex, n: int, radius_cap: int,
              geodesic_cap: int = 10 ** 5) -> SapProbeResult:
    """Empirical r(n): max over configurations of the minimal path-around
    length between exit edges. Raises CapExceeded (with .partial set) when
    geodesic enumeration overflows."""
    r_emp = 0
    witness = None
    configs = 0
    subgraphs = 0
    no_path = 0
    exhausted = True

    def finish():
        return SapProbeResult(n, r_emp, witness, configs, subgraphs,
                              exhausted, radius_cap, no_path)

    verts = cx.vertices
    pair_geos = {}
    try:
        for k in _connected_edge_subgraphs(cx, n):
            if not is_convex(cx, k, cap=geodesic_cap).verdict:
                continue
            subgraphs += 1
            kverts = sorted(k.vertices)
            # distances of minimal paths around k, from every candidate edge
            nodes = set(_around_nodes(k))
            nbrs = _around_neighbors(cx, nodes)
            dist_cache = {}

            def around_dist(e1, e2):
                if e1 not in dist_cache:
                    dist = {e1: 0}
                    dq = deque([e1])
                    while dq:
                        cur = dq.popleft()
                        for nx, _ in nbrs[cur]:
                            if nx not in dist:
                                dist[nx] = dist[cur] + 1
                                dq.append(nx)
                    dist_cache[e1] = dist
                d = dist_cache[e1].get(e2)
                if d == 0:
                    d = 1 if cx.cells_at_edge.get(e1) else None
                return d

            exit_sets = {}

            def exits(v, w):
                if (v, w) not in exit_sets:
                    exit_sets[(v, w)] = _exit_edge_set(cx, k, v, w, geodesic_cap)
                return exit_sets[(v, w)]

            outside = [x for x in verts if x not in k.vertices]
            for s, t in itertools.combinations_with_replacement(outside, 2):
                if cx.distances(s).get(t, radius_cap + 1) > radius_cap:
                    continue
                disjoint = False
                count = 0
                for path in iter_geodesics(cx, s, t):
                    count += 1
                    if count > geodesic_cap:
                        raise CapExceeded("geodesic enumeration overflow",
                                          count=count)
                    if all(x not in k.vertices for x in path):
                        disjoint = True
                        break
                if not disjoint:
                    continue
                for v, v1 in itertools.product(kverts, repeat=2):
                    for e1 in exits(v, s):
                        for e2 in exits(v1, t):
                            configs += 1
                            d = around_dist(e1, e2)
                            if d is None:
                                no_path += 1
                            elif d > r_emp:
                                r_emp = d
                                witness = {
                                    "k_edges": sorted(list(e) for e in k.edges),
                                    "k_vertices": kverts,
                                    "v": v, "v_prime": v1,
                                    "gamma_endpoints": [s, t],
                                    "exit_edges": [list(e1), list(e2)],
                                    "min_length": d,
                                }
    except CapExceeded as exc:
        exhausted = False
        exc.partial = finish()
        raise
    return finish()


def rerun_sap_witness(cx: Complex, probe: SapProbeResult) -> int:
    """Recompute the minimal path-around length of the stored witness."""
    wit = probe.witness
    if wit is None:
        return 0
    k = Subcomplex.spanned_by_edges(cx, [tuple(e) for e in wit["k_edges"]]) \
        if wit["k_edges"] else Subcomplex.create(cx, set(wit["k_vertices"]), (), ())
    pa = path_around(k, tuple(wit["exit_edges"][0]), tuple(wit["exit_edges"][1]))
    return pa.length


def verify_sap_bound(probe: SapProbeResult, tightness: int) -> CheckReport:
    """Pass iff the probe was exhaustive and r_emp(n) <= n * N^2."""
    if not probe.exhaustive:
        raise NonExhaustiveProbe("sap probe hit a cap; bound not certified")
    bound = probe.n * tightness * tightness
    ok = probe.r_emp <= bound
    return CheckReport("verify_sap_bound", ok,
                       witness=None if ok else probe.witness,
                       stats={"n": probe.n, "r_emp": probe.r_emp, "N": tightness,
                              "bound": bound})


def _sample_hexagons(cx: Complex, spec: dict):
    """Embedded hexagons: either sampled corner tuples or all short cycles."""
    if "samples" in spec:
        rng = random.Random(spec.get("seed", 0))
        verts = list(cx.vertices)
        produced = 0
        attempts = 0
        max_attempts = spec["samples"] * 50
        while produced < spec["samples"] and attempts < max_attempts:
            attempts += 1
            corners = [rng.choice(verts) for _ in range(6)]
            sides = []
            ok = True
            for a, b in zip(corners, corners[1:] + corners[:1]):
                try:
                    sides.append(lex_geodesic(cx, a, b))
                except Exception:
                    ok = False
                    break
            if not ok:
                continue
            walk = []
            for s in sides:
                walk.extend(s.vertices[:-1])
            if len(walk) < 3 or len(set(walk)) != len(walk):
                continue
            produced += 1
            yield corners, sides
        return
    max_len = spec.get("exhaustive", 8)
    adj = cx.adjacency
    for start in cx.vertices:
        stack = [(start,)]
        while stack:
            path = stack.pop()
            last = path[-1]
            if 3 <= len(path) <= max_len and start in adj[last] and path[1] < path[-1]:
                corners = list(path[:6]) + [path[-1]] * max(0, 6 - len(path))
                segs = _cycle_to_six_geodesics(cx, path)
                if segs is not None:
                    yield corners, segs
            if len(path) < max_len:
                for nxt in adj[last]:
                    if nxt > start and nxt not in path:
                        stack.append(path + (nxt,))


def _cycle_to_six_geodesics(cx: Complex, cycle):
    """Mark at most six corners on an embedded cycle so all arcs are geodesic."""
    m = len(cycle)
    for corners in itertools.combinations(range(m), min(6, m)):
        arcs = []
        ok = True
        for idx in range(len(corners)):
            a, b = corners[idx], corners[(idx + 1) % len(corners)]
            arc = [cycle[(a + t) % m] for t in range(((b - a) % m) + 1)]
            if len(arc) - 1 != cx.distances(arc[0]).get(arc[-1], -1):
                ok = False
                break
            arcs.append(OrientedGeodesic(cx, tuple(arc)))
        if ok:
            return arcs
    return None


def tight_hexagon_probe(cx: Complex, tightness: int, sample_spec: dict) -> CheckReport:
    """Fill sampled or enumerated embedded hexagons and verify tightness.

    Weakly systolic targets are filled constructively; polygonal targets go
    through the exhaustive search with an escalating area cap.
    """
    worst_mult = 0
    worst_deg = 0
    tested = 0
    failures = []
    for corners, sides in _sample_hexagons(cx, sample_spec):
        tested += 1
        if cx.kind == SIMPLICIAL:
            d = fill_hexagon(cx, corners, sides)
        else:
            loop = []
            for s in sides:
                loop.extend(s.vertices[:-1])
            perimeter = len(loop)
            cap = max(4, perimeter)
            d = None
            while d is None:
                try:
                    d = reduced_diagram_search(cx, loop, cap)
                except NotFillable:
                    cap *= 2
                    if cap > 64 * max(4, perimeter):
                        raise
        mult, deg = multiplicity(d), max_degree(d)
        worst_mult = max(worst_mult, mult)
        worst_deg = max(worst_deg, deg)
        rep = verify_tight(d, tightness)
        if not rep.verdict:
            failures.append({"corners": list(corners),
                             "multiplicity": mult, "max_degree": deg})
    stats = {"hexagons": tested, "empirical_multiplicity": worst_mult,
             "empirical_max_degree": worst_deg,
             "empirical_N": max(worst_mult, worst_deg), "N": tightness}
    return CheckReport("tight_hexagon_probe", not failures,
                       witness=failures[0] if failures else None, stats=stats)
