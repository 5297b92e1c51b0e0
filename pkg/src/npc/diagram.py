"""Disc diagrams over a target complex.

A diagram is a planar contractible polygonal complex together with a cell map
to the target. Planarity is combinatorial: explicit boundary walk, shared-edge
gluing, and a global consistency check (Euler characteristic, one traversal
per directed edge, link condition at every vertex). No coordinates are stored.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .complex_core import Complex, canonical_cycle, cycle_edges, edge_key
from .errors import (FillFailed, NotFillable, NotTriangulated, Unclassifiable)
from .report import CheckReport


@dataclass(frozen=True)
class DiagramCell:
    """One polygon of the diagram: its walk plus how it lands on the target."""

    walk: tuple[int, ...]
    target_cell: int
    offset: int
    reflected: bool


@dataclass(frozen=True)
class DiscDiagram:
    target: Complex
    cells: tuple[DiagramCell, ...]
    boundary: tuple[int, ...]
    vmap_items: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})

    def _cached(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    @property
    def vertex_map(self) -> dict:
        return self._cached("vmap", lambda: dict(self.vmap_items))

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._cached("verts", lambda: tuple(sorted(self.vertex_map)))

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        def build():
            es = set()
            for cell in self.cells:
                es.update(cycle_edges(cell.walk))
            n = len(self.boundary)
            if n > 1:
                for i in range(n):
                    es.add(edge_key(self.boundary[i], self.boundary[(i + 1) % n]))
            return tuple(sorted(es))
        return self._cached("edges", build)

    @property
    def boundary_vertices(self) -> frozenset:
        return self._cached("bverts", lambda: frozenset(self.boundary))

    @property
    def degree(self) -> dict:
        def build():
            deg = Counter()
            for a, b in self.edges:
                deg[a] += 1
                deg[b] += 1
            return {v: deg.get(v, 0) for v in self.vertices}
        return self._cached("deg", build)

    @property
    def cells_at_edge(self) -> dict:
        def build():
            at = {}
            for i, cell in enumerate(self.cells):
                for e in cycle_edges(cell.walk):
                    at.setdefault(e, []).append(i)
            return at
        return self._cached("cae", build)

    def interior_vertices(self) -> tuple[int, ...]:
        b = self.boundary_vertices
        return tuple(v for v in self.vertices if v not in b)


def area(d: DiscDiagram) -> int:
    return len(d.cells)


def multiplicity(d: DiscDiagram) -> int:
    if not d.vmap_items:
        return 0
    counts = Counter(t for _, t in d.vmap_items)
    return max(counts.values())


def max_degree(d: DiscDiagram) -> int:
    deg = d.degree
    return max(deg.values()) if deg else 0


# -- construction ------------------------------------------------------------

def _orient_against_target(walk, vmap, target_walk):
    """Find (offset, reflected) aligning phi(walk) with the target cycle."""
    m = len(target_walk)
    image = tuple(vmap[v] for v in walk)
    if len(image) != m:
        return None
    for off in range(m):
        if all(image[i] == target_walk[(off + i) % m] for i in range(m)):
            return off, False
    for off in range(m):
        if all(image[i] == target_walk[(off - i) % m] for i in range(m)):
            return off, True
    return None


def _link_structures(cells: Sequence[tuple[int, ...]], edges) -> dict:
    """Per-vertex link graph: node = neighbor vertex, links from cell corners."""
    link = {}
    for a, b in edges:
        link.setdefault(a, {}).setdefault(b, [])
        link.setdefault(b, {}).setdefault(a, [])
    for walk in cells:
        m = len(walk)
        for i in range(m):
            v = walk[i]
            prev_n = walk[(i - 1) % m]
            next_n = walk[(i + 1) % m]
            link[v][prev_n].append(next_n)
            link[v][next_n].append(prev_n)
    return link


def _link_components(link_at_v: dict) -> list[list[int]]:
    """Connected components of the link graph at one vertex, sorted."""
    seen = set()
    comps = []
    for start in sorted(link_at_v):
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            x = queue.popleft()
            comp.append(x)
            for y in link_at_v[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def compute_boundary_walks(cell_walks: Sequence[tuple[int, ...]],
                           extra_edges: Iterable[tuple[int, int]] = ()) -> list[tuple[int, ...]]:
    """Boundary walks of a consistently oriented planar complex.

    Each vertex pairs incoming free directed edges with outgoing ones by the
    planar rotation rule: follow the link component of the arrival edge and
    leave through the out-port of the next component, so wedge parts are
    threaded into a single walk. Returns one cyclic walk per boundary
    component.
    """
    used = set()
    edges = set()
    for walk in cell_walks:
        m = len(walk)
        for i in range(m):
            used.add((walk[i], walk[(i + 1) % m]))
            edges.add(edge_key(walk[i], walk[(i + 1) % m]))
    for e in extra_edges:
        edges.add(edge_key(*e))
    free = set()
    for a, b in sorted(edges):
        if (a, b) not in used:
            free.add((a, b))
        if (b, a) not in used:
            free.add((b, a))
    link = _link_structures(cell_walks, edges)
    comps_at = {}
    comp_of = {}
    for v, nodes in link.items():
        comps = _link_components(nodes)
        comps_at[v] = comps
        comp_of[v] = {u: i for i, comp in enumerate(comps) for u in comp}

    def exit_port(v, u):
        comps = comps_at[v]
        ci = comp_of[v].get(u)
        if ci is None:
            return None
        nxt = comps[(ci + 1) % len(comps)]
        outs = [w for w in nxt if (v, w) in free]
        if not outs:
            return None
        return outs[0] if len(outs) == 1 else min(outs)

    walks = []
    remaining = set(free)
    while remaining:
        start = min(remaining)
        walk = [start[0]]
        cur = start
        while True:
            remaining.discard(cur)
            u, v = cur
            out_node = exit_port(v, u)
            if out_node is None:
                raise FillFailed("inconsistent link structure while tracing boundary")
            nxt = (v, out_node)
            if nxt == start:
                break
            if nxt not in remaining:
                raise FillFailed("boundary tracing revisited a directed edge")
            walk.append(v)
            cur = nxt
        walks.append(tuple(walk))
    return sorted(walks)


def build_diagram(target: Complex, raw_cells: Sequence[tuple[tuple[int, ...], int]],
                  vmap: dict, extra_edges: Iterable[tuple[int, int]] = (),
                  boundary: tuple[int, ...] | None = None) -> DiscDiagram:
    """Assemble a DiscDiagram from cell walks, a vertex map, and stray edges.

    The boundary walk is computed from the planar structure unless supplied.
    Raises FillFailed if the complex does not have a single boundary walk.
    """
    cells = []
    for walk, tc in raw_cells:
        aligned = _orient_against_target(walk, vmap, target.cell_walk(tc))
        if aligned is None:
            raise FillFailed(f"cell walk {walk} does not map onto target cell {tc}")
        off, refl = aligned
        cells.append(DiagramCell(tuple(walk), tc, off, refl))
    if boundary is None:
        if not raw_cells and not extra_edges:
            if len(vmap) != 1:
                raise FillFailed("vertex diagram needs exactly one vertex")
            boundary = (next(iter(vmap)),)
        else:
            walks = compute_boundary_walks([c.walk for c in cells], extra_edges)
            if len(walks) != 1:
                raise FillFailed(f"expected one boundary walk, found {len(walks)}")
            boundary = walks[0]
    return DiscDiagram(target, tuple(cells), tuple(boundary),
                       tuple(sorted(vmap.items())))


def single_vertex_diagram(target: Complex, target_vertex: int) -> DiscDiagram:
    return DiscDiagram(target, (), (0,), ((0, target_vertex),))


def path_diagram(target: Complex, target_path: Sequence[int]) -> DiscDiagram:
    """Area-0 diagram whose boundary runs along a path and back."""
    vp = list(target_path)
    if len(vp) == 1:
        return single_vertex_diagram(target, vp[0])
    ids = list(range(len(vp)))
    vmap = {i: vp[i] for i in ids}
    boundary = tuple(ids + ids[-2:0:-1])
    extra = [(ids[i], ids[i + 1]) for i in range(len(ids) - 1)]
    return build_diagram(target, (), vmap, extra_edges=extra, boundary=boundary)


# -- validation ---------------------------------------------------------------

def validate_diagram(d: DiscDiagram) -> CheckReport:
    """Check every DiscDiagram invariant; failures come back as verdicts."""
    stats = {"area": area(d), "vertices": len(d.vertices), "edges": len(d.edges)}

    def fail(witness):
        return CheckReport("validate_diagram", False, witness=witness, stats=stats)

    vmap = d.vertex_map
    for v in d.boundary:
        if v not in vmap:
            return fail({"boundary_vertex_unmapped": v})
    for idx, cell in enumerate(d.cells):
        walk = cell.walk
        if len(walk) < 3 or len(set(walk)) != len(walk):
            return fail({"cell": idx, "walk_not_embedded": list(walk)})
        if not (0 <= cell.target_cell < len(d.target.cells)):
            return fail({"cell": idx, "bad_target_cell": cell.target_cell})
        twalk = d.target.cell_walk(cell.target_cell)
        if len(twalk) != len(walk):
            return fail({"cell": idx, "length_mismatch": [len(walk), len(twalk)]})
        m = len(walk)
        for i in range(m):
            expect = twalk[(cell.offset - i) % m] if cell.reflected else twalk[(cell.offset + i) % m]
            if vmap.get(walk[i]) != expect:
                return fail({"cell": idx, "map_mismatch_at": walk[i]})
    for a, b in d.edges:
        fa, fb = vmap.get(a), vmap.get(b)
        if fa is None or fb is None:
            return fail({"edge_unmapped": [a, b]})
        if not d.target.has_edge(fa, fb):
            return fail({"edge_not_in_target": [a, b]})
    # each directed edge traversed exactly once across cell walks + boundary
    traversals = Counter()
    for cell in d.cells:
        m = len(cell.walk)
        for i in range(m):
            traversals[(cell.walk[i], cell.walk[(i + 1) % m])] += 1
    n = len(d.boundary)
    if n > 1:
        for i in range(n):
            traversals[(d.boundary[i], d.boundary[(i + 1) % n])] += 1
    for (a, b) in d.edges:
        if traversals.get((a, b), 0) != 1 or traversals.get((b, a), 0) != 1:
            return fail({"edge_usage": [a, b],
                         "forward": traversals.get((a, b), 0),
                         "backward": traversals.get((b, a), 0)})
    total = sum(traversals.values())
    if total != 2 * len(d.edges):
        return fail({"traversal_total": total})
    # Euler characteristic of a contractible planar complex
    euler = len(d.vertices) - len(d.edges) + len(d.cells)
    if euler != 1:
        return fail({"euler": euler})
    # connectivity
    if len(d.vertices) > 1:
        adj = {v: set() for v in d.vertices}
        for a, b in d.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {d.vertices[0]}
        queue = deque(seen)
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        if len(seen) != len(d.vertices):
            return fail({"disconnected": sorted(set(d.vertices) - seen)})
    # link condition: interior links are one cycle, boundary links are paths
    link = _link_structures([c.walk for c in d.cells], d.edges)
    visits = Counter()
    if n > 1:
        for v in d.boundary:
            visits[v] += 1
    elif n == 1:
        visits[d.boundary[0]] += 1
    for v in d.vertices:
        nodes = link.get(v, {})
        degs = {w: len(ws) for w, ws in nodes.items()}
        if any(k > 2 for k in degs.values()):
            return fail({"link_overload_at": v})
        ends = sorted(w for w, k in degs.items() if k < 2)
        comp = _count_link_components(nodes)
        if v not in d.boundary_vertices:
            if comp != 1 or ends:
                return fail({"interior_link_not_cycle": v})
        else:
            if comp != _cycle_free_components(nodes):
                return fail({"boundary_link_has_cycle": v})
            if nodes and comp != visits[v]:
                return fail({"link_components_vs_visits": [v, comp, visits[v]]})
    # stored boundary must match the traced planar boundary; with wedge
    # vertices the chaining order is a free choice, so only the walk count
    # and length are pinned down there
    if len(d.vertices) > 1:
        walks = compute_boundary_walks([c.walk for c in d.cells],
                                       extra_edges=d.edges)
        if len(walks) != 1:
            return fail({"boundary_components": len(walks)})
        if len(walks[0]) != len(d.boundary):
            return fail({"boundary_length": [len(walks[0]), len(d.boundary)]})
        wedge_free = all(k <= 1 for k in visits.values())
        if wedge_free and _min_rotation(walks[0]) != _min_rotation(d.boundary):
            return fail({"boundary_mismatch": list(walks[0])})
    return CheckReport("validate_diagram", True, stats=stats)


def _count_link_components(nodes: dict) -> int:
    seen = set()
    comp = 0
    for start in sorted(nodes):
        if start in seen:
            continue
        comp += 1
        queue = deque([start])
        seen.add(start)
        while queue:
            x = queue.popleft()
            for y in nodes[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return comp


def _cycle_free_components(nodes: dict) -> int:
    """Component count if the link graph is a forest, else -1."""
    edges_twice = sum(len(v) for v in nodes.values())
    comp = _count_link_components(nodes)
    if len(nodes) - edges_twice // 2 != comp:
        return -1
    return comp


def _min_rotation(seq: Sequence[int]) -> tuple[int, ...]:
    s = tuple(seq)
    if not s:
        return s
    return min(s[i:] + s[:i] for i in range(len(s)))


# -- reducedness --------------------------------------------------------------

def is_reduced(d: DiscDiagram) -> CheckReport:
    """Fail iff two polygons sharing an edge fold onto the same target cell."""
    vmap = d.vertex_map
    for e, cells in sorted(d.cells_at_edge.items()):
        if len(cells) != 2:
            continue
        i, j = cells
        c1, c2 = d.cells[i], d.cells[j]
        if c1.target_cell != c2.target_cell:
            continue
        if _mirror_pair(c1.walk, c2.walk, e, vmap):
            return CheckReport("is_reduced", False,
                               witness={"cells": [i, j], "edge": list(e)},
                               stats={"area": area(d)})
    return CheckReport("is_reduced", True, stats={"area": area(d)})


def _mirror_pair(w1, w2, e, vmap) -> bool:
    x, y = e
    a1 = _rotate_to_edge(w1, x, y)
    a2 = _rotate_to_edge(w2, x, y)
    if a1 is None or a2 is None:
        return False
    return all(vmap[p] == vmap[q] for p, q in zip(a1, a2))


def _rotate_to_edge(walk, x, y):
    """Rotate (reversing if needed) so the walk starts x, y."""
    m = len(walk)
    for i in range(m):
        if walk[i] == x and walk[(i + 1) % m] == y:
            return tuple(walk[(i + k) % m] for k in range(m))
    for i in range(m):
        if walk[i] == x and walk[(i - 1) % m] == y:
            return tuple(walk[(i - k) % m] for k in range(m))
    return None


# -- Gauss-Bonnet --------------------------------------------------------------

@dataclass(frozen=True)
class DefectTable:
    defects: tuple[tuple[int, int], ...]
    total: int

    @property
    def per_vertex(self) -> dict:
        return dict(self.defects)


def gauss_bonnet_audit(d: DiscDiagram) -> DefectTable:
    """Defect 3 - t on the boundary and 6 - t inside; totals 6 on a disc."""
    for cell in d.cells:
        if len(cell.walk) != 3:
            raise NotTriangulated("gauss_bonnet_audit requires triangle cells")
    tri_count = Counter()
    for cell in d.cells:
        for v in cell.walk:
            tri_count[v] += 1
    bverts = d.boundary_vertices
    defects = []
    for v in d.vertices:
        base = 3 if v in bverts else 6
        defects.append((v, base - tri_count.get(v, 0)))
    total = sum(val for _, val in defects)
    return DefectTable(tuple(defects), total)


# -- spurs, shells, ladders, classification -----------------------------------

def find_spurs(d: DiscDiagram) -> list[dict]:
    deg = d.degree
    spurs = []
    for a, b in d.edges:
        for tip in (a, b):
            if deg[tip] == 1:
                spurs.append({"edge": [a, b], "tip": tip})
    return spurs


def _boundary_edge_set(d: DiscDiagram) -> set:
    n = len(d.boundary)
    if n <= 1:
        return set()
    return {edge_key(d.boundary[i], d.boundary[(i + 1) % n]) for i in range(n)}


def find_shells(d: DiscDiagram) -> list[dict]:
    """Cells whose outer component is a connected path and whose inner path
    is a concatenation of at most three internal arcs."""
    bedges = _boundary_edge_set(d)
    bverts = d.boundary_vertices
    deg = d.degree
    shells = []
    for idx, cell in enumerate(d.cells):
        walk = cell.walk
        m = len(walk)
        edge_on = [edge_key(walk[i], walk[(i + 1) % m]) in bedges for i in range(m)]
        vert_on = [walk[i] in bverts for i in range(m)]
        n_outer = sum(edge_on)
        if n_outer == 0:
            continue
        # connectivity of the outer component inside the boundary cycle of the cell
        if not _cycle_subspace_connected(edge_on, vert_on):
            continue
        if n_outer == m:
            shells.append({"cell": idx, "outer_edges": m, "inner_arcs": 0})
            continue
        # inner path: the complementary contiguous run of edges
        start = next(i for i in range(m)
                     if edge_on[i] and not edge_on[(i + 1) % m])
        inner_positions = []
        j = (start + 1) % m
        while not edge_on[j]:
            inner_positions.append(j)
            j = (j + 1) % m
        interior_vs = [walk[(p + 1) % m] for p in inner_positions[:-1]]
        junctions = sum(1 for v in interior_vs if deg[v] >= 3 or v in bverts)
        arcs = junctions + 1
        if arcs <= 3:
            shells.append({"cell": idx, "outer_edges": n_outer, "inner_arcs": arcs})
    return shells


def _cycle_subspace_connected(edge_on, vert_on) -> bool:
    """Is the marked subspace of a cycle (edges + vertices) connected?"""
    m = len(edge_on)
    items = []
    for i in range(m):
        if vert_on[i]:
            items.append(("v", i))
        if edge_on[i]:
            items.append(("e", i))
    if not items:
        return True
    parent = {it: it for it in items}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        if a in parent and b in parent:
            parent[find(a)] = find(b)

    for i in range(m):
        if edge_on[i]:
            union(("e", i), ("v", i))
            union(("e", i), ("v", (i + 1) % m))
    return len({find(it) for it in items}) == 1


def _ladder_pieces(d: DiscDiagram) -> list[tuple]:
    """Canonical list of decomposition pieces: 2-cells plus bare edges."""
    covered = set()
    for cell in d.cells:
        covered.update(cycle_edges(cell.walk))
    pieces = [("cell", i) for i in range(len(d.cells))]
    pieces += [("edge", e) for e in d.edges if e not in covered]
    return pieces


def _piece_vertices(d: DiscDiagram, piece) -> frozenset:
    kind, ref = piece
    if kind == "cell":
        return frozenset(d.cells[ref].walk)
    return frozenset(ref)


def _removal_components(d: DiscDiagram, piece) -> int:
    """Components of the space left after deleting the closed cell or edge."""
    kind, ref = piece
    if kind == "cell":
        gone_vs = set(d.cells[ref].walk)
        gone_es = set(cycle_edges(d.cells[ref].walk))
        gone_cell = {ref}
    else:
        gone_vs = set(ref)
        gone_es = {ref}
        gone_cell = set()
    nodes = []
    nodes += [("v", v) for v in d.vertices if v not in gone_vs]
    nodes += [("e", e) for e in d.edges if e not in gone_es]
    nodes += [("c", i) for i in range(len(d.cells)) if i not in gone_cell]
    if not nodes:
        return 0
    adj = {nd: [] for nd in nodes}
    for e in d.edges:
        if e in gone_es:
            continue
        for v in e:
            if v not in gone_vs:
                adj[("e", e)].append(("v", v))
                adj[("v", v)].append(("e", e))
    for i, cell in enumerate(d.cells):
        if i in gone_cell:
            continue
        for e in cycle_edges(cell.walk):
            if e not in gone_es:
                adj[("c", i)].append(("e", e))
                adj[("e", e)].append(("c", i))
    seen = set()
    comp = 0
    for nd in nodes:
        if nd in seen:
            continue
        comp += 1
        queue = deque([nd])
        seen.add(nd)
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return comp


def ladder_decomposition(d: DiscDiagram) -> list[tuple] | None:
    """Ordered pieces c_1..c_n if the diagram is a ladder, else None."""
    pieces = _ladder_pieces(d)
    n = len(pieces)
    if n < 2:
        return None
    vsets = {p: _piece_vertices(d, p) for p in pieces}
    meets = {p: [] for p in pieces}
    for p, q in itertools.combinations(pieces, 2):
        if vsets[p] & vsets[q]:
            meets[p].append(q)
            meets[q].append(p)
    ends = [p for p in pieces if len(meets[p]) == 1]
    if len(ends) != 2 or any(len(meets[p]) > 2 for p in pieces):
        return None
    order = [min(ends)]
    seen = {order[0]}
    while len(order) < n:
        nxt = [q for q in meets[order[-1]] if q not in seen]
        if len(nxt) != 1:
            return None
        order.append(nxt[0])
        seen.add(nxt[0])
    if _removal_components(d, order[0]) > 1 or _removal_components(d, order[-1]) > 1:
        return None
    for p in order[1:-1]:
        if _removal_components(d, p) != 2:
            return None
    return order


def _ladder_rungs(d: DiscDiagram, order) -> list[list]:
    rungs = []
    for p, q in zip(order, order[1:]):
        if p[0] == "cell" and q[0] == "cell":
            shared = sorted(set(cycle_edges(d.cells[p[1]].walk))
                            & set(cycle_edges(d.cells[q[1]].walk)))
            rungs.append([list(e) for e in shared])
    return rungs


@dataclass(frozen=True)
class Classification:
    kind: str
    detail: tuple = ()

    def as_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


def classify(d: DiscDiagram) -> Classification:
    """One of SingleCell, Ladder, or at-least-three shells or spurs.

    Raises Unclassifiable when none of the three cases applies; over a
    verified C'(1/6) target that is a falsification witness.
    """
    pieces = _ladder_pieces(d)
    if len(pieces) <= 1:
        return Classification("single_cell",
                              detail=(("cells", len(d.cells)), ("edges", len(d.edges))))
    order = ladder_decomposition(d)
    if order is not None:
        detail = tuple((k, (list(r) if k == "edge" else r)) for k, r in order)
        return Classification("ladder", detail=detail)
    spurs = find_spurs(d)
    shells = find_shells(d)
    if len(spurs) + len(shells) >= 3:
        witnesses = tuple(
            [("spur", s["tip"]) for s in spurs] + [("shell", s["cell"]) for s in shells])
        return Classification("three_shells_or_spurs", detail=witnesses)
    raise Unclassifiable(
        f"diagram with area {area(d)} has {len(spurs)} spurs and {len(shells)} shells")


def shell_off(d: DiscDiagram) -> DiscDiagram:
    """Remove one shell whose outer path is longer than half its boundary."""
    bedges = _boundary_edge_set(d)
    for shell in find_shells(d):
        cell = d.cells[shell["cell"]]
        m = len(cell.walk)
        outer = sum(1 for e in cycle_edges(cell.walk) if e in bedges)
        if 2 * outer > m:
            keep = [(c.walk, c.target_cell) for i, c in enumerate(d.cells)
                    if i != shell["cell"]]
            used = set()
            for w, _ in keep:
                used.update(w)
            extra = [e for e in d.edges
                     if e not in set(cycle_edges(cell.walk))
                     and not any(e in cycle_edges(w) for w, _ in keep)]
            inner = [e for e in cycle_edges(cell.walk) if e not in bedges]
            vmap = {}
            for w, _ in keep:
                for v in w:
                    vmap[v] = d.vertex_map[v]
            for e in extra + inner:
                for v in e:
                    vmap[v] = d.vertex_map[v]
            if not keep and not (extra + inner):
                anchor = min(set(cell.walk) - _exclusive_shell_vertices(d, shell["cell"]),
                             default=cell.walk[0])
                return single_vertex_diagram(d.target, d.vertex_map[anchor])
            return build_diagram(d.target, keep, vmap, extra_edges=extra + inner)
    raise Unclassifiable("no shell with outer path above half the boundary")


def _exclusive_shell_vertices(d: DiscDiagram, idx: int) -> set:
    others = set()
    for i, c in enumerate(d.cells):
        if i != idx:
            others.update(c.walk)
    n = len(d.boundary)
    return {v for v in d.cells[idx].walk if v not in others}


def split_at_cut_vertices(d: DiscDiagram) -> list[DiscDiagram]:
    """Maximal 2-dimensional blocks: classes of cells glued along edges."""
    if not d.cells:
        return []
    parent = list(range(len(d.cells)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e, cs in d.cells_at_edge.items():
        for i in cs[1:]:
            parent[find(i)] = find(cs[0])
    groups = {}
    for i in range(len(d.cells)):
        groups.setdefault(find(i), []).append(i)
    blocks = []
    for ids in sorted(groups.values()):
        raw = [(d.cells[i].walk, d.cells[i].target_cell) for i in ids]
        vmap = {v: d.vertex_map[v] for w, _ in raw for v in w}
        blocks.append(build_diagram(d.target, raw, vmap))
    return blocks


def verify_tight(d: DiscDiagram, n_bound: int) -> CheckReport:
    """Pass iff the map is at most N-to-1 and every degree is at most N."""
    mult = multiplicity(d)
    deg = max_degree(d)
    ok = mult <= n_bound and deg <= n_bound
    return CheckReport("verify_tight", ok,
                       witness=None if ok else {"multiplicity": mult, "max_degree": deg},
                       stats={"multiplicity": mult, "max_degree": deg, "N": n_bound})


# -- reflection and merging ----------------------------------------------------

def reflect_diagram(d: DiscDiagram) -> DiscDiagram:
    raw = [(c.walk[::-1], c.target_cell) for c in d.cells]
    covered = set()
    for c in d.cells:
        covered.update(cycle_edges(c.walk))
    extra = [e for e in d.edges if e not in covered]
    boundary = d.boundary if len(d.boundary) <= 1 else (d.boundary[0],) + d.boundary[1:][::-1]
    return build_diagram(d.target, raw, dict(d.vertex_map), extra_edges=extra,
                         boundary=boundary)


def merge_pieces(target: Complex, pieces: Sequence[DiscDiagram],
                 identifications: Sequence[tuple[int, int, int, int]]):
    """Union of pieces with (piece, vertex, piece, vertex) identifications.

    Pieces are reflected as needed so that every glued seam is traversed in
    opposite directions; returns (diagram, per-piece id relabelings).
    """
    flips = _solve_flips(pieces, identifications)
    oriented = [reflect_diagram(p) if flips[i] else p for i, p in enumerate(pieces)]
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, p in enumerate(oriented):
        for v in p.vertices:
            parent[(i, v)] = (i, v)
    for (pi, vi, pj, vj) in identifications:
        a, b = find((pi, vi)), find((pj, vj))
        if a != b:
            parent[a] = b
    relabel = {}
    next_id = 0
    for i, p in enumerate(oriented):
        for v in p.vertices:
            root = find((i, v))
            if root not in relabel:
                relabel[root] = next_id
                next_id += 1
    maps = []
    vmap = {}
    raw = []
    extra = []
    for i, p in enumerate(oriented):
        m = {v: relabel[find((i, v))] for v in p.vertices}
        maps.append(m)
        for v, t in p.vertex_map.items():
            new = m[v]
            if new in vmap and vmap[new] != t:
                raise FillFailed("identified vertices map to different targets")
            vmap[new] = t
        covered = set()
        for c in p.cells:
            raw.append((tuple(m[v] for v in c.walk), c.target_cell))
            covered.update(cycle_edges(c.walk))
        for e in p.edges:
            if e not in covered:
                extra.append(edge_key(m[e[0]], m[e[1]]))
    diagram = build_diagram(target, raw, vmap, extra_edges=extra)
    return diagram, maps


def _solve_flips(pieces, identifications):
    """2-color pieces so every glued seam edge is traversed oppositely.

    The constraint comes from directed cell traversals of the seam edges:
    consecutive identification pairs along a seam name an edge in each piece,
    and after flipping the two cell traversals must run in opposite
    directions.
    """
    dir_used = []
    for p in pieces:
        used = set()
        for c in p.cells:
            m = len(c.walk)
            for i in range(m):
                used.add((c.walk[i], c.walk[(i + 1) % m]))
        dir_used.append(used)
    by_pair = {}
    for (pi, vi, pj, vj) in identifications:
        by_pair.setdefault((pi, pj), []).append((vi, vj))
    constraints = []  # (i, j, want_equal_flips)
    for (pi, pj), pairs in sorted(by_pair.items()):
        for (a_i, a_j), (b_i, b_j) in zip(pairs, pairs[1:]):
            di = 1 if (a_i, b_i) in dir_used[pi] else \
                (-1 if (b_i, a_i) in dir_used[pi] else 0)
            dj = 1 if (a_j, b_j) in dir_used[pj] else \
                (-1 if (b_j, a_j) in dir_used[pj] else 0)
            if di and dj:
                constraints.append((pi, pj, di != dj))
    flips = {}
    for i in range(len(pieces)):
        if i in flips:
            continue
        flips[i] = False
        queue = deque([i])
        while queue:
            x = queue.popleft()
            for (a, b, equal) in constraints:
                for (p, q) in ((a, b), (b, a)):
                    if p == x:
                        want = flips[x] if equal else not flips[x]
                        if q in flips:
                            if flips[q] != want:
                                raise FillFailed("inconsistent seam orientations")
                        else:
                            flips[q] = want
                            queue.append(q)
    return flips


# -- exhaustive minimal-area search --------------------------------------------

def _reduce_walk(walk: tuple[int, ...]):
    """Cyclically cancel backtracks; returns (reduced walk, trace of ops).

    Trace ops are ("rot", k) for a left rotation by k, ("del", j, v) for
    deleting the backtrack middle v at position j together with position j+1,
    and ("d2", v) for collapsing a length-2 walk to its first vertex.
    """
    w = list(walk)
    trace = []
    changed = True
    while changed and len(w) > 2:
        changed = False
        n = len(w)
        for j in range(n):
            if w[j - 1] == w[(j + 1) % n]:
                if j == n - 1:
                    # rotate so the deletion does not wrap the list end
                    w = w[1:] + w[:1]
                    trace.append(("rot", 1))
                    j = n - 2
                trace.append(("del", j, w[j]))
                del w[j + 1]
                del w[j]
                changed = True
                break
    if len(w) == 2:
        trace.append(("d2", w[1]))
        w = w[:1]
    return tuple(w), trace


def _directed_cell_index(cx: Complex) -> dict:
    """directed edge -> list of (cell_id, directed cycle starting with that edge)."""
    index = {}
    for cid in range(len(cx.cells)):
        walk = cx.cell_walk(cid)
        m = len(walk)
        for orient in (walk, walk[::-1]):
            for i in range(m):
                cyc = tuple(orient[(i + k) % m] for k in range(m))
                index.setdefault((cyc[0], cyc[1]), []).append((cid, cyc))
    return index


def _anchor_positions(walk: tuple[int, ...]) -> list[int]:
    """Positions to branch on: occurrences of one direction-excess edge,
    or every position when no edge has an excess."""
    n = len(walk)
    fwd = Counter()
    for i in range(n):
        fwd[(walk[i], walk[(i + 1) % n])] += 1
    excess = [de for de in fwd if fwd[de] > fwd.get((de[1], de[0]), 0)]
    if not excess:
        return list(range(n))
    target = min(excess)
    return [i for i in range(n) if (walk[i], walk[(i + 1) % n]) == target]


def _splice_moves(cx: Complex, walk: tuple[int, ...], index: dict):
    """Yield (rho, ell, cell_id, q_path) for cell arcs through anchor positions."""
    n = len(walk)
    seen = set()
    for pos in _anchor_positions(walk):
        de = (walk[pos], walk[(pos + 1) % n])
        for cid, cyc in index.get(de, ()):
            m = len(cyc)
            # extend the match backward by b and forward by f edges
            max_b = 0
            while max_b + 1 < min(m, n):
                b = max_b + 1
                if walk[(pos - b) % n] != cyc[(-b) % m]:
                    break
                max_b = b
            max_f = 1
            while max_f < min(m, n):
                f = max_f + 1
                if walk[(pos + f) % n] != cyc[f % m]:
                    break
                max_f = f
            for b in range(0, max_b + 1):
                for f in range(1, max_f + 1):
                    ell = b + f
                    if ell > m or ell > n:
                        continue
                    key = ((pos - b) % n, ell, cid)
                    if key in seen:
                        continue
                    seen.add(key)
                    rho = (pos - b) % n
                    # complement path q from p0 to p_ell the other way round cyc
                    start = (-b) % m
                    q = tuple(cyc[(start - k) % m] for k in range(m - ell + 1))
                    yield rho, ell, cid, q


def _apply_splice(walk: tuple[int, ...], rho: int, ell: int, q: tuple[int, ...]):
    """Replace the arc of ell edges starting at rho by the path q (reversed
    complement); returns the raw new walk."""
    n = len(walk)
    rot = tuple(walk[(rho + k) % n] for k in range(n))
    if ell == n:
        return (rot[0],) if len(q) == 1 else q[:-1]
    return q[:-1] + rot[ell:]


class _SearchNode:
    __slots__ = ("parent", "move", "trace", "rot")

    def __init__(self, parent, move, trace, rot):
        self.parent = parent
        self.move = move
        self.trace = trace
        self.rot = rot


def _canonical(walk: tuple[int, ...]):
    n = len(walk)
    if n <= 1:
        return walk, 0
    best, best_i = walk, 0
    for i in range(1, n):
        cand = walk[i:] + walk[:i]
        if cand < best:
            best, best_i = cand, i
    return best, best_i


def oracle_min_area(cx: Complex, loop: Sequence[int], area_cap: int):
    """Minimal diagram area for the loop, or None if above the cap.

    Breadth-first peeling search: each level removes one cell along an arc
    through a forced anchor edge, then cancels backtracks. The peel position
    depends only on the walk, so every filling is reachable by some branch.
    """
    found = _search(cx, loop, area_cap)
    return found[0] if found else None


def _normalize_loop(cx: Complex, loop: Sequence[int]) -> tuple[int, ...]:
    w = list(loop)
    if len(w) >= 2 and w[0] == w[-1]:
        w = w[:-1]
    if not w:
        raise ValueError("empty loop")
    for v in w:
        if v not in cx.vertex_set:
            raise ValueError(f"loop vertex {v} not in complex")
    n = len(w)
    if n > 1:
        for i in range(n):
            if not cx.has_edge(w[i], w[(i + 1) % n]):
                raise ValueError(f"loop step ({w[i]},{w[(i+1)%n]}) is not an edge")
    return tuple(w)


def _search(cx: Complex, loop: Sequence[int], area_cap: int):
    walk0 = _normalize_loop(cx, loop)
    index = cx._cached("dcidx", lambda: _directed_cell_index(cx))
    m_max = max((len(c) for c in cx.cells), default=3)
    len_bound = len(walk0) + max(0, m_max - 2) * max(area_cap, 0)
    reduced0, trace0 = _reduce_walk(walk0)
    canon0, rot0 = _canonical(reduced0)
    nodes = {canon0: _SearchNode(None, None, trace0, rot0)}
    if len(canon0) == 1:
        return 0, canon0, nodes, walk0
    frontier = [canon0]
    for level in range(1, area_cap + 1):
        nxt = []
        for state in frontier:
            for rho, ell, cid, q in _splice_moves(cx, state, index):
                raw = _apply_splice(state, rho, ell, q)
                reduced, trace = _reduce_walk(raw)
                if len(reduced) > len_bound:
                    continue
                canon, rot = _canonical(reduced)
                if canon in nodes:
                    continue
                nodes[canon] = _SearchNode(state, (rho, ell, cid, q), trace, rot)
                if len(canon) == 1:
                    return level, canon, nodes, walk0
                nxt.append(canon)
        frontier = nxt
        if not frontier:
            break
    return None


def reduced_diagram_search(cx: Complex, loop: Sequence[int], area_cap: int) -> DiscDiagram:
    """Area-minimal diagram with the given boundary walk, by exhaustive search."""
    found = _search(cx, loop, area_cap)
    if found is None:
        raise NotFillable(f"no filling with area <= {area_cap}", area_cap=area_cap)
    _, goal, nodes, walk0 = found
    return _rebuild(cx, goal, nodes, walk0)


def _rebuild(cx: Complex, goal, nodes, walk0) -> DiscDiagram:
    # chain of states from the initial one down to the goal
    chain = []
    state = goal
    while state is not None:
        node = nodes[state]
        chain.append((state, node))
        state = node.parent
    chain.reverse()  # chain[0] is the initial state
    # start from the single vertex of the goal state
    next_id = 0
    vmap = {}

    def fresh(tv):
        nonlocal next_id
        vid = next_id
        next_id += 1
        vmap[vid] = tv
        return vid

    bnd = [fresh(goal[0])]
    raw_cells = []
    extra_edges = []
    for state, node in reversed(chain):
        # undo the canonical rotation: bnd currently aligned with `state`
        rot = node.rot
        bnd = bnd[-rot:] + bnd[:-rot] if rot else bnd
        # undo the normalization ops, last first
        for op in reversed(node.trace):
            if op[0] == "d2":
                vid = fresh(op[1])
                extra_edges.append(edge_key(bnd[0], vid))
                bnd = [bnd[0], vid]
            elif op[0] == "del":
                _, j, tv = op
                vid = fresh(tv)
                anchor = bnd[(j - 1) % len(bnd)]
                extra_edges.append(edge_key(anchor, vid))
                bnd = bnd[:j] + [vid, anchor] + bnd[j:]
            else:  # ("rot", k): invert the left rotation
                k = op[1]
                bnd = bnd[-k:] + bnd[:-k]
        if node.move is None:
            continue
        # undo the splice: glue the cell back along q, exposing the arc p
        rho, ell, cid, q = node.move
        prev_state = node.parent
        n_prev = len(prev_state)
        if ell == n_prev:
            p_vertices = [prev_state[(rho + k) % n_prev] for k in range(n_prev)]
            p_vertices.append(prev_state[rho])
        else:
            p_vertices = [prev_state[(rho + k) % n_prev] for k in range(ell + 1)]
        k_q = len(q) - 1  # number of q edges = m - ell
        q_ids = [bnd[i] for i in range(k_q + 1)]
        new_ids = [fresh(tv) for tv in p_vertices[1:-1]]
        cell_walk = tuple(q_ids) + tuple(reversed(new_ids))
        raw_cells.append((cell_walk, cid))
        p_ids = [q_ids[0]] + new_ids + [q_ids[-1]]
        if ell == n_prev:
            bnd = p_ids[:-1]
        else:
            bnd = p_ids[:-1] + bnd[k_q:]
        # undo the pre-splice rotation by rho
        if rho:
            bnd = bnd[-rho:] + bnd[:-rho]
    # bnd is now aligned with the original input walk; spur trees were
    # rebuilt through the traces above
    d = build_diagram(cx, raw_cells, vmap, extra_edges=extra_edges,
                      boundary=tuple(bnd))
    return d
