import random

import pytest

from npc.complex_core import Complex
from npc.generators import (equilateral_coords, gen_equilateral_disc,
                            gen_flat_parallelogram, gen_join_lines,
                            gen_polygon, gen_tree, genus2_presentation)


@pytest.fixture(scope="session")
def disc1():
    return gen_equilateral_disc(1)


@pytest.fixture(scope="session")
def disc2():
    return gen_equilateral_disc(2)


@pytest.fixture(scope="session")
def disc3():
    return gen_equilateral_disc(3)


@pytest.fixture(scope="session")
def disc4():
    return gen_equilateral_disc(4)


@pytest.fixture(scope="session")
def surface():
    return genus2_presentation()


@pytest.fixture(scope="session")
def four_cycle():
    return Complex.simplicial([0, 1, 2, 3], [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture(scope="session")
def six_cycle():
    return Complex.simplicial(range(6), [(i, (i + 1) % 6) for i in range(6)])


def coords_map(r):
    """vertex id <-> lattice coordinate helpers for gen_equilateral_disc(r)."""
    c = equilateral_coords(r)
    return c, {v: k for k, v in c.items()}


def to_networkx(cx):
    import networkx as nx
    g = nx.Graph()
    g.add_nodes_from(cx.vertices)
    g.add_edges_from(e for e in cx.edges if e[0] != e[1])
    return g


def random_polyiamond_diagram(target_radius, n_cells, rng):
    """Random non-singular triangulated disc diagram over a big disc.

    Grows a connected simply-connected set of lattice triangles; returns the
    DiscDiagram, or None if the growth got stuck.
    """
    from npc.diagram import build_diagram, validate_diagram
    from npc.generators import _hex_norm

    disc = gen_equilateral_disc(target_radius)
    coords, inv = coords_map(target_radius)

    def tri_walk(kind, x, y):
        if kind == "up":
            return ((x, y), (x + 1, y), (x, y + 1))
        return ((x, y + 1), (x + 1, y), (x + 1, y + 1))

    def neighbours(kind, x, y):
        # lattice triangles sharing an edge
        if kind == "up":
            return [("down", x, y), ("down", x - 1, y), ("down", x, y - 1)]
        return [("up", x, y), ("up", x + 1, y), ("up", x, y + 1)]

    def in_disc(t):
        return all(_hex_norm(a, b) <= target_radius for a, b in tri_walk(*t))

    def build(cells):
        raw = []
        vmap = {}
        ids = {}
        for t in sorted(cells):
            walk = []
            for c in tri_walk(*t):
                if c not in ids:
                    ids[c] = len(ids)
                    vmap[ids[c]] = inv[c]
                walk.append(ids[c])
            tri = tuple(sorted(inv[c] for c in tri_walk(*t)))
            raw.append((tuple(walk), disc.cells.index(tri)))
        return build_diagram(disc, raw, vmap)

    start = ("up", 0, 0)
    cells = {start}
    for _ in range(n_cells * 8):
        if len(cells) >= n_cells:
            break
        frontier = sorted({n for t in cells for n in neighbours(*t)
                           if n not in cells and in_disc(n)})
        if not frontier:
            break
        cand = rng.choice(frontier)
        trial = cells | {cand}
        try:
            d = build(trial)
        except Exception:
            continue
        rep = validate_diagram(d)
        boundary_simple = len(set(d.boundary)) == len(d.boundary)
        if rep.verdict and boundary_simple:
            cells = trial
    d = build(cells)
    rep = validate_diagram(d)
    if rep.verdict and len(set(d.boundary)) == len(d.boundary):
        return d
    return None
