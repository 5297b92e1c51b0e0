import itertools
import random

import pytest

from npc.complex_core import Complex, Subcomplex
from npc.errors import CapExceeded, Disconnected
from npc.generators import (gen_equilateral_disc, gen_flat_parallelogram,
                            gen_join_lines, gen_polygon, gen_tree)
from npc.metric import (DeltaEstimate, OrientedGeodesic, count_geodesics,
                        delta_estimate, distance, distances,
                        embedded_cycles_up_to, enumerate_geodesics, interval,
                        is_convex, lex_geodesic, recheck_delta_witness)
from tests.conftest import coords_map, to_networkx


def test_path_graph_distance():
    path = Complex.simplicial([0, 1, 2], [(0, 1), (1, 2)])
    assert distance(path, 0, 2) == 2


def test_join_lines_diameter_two():
    # the 2-skeleton of the join has diameter 2 at every radius tried
    for r in (1, 2, 3):
        jl = gen_join_lines(r)
        assert max(max(distances(jl, v).values()) for v in jl.vertices) == 2


def test_disc_distances_match_networkx(disc2):
    nx = pytest.importorskip("networkx")
    g = to_networkx(disc2)
    for u in disc2.vertices[:7]:
        expect = nx.single_source_shortest_path_length(g, u)
        assert distances(disc2, u) == dict(expect)


def test_disconnected_raises():
    two = Complex.simplicial([0, 1], [])
    with pytest.raises(Disconnected):
        distance(two, 0, 1)


def test_interval_tree_is_unique_path():
    tree = gen_tree(2, 3)
    iv = interval(tree, 7, 8)
    assert iv.vertices == (3, 7, 8)


def test_interval_join_lines_sizes():
    # frozen from the exhaustive distance-sum oracle; the r=1 case has the
    # extra midvertex, afterwards the size is 2r+3 and the slope is exactly 2
    sizes = {}
    for r in (1, 2, 3, 4):
        jl = gen_join_lines(r)
        nx = pytest.importorskip("networkx")
        g = to_networkx(jl)
        import networkx
        du = dict(networkx.single_source_shortest_path_length(g, 0))
        dv = dict(networkx.single_source_shortest_path_length(g, 2 * r))
        oracle = {x for x in jl.vertices if du[x] + dv[x] == du[2 * r]}
        iv = interval(jl, 0, 2 * r)
        assert set(iv.vertices) == oracle
        sizes[r] = len(iv)
    assert sizes == {1: 6, 2: 7, 3: 9, 4: 11}


def test_interval_parallelogram_is_full_box():
    par = gen_flat_parallelogram(2, 3)
    coords = sorted((x, y) for x in range(3) for y in range(4))
    ids = {c: i for i, c in enumerate(coords)}
    iv = interval(par, ids[(0, 0)], ids[(2, 3)])
    assert set(iv.vertices) == set(ids.values())


def test_enumerate_geodesics_tree_unique():
    tree = gen_tree(2, 3)
    assert len(enumerate_geodesics(tree, 7, 14)) == 1


def test_enumerate_geodesics_hexagon_antipodal(six_cycle):
    assert len(enumerate_geodesics(six_cycle, 0, 3)) == 2


def test_enumerate_geodesics_parallelogram_count():
    par = gen_flat_parallelogram(2, 2)
    coords = sorted((x, y) for x in range(3) for y in range(3))
    ids = {c: i for i, c in enumerate(coords)}
    gs = enumerate_geodesics(par, ids[(0, 0)], ids[(2, 2)])
    assert len(gs) == 6  # binomial(4, 2)
    assert count_geodesics(par, ids[(0, 0)], ids[(2, 2)]) == 6


def test_enumerate_geodesics_cap_exceeded(six_cycle):
    with pytest.raises(CapExceeded):
        enumerate_geodesics(six_cycle, 0, 3, cap=1)


def test_geodesics_match_networkx(disc2):
    nx = pytest.importorskip("networkx")
    g = to_networkx(disc2)
    rng = random.Random(5)
    verts = list(disc2.vertices)
    for _ in range(20):
        u, v = rng.sample(verts, 2)
        mine = {tuple(p.vertices) for p in enumerate_geodesics(disc2, u, v)}
        theirs = {tuple(p) for p in nx.all_shortest_paths(g, u, v)}
        assert mine == theirs


def test_interval_equals_union_of_geodesics(disc2):
    rng = random.Random(9)
    verts = list(disc2.vertices)
    for _ in range(15):
        u, v = rng.sample(verts, 2)
        union = set()
        for p in enumerate_geodesics(disc2, u, v):
            union.update(p.vertices)
        assert union == set(interval(disc2, u, v).vertices)


def test_geodesic_count_multiplies_across_cut_vertex():
    # two diamonds chained at a cut vertex: counts multiply
    cx = Complex.simplicial(
        range(7),
        [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)])
    assert count_geodesics(cx, 0, 3) == 2
    assert count_geodesics(cx, 3, 6) == 2
    assert count_geodesics(cx, 0, 6) == 4


def test_oriented_geodesic_certified(disc2):
    with pytest.raises(ValueError):
        OrientedGeodesic.create(disc2, (0, 18))
    g = lex_geodesic(disc2, 0, 18)
    assert len(g) == distance(disc2, 0, 18)


def test_is_convex_examples(six_cycle, disc1):
    assert is_convex(disc1, Subcomplex.create(disc1, {0}, (), ())).verdict
    e = disc1.edges[0]
    assert is_convex(disc1, Subcomplex.spanned_by_edges(disc1, [e])).verdict
    k = Subcomplex.create(six_cycle, {0, 3}, (), ())
    rep = is_convex(six_cycle, k)
    assert not rep.verdict
    assert len(rep.witness["geodesic"]) == 4  # a length-3 geodesic


def test_delta_tree_zero():
    tree = gen_tree(2, 3)
    assert delta_estimate(tree, "slim").value == 0.0
    assert delta_estimate(tree, "4pt").value == 0.0


def test_delta_single_vertex():
    cx = Complex.simplicial([0], [])
    assert delta_estimate(cx, "slim").value == 0.0
    assert delta_estimate(cx, "4pt").value == 0.0


def _naive_four_point(cx):
    best = 0.0
    dist = {v: cx.distances(v) for v in cx.vertices}
    for a, b, c, d in itertools.combinations(cx.vertices, 4):
        s = sorted([dist[a][b] + dist[c][d], dist[a][c] + dist[b][d],
                    dist[a][d] + dist[b][c]], reverse=True)
        best = max(best, (s[0] - s[1]) / 2.0)
    return best


def test_delta_hexagon_matches_four_point_oracle(six_cycle):
    est = delta_estimate(six_cycle, "4pt")
    assert est.value == _naive_four_point(six_cycle)
    assert recheck_delta_witness(six_cycle, est) == est.value


def test_delta_half_integer(six_cycle, disc1):
    for cx in (six_cycle, disc1):
        for method in ("slim", "4pt"):
            est = delta_estimate(cx, method)
            assert (2 * est.value) == int(2 * est.value)
            assert recheck_delta_witness(cx, est) == est.value


def test_embedded_cycles_up_to(six_cycle, four_cycle):
    assert list(embedded_cycles_up_to(four_cycle, 3)) == []
    cycles6 = list(embedded_cycles_up_to(six_cycle, 6))
    assert cycles6 == [(0, 1, 2, 3, 4, 5)]
    tree = gen_tree(3, 3)
    assert list(embedded_cycles_up_to(tree, 12)) == []
