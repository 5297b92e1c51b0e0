import itertools

import pytest

from npc.complex_core import (Complex, Presentation, Subcomplex, is_flag,
                              neighborhood, star, validate)
from npc.errors import KindMismatch, UnknownVertex
from npc.generators import gen_equilateral_disc, gen_join_lines, gen_tree


def test_validate_single_triangle():
    cx = Complex.simplicial([1, 2, 3], [(1, 2), (2, 3), (1, 3)], [(1, 2, 3)])
    assert validate(cx).verdict


def test_validate_loop_edge():
    cx = Complex.simplicial([1, 2], [(1, 1), (1, 2)])
    rep = validate(cx)
    assert not rep.verdict
    assert rep.witness == {"loop_edge": (1, 1)}


def test_validate_parallel_edges():
    cx = Complex(kind="simplicial", vertices=(1, 2), edges=((1, 2), (1, 2)), cells=())
    assert not validate(cx).verdict


def test_validate_polygon_missing_edge():
    cx = Complex.polygonal([1, 2, 3, 4], [(1, 2), (2, 3), (3, 4)], [(1, 2, 3, 4)])
    rep = validate(cx)
    assert not rep.verdict
    assert rep.witness["cell"] == 0


def test_validate_cell_not_embedded():
    cx = Complex.simplicial([1, 2, 3], [(1, 2), (2, 3), (1, 3)], [(1, 2, 2)])
    assert not validate(cx).verdict


def test_is_flag_empty_clique():
    cx = Complex.simplicial([1, 2, 3], [(1, 2), (2, 3), (1, 3)])
    rep = is_flag(cx)
    assert not rep.verdict
    assert rep.witness == {"empty_clique": [1, 2, 3]}


def test_is_flag_disc_vs_clique_oracle(disc1):
    # independent oracle: enumerate 3-cliques directly and compare
    adj = {v: set(disc1.adjacency[v]) for v in disc1.vertices}
    cliques = {tuple(sorted(t)) for t in itertools.combinations(disc1.vertices, 3)
               if t[1] in adj[t[0]] and t[2] in adj[t[0]] and t[2] in adj[t[1]]}
    assert cliques == set(disc1.cells)
    assert is_flag(disc1).verdict


def test_is_flag_six_cycle_vacuous(six_cycle):
    assert is_flag(six_cycle).verdict


def test_is_flag_rejects_polygonal():
    from npc.generators import gen_polygon
    with pytest.raises(KindMismatch):
        is_flag(gen_polygon(5))


def test_star_center_is_whole_disc(disc1):
    from tests.conftest import coords_map
    coords, inv = coords_map(1)
    s = star(disc1, inv[(0, 0)])
    assert s.vertices == frozenset(disc1.vertices)
    assert s.edges == frozenset(disc1.edges)
    assert len(s.cell_ids) == 6


def test_star_leaf_of_path():
    path = Complex.simplicial([0, 1, 2], [(0, 1), (1, 2)])
    s = star(path, 2)
    assert s.vertices == frozenset({1, 2})
    assert s.edges == frozenset({(1, 2)})


def test_star_unknown_vertex(disc1):
    with pytest.raises(UnknownVertex):
        star(disc1, 999)


def test_neighborhood_of_vertex_in_tree_is_star():
    tree = gen_tree(2, 3)
    for v in (0, 3, 7):
        k = Subcomplex.create(tree, {v}, (), ())
        nb = neighborhood(tree, k)
        st = star(tree, v)
        assert nb.vertices == st.vertices
        assert nb.edges == st.edges


def test_neighborhood_monotone(disc2):
    k = star(disc2, disc2.vertices[0])
    nb = neighborhood(disc2, k)
    assert k.issubset(nb)


def test_subcomplex_face_closure_enforced(disc1):
    with pytest.raises(ValueError):
        Subcomplex.create(disc1, {0}, {disc1.edges[0]}, ())


def test_presentation_validation():
    Presentation.create(("a", "b"), ("abAB",))
    with pytest.raises(ValueError):
        Presentation.create(("a", "a"), ())
    with pytest.raises(ValueError):
        Presentation.create(("a",), ("aA",))
    with pytest.raises(ValueError):
        Presentation.create(("a", "b"), ("abA",))  # not cyclically reduced
    with pytest.raises(ValueError):
        Presentation.create(("a",), ("",))


def test_generators_pass_validate_and_flag():
    fixtures = [gen_equilateral_disc(r) for r in range(4)]
    fixtures += [gen_tree(2, 3), gen_join_lines(1), gen_join_lines(2)]
    for cx in fixtures:
        assert validate(cx).verdict
        if cx.kind == "simplicial":
            assert is_flag(cx).verdict
