import pytest

from npc.complex_core import Presentation, is_flag, validate
from npc.errors import InvalidSpec, NotC16, NotSimplicial
from npc.generators import (gen_cayley_ball, gen_equilateral_disc,
                            gen_flat_parallelogram, gen_join_lines,
                            gen_ladder_diagram, gen_polygon, gen_tree,
                            genus2_presentation)


@pytest.mark.parametrize("r,counts", [
    (0, (1, 0, 0)),
    (1, (7, 12, 6)),
    (2, (19, 42, 24)),
    (3, (37, 90, 54)),
])
def test_equilateral_disc_counts(r, counts):
    cx = gen_equilateral_disc(r)
    assert (len(cx.vertices), len(cx.edges), len(cx.cells)) == counts
    # Euler characteristic of a disc
    if r >= 1:
        assert len(cx.vertices) - len(cx.edges) + len(cx.cells) == 1
    assert len(cx.vertices) == 1 + 3 * r * (r + 1)
    assert len(cx.cells) == 6 * r * r


def test_tree_counts():
    cx = gen_tree(2, 3)
    assert (len(cx.vertices), len(cx.edges), len(cx.cells)) == (15, 14, 0)


def test_polygon_counts():
    cx = gen_polygon(7)
    assert (len(cx.vertices), len(cx.edges), len(cx.cells)) == (7, 7, 1)
    with pytest.raises(InvalidSpec):
        gen_polygon(2)


def test_parallelogram_counts():
    cx = gen_flat_parallelogram(2, 3)
    assert len(cx.vertices) == 12
    assert len(cx.cells) == 12  # 2pq


def test_join_lines_counts():
    cx = gen_join_lines(1)
    assert (len(cx.vertices), len(cx.edges), len(cx.cells)) == (6, 13, 12)


def test_generators_deterministic():
    a = gen_equilateral_disc(2)
    b = gen_equilateral_disc(2)
    assert a == b
    assert gen_join_lines(2) == gen_join_lines(2)
    assert gen_cayley_ball(genus2_presentation(), 2) == \
        gen_cayley_ball(genus2_presentation(), 2)


def test_cayley_ball_surface_r2(surface):
    ball = gen_cayley_ball(surface, 2)
    # free-group growth 1 + 8 + 8*7 with no identifications below the girth
    assert len(ball.vertices) == 65
    assert len(ball.edges) == 64
    assert len(ball.cells) == 0
    assert validate(ball).verdict


def test_cayley_ball_free_group():
    free = Presentation.create(("a", "b"), ())
    ball = gen_cayley_ball(free, 2)
    assert len(ball.vertices) == 17
    assert len(ball.edges) == 16
    assert len(ball.cells) == 0


def test_cayley_ball_rejects_non_c16():
    with pytest.raises(NotC16):
        gen_cayley_ball(Presentation.create(("a", "b"), ("ababab",)), 2)


@pytest.mark.slow
def test_cayley_ball_surface_r4_has_octagons(surface):
    ball = gen_cayley_ball(surface, 4)
    assert len(ball.cells) == 8
    assert all(len(w) == 8 for w in ball.cells)
    assert validate(ball).verdict
    # contractible ball
    assert len(ball.vertices) - len(ball.edges) + len(ball.cells) == 1


def test_ladder_generator():
    diagram, target = gen_ladder_diagram([7, 7, 7])
    from npc.diagram import classify, ladder_decomposition, validate_diagram
    assert validate_diagram(diagram).verdict
    order = ladder_decomposition(diagram)
    assert order is not None and len(order) == 3
    cls = classify(diagram)
    assert cls.kind == "ladder"


def test_ladder_generator_single_cell():
    diagram, target = gen_ladder_diagram([7])
    from npc.diagram import classify
    assert classify(diagram).kind == "single_cell"


def test_ladder_generator_invalid_spec():
    with pytest.raises(InvalidSpec):
        gen_ladder_diagram([7, 2])
    with pytest.raises(InvalidSpec):
        gen_ladder_diagram([7, 7, 7], gluings=[(0, 2)])
