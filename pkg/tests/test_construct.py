import pytest
from hypothesis import given, strategies as st

from afglimm.construct import (ConstructionError, assign_indices, block_ideal, canonical_point,
                               construct, minimal_block, varphi)
from afglimm.diagram import PathSeq, Vertex
from afglimm.generators import parse_example, seq_point
from afglimm.ideals import is_ideal_subdiagram, leftmost_path_to, truncated_primitives
from afglimm.presentation import PointSpec, QuotientPresentation
from conftest import two_blocks


def load(name, H):
    return parse_example(name).presentation(H)


def binary_tree(H, touch=False):
    rows, pairs = [], []
    for k in range(1, H + 1):
        n = 2 ** (k - 1)
        rows.append([(j, 1, None if k == 1 else j // 2) for j in range(n)])
        pairs.append([(j, j + 1) for j in range(n - 1)] if touch else [])
    return QuotientPresentation(rows, pairs, total_blocks=1)


def test_binary_splitting_indices():
    c = construct(binary_tree(5))
    for k in range(1, 5):
        for j in range(1, 2 ** (k - 1) + 1):
            kids = [c.table.index[k][ch] for ch in c.presentation.children(k, c.table.cell[k - 1][j - 1])]
            assert kids == [2 * j - 1, 2 * j]


def test_without_touch_the_diagram_is_the_refinement_forest():
    c = construct(binary_tree(4))
    for k, j in ((1, 1), (2, 2), (3, 3)):
        assert [v.index for v in c.diagram.children(Vertex(k, j))] == [2 * j - 1, 2 * j]


def test_touch_adds_the_left_neighbour():
    c = construct(load("cantor-interval", 5))
    assert [v.index for v in c.diagram.children(Vertex(3, 2))] == [2, 3, 4]
    assert [v.index for v in c.diagram.children(Vertex(3, 1))] == [1, 2]
    for k in range(2, 5):
        for j in range(2, 2 ** (k - 1) + 1):
            assert [v.index for v in c.diagram.children(Vertex(k, j))] == [2 * j - 2, 2 * j - 1, 2 * j]


def test_block_boundaries():
    t = assign_indices(two_blocks())
    assert t.r_of(1, 1) == 1 and t.r_of(1, 2) == 1
    assert t.r_of(2, 1) == 1 and t.r_of(2, 2) == 2
    c = construct(two_blocks())
    assert c.block_of(Vertex(3, 1)) == 1 and c.block_of(Vertex(3, 2)) == 2


def test_block_ideals_are_ideals():
    c = construct(two_blocks())
    lam1 = block_ideal(c, 1)
    assert lam1.vertices == {Vertex(k, 1) for k in range(1, 6)}
    assert len(block_ideal(c, 2)) == 9


@pytest.mark.parametrize("name", ["point", "convseq", "cantor-interval", "fan", "fan:blocks=3"])
def test_construction_invariants(name):
    c = construct(load(name, 8))
    p = c.presentation
    for k in range(1, 9):
        assert len(c.diagram.vertices(k)) == len(p.cells[k - 1])
        blocks = [c.block_of(Vertex(k, j)) for j in range(1, len(p.cells[k - 1]) + 1)]
        assert blocks == sorted(blocks)
    for n in range(1, min(p.n_blocks, 8) + 1):
        assert is_ideal_subdiagram(c.diagram, block_ideal(c, n).mask)


def test_row_sizes():
    assert [len(r) for r in construct(load("fan", 5)).table.cell] == [1, 3, 6, 10, 15]
    assert [len(r) for r in construct(load("cantor-interval", 5)).table.cell] == [1, 2, 4, 8, 16]


def test_point_has_a_single_path():
    c = construct(load("point", 6))
    assert all(len(c.diagram.vertices(k)) == 1 for k in range(1, 7))
    assert len(c.diagram.edges()) == 5


def test_invalid_presentation_is_refused():
    p = QuotientPresentation([[("a", 1, None), ("b", 1, None)], [("c", 1, "a")]], [[], []])
    with pytest.raises(ConstructionError):
        construct(p)


def test_point_path_follows_cells():
    c = construct(load("cantor-interval", 4))
    path = c.point_path(PointSpec(1, 0, (1, 0), (1,)))
    assert [v.index for v in path.vertices] == [1, 2, 3, 6]
    assert c.diagram.is_complete_connected(path)


def test_varphi_of_half_agrees_on_both_expansions():
    c = construct(load("cantor-interval", 10))
    a = varphi(c, PointSpec(1, 0, (0,), (1,)))
    b = varphi(c, PointSpec(1, 0, (1,), (0,)))
    # two primitive ideals: the diagram alone does not identify them
    assert a != b


def test_varphi_of_separated_points_differ():
    c = construct(load("convseq", 8))
    assert varphi(c, seq_point(1, 1)) != varphi(c, seq_point(1, 2))


def test_minimal_block_of_fan_points():
    c = construct(load("fan", 8))
    for b in (1, 2, 3):
        assert minimal_block(c, varphi(c, seq_point(b, 1))) == b
        # a glued limit keeps the block its representative was born in
        assert minimal_block(c, varphi(c, PointSpec(b, 0, (), (1,)))) == b


@given(st.integers(1, 5), st.integers(0, 2 ** 5 - 1))
def test_subordination_rows_are_ancestors(depth, m):
    # ancestors of a row-H cantor vertex include the path of every point in it
    H = 8
    c = construct(load("cantor-interval", H))
    bits = tuple(int(b) for b in format(m, "05b"))
    x = PointSpec(1, 0, bits, (0,))
    path = c.point_path(x)
    anc = c.diagram.ancestor_mask(c.diagram.mask([path.end]))
    assert all(anc[c.diagram.vid(v)] for v in path.vertices)


def test_canonical_point_of_a_point_path():
    c = construct(load("convseq", 10))
    x = seq_point(1, 3)
    cp = canonical_point(c, c.point_path(x))
    assert cp.stabilized and cp.point.block == 1
    assert c.point_path(cp.point).vertices == c.point_path(x).vertices


def test_canonical_point_of_leftmost_path_to_tail():
    c = construct(load("convseq", 9))
    tail = c.vertex_of(9, c.presentation.pos_of(9, "1.t"))
    cp = canonical_point(c, leftmost_path_to(c.diagram, tail))
    assert cp.point.prefix == (1,) * 8


def test_canonical_point_needs_a_gapless_path():
    c = construct(load("convseq", 5))
    with pytest.raises(ConstructionError):
        canonical_point(c, PathSeq((Vertex(1, 1), Vertex(3, 1))))


@pytest.mark.parametrize("name", ["convseq", "cantor-interval", "fan"])
def test_canonical_points_land_in_the_complement(name):
    c = construct(load(name, 7))
    for v, lam in truncated_primitives(c.diagram):
        cp = canonical_point(c, leftmost_path_to(c.diagram, v))
        comp = lam.complement_mask()
        assert all(comp[c.diagram.vid(u)] for u in cp.path.vertices if u.row <= cp.stable_until)
