import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from afglimm.generators import dyadic_sample, example, seq_point
from afglimm.presentation import (PointSpec, PresentationError, QuotientPresentation,
                                  SampledSpace, SamplePoint, build_from_samples, cell_path,
                                  leftmost_point, persistent_touch, point_classes, validate)
from conftest import two_blocks

EXAMPLES = ["point", "convseq", "cantor-interval", "fan", "fan:blocks=3"]


def load(name, H):
    from afglimm.generators import parse_example
    return parse_example(name).presentation(H)


@pytest.mark.parametrize("name", EXAMPLES)
@pytest.mark.parametrize("H", [1, 2, 6])
def test_examples_validate(name, H):
    rep = validate(load(name, H))
    assert rep, rep.to_json()


def test_two_blocks_validates():
    assert validate(two_blocks())


def test_cell_with_two_blocks_is_flagged():
    p = QuotientPresentation([[("a", 1, None)], [("b", 2, "a")]], [[], []])
    msgs = [v.rule for v in validate(p).violations]
    assert any("birth row has a parent" in m for m in msgs)


def test_childless_cell_is_flagged():
    p = QuotientPresentation([[("a", 1, None), ("b", 1, None)], [("c", 1, "a")]], [[], []])
    rep = validate(p)
    assert not rep and rep.violations[0].cells == ("b",)


def test_touch_needs_touching_children():
    rows = [[("a", 1, None), ("b", 1, None)], [("c", 1, "a"), ("d", 1, "b")]]
    rep = validate(QuotientPresentation(rows, [[("a", "b")], []]))
    assert any("downward" in v.rule for v in rep.violations)


def test_touch_needs_touching_parents():
    rows = [[("a", 1, None), ("b", 1, None)], [("c", 1, "a"), ("d", 1, "b")]]
    rep = validate(QuotientPresentation(rows, [[], [("c", "d")]]))
    assert any("upward" in v.rule for v in rep.violations)


def test_missing_block_is_flagged():
    p = QuotientPresentation([[("a", 1, None)], [("b", 1, "a")]], [[], []], total_blocks=2)
    assert any("block 2 is empty" in v.rule for v in validate(p).violations)


def test_unknown_parent_rejected():
    with pytest.raises(PresentationError):
        QuotientPresentation([[("a", 1, None)], [("b", 1, "zz")]], [[], []])


def test_touch_on_unknown_cell_rejected():
    with pytest.raises(PresentationError):
        QuotientPresentation([[("a", 1, None)]], [[("a", "q")]])


@pytest.mark.parametrize("name", EXAMPLES)
def test_json_round_trip(name):
    p = load(name, 5)
    q = QuotientPresentation.from_json(json.loads(p.dumps()))
    assert q.dumps() == p.dumps()


def test_json_rejects_gaps():
    data = load("point", 3).to_json()
    data["rows"][1]["k"] = 7
    with pytest.raises(PresentationError):
        QuotientPresentation.from_json(data)


def test_json_rejects_wrong_horizon():
    data = load("point", 3).to_json()
    data["horizon"] = 4
    with pytest.raises(PresentationError):
        QuotientPresentation.from_json(data)


def test_truncate_keeps_prefix():
    p = load("cantor-interval", 6)
    assert p.truncate(4).dumps() == load("cantor-interval", 4).dumps().replace('"horizon": 4', '"horizon": 4')


# -- points -------------------------------------------------------------------

def test_cell_path_binary_digits():
    p = load("cantor-interval", 4)
    assert cell_path(p, PointSpec(1, 0, (1, 0), (1,))) == [0, 1, 2, 5]


def test_leftmost_point_passes_through_cell():
    p = load("fan", 6)
    for k in range(1, 7):
        for c in p.cells[k - 1]:
            x = leftmost_point(p, k, c.pos)
            assert cell_path(p, x, k)[-1] == c.pos


def test_bad_child_choice_rejected():
    with pytest.raises(PresentationError):
        cell_path(load("cantor-interval", 3), PointSpec(1, 0, (2,), (0,)))


def test_half_written_two_ways_is_identified():
    p = load("cantor-interval", 10)
    v = persistent_touch(p, PointSpec(1, 0, (0,), (1,)), PointSpec(1, 0, (1,), (0,)))
    assert v.status == "identified"


def test_quarters_separate():
    p = load("cantor-interval", 10)
    v = persistent_touch(p, PointSpec(1, 0, (0, 1), (0,)), PointSpec(1, 0, (1, 1), (0,)))
    assert v.status == "separated" and v.row == 3


def test_late_period_is_unknown():
    p = load("cantor-interval", 6)
    v = persistent_touch(p, PointSpec(1, 0, (0, 1, 1), (1,)), PointSpec(1, 0, (1, 0, 0), (0,)))
    assert v.status == "unknown"


def test_dyadic_cloud_has_nine_classes():
    part = point_classes(load("cantor-interval", 12), dyadic_sample(3))
    assert len(dyadic_sample(3)) == 16
    assert len(part.classes) == 9 and not part.unknown_pairs


def test_fan_limits_are_glued():
    p = load("fan", 10)
    limits = [PointSpec(b, 0, (), (1,)) for b in (1, 2, 3)]
    part = point_classes(p, limits + [seq_point(1, 2)])
    assert part.classes == [[0, 1, 2], [3]]


@given(st.integers(1, 7), st.integers(1, 7))
def test_touch_is_symmetric(i, j):
    p = load("convseq", 10)
    a, b = seq_point(1, i), seq_point(1, j)
    assert persistent_touch(p, a, b).status == persistent_touch(p, b, a).status
    assert (persistent_touch(p, a, b).status == "identified") == (i == j)


# -- ingestion ----------------------------------------------------------------

def space(values, blocks=None, labels=None):
    pts = []
    for i, v in enumerate(values):
        pts.append(SamplePoint(i, blocks[i] if blocks else 1, labels[i] if labels else i,
                               tuple(v) if isinstance(v, tuple) else (v,)))
    return SampledSpace(pts)


def test_single_point_cloud_is_a_chain():
    p = build_from_samples(space([0.3]), 5)
    assert [len(r) for r in p.cells] == [1] * 5
    assert validate(p)


def test_far_points_split_on_first_row():
    p = build_from_samples(space([0.0, 1.0]), 4)
    assert [len(r) for r in p.cells] == [2, 2, 2, 2]
    assert not p.touches(1, 0, 1)


def test_close_points_split_later():
    p = build_from_samples(space([0.0, 0.3]), 4)
    assert [len(r) for r in p.cells] == [1, 2, 2, 2]


def test_dyadic_cloud_ingests_to_nine_cells():
    from afglimm.functions import dyadic_coordinate
    pts = dyadic_sample(3)
    vals = [float(dyadic_coordinate(x)) for x in pts]
    p = build_from_samples(space(vals, labels=[str(v) for v in vals]), 6)
    assert validate(p)
    assert len(p.cells[-1]) == 9


def test_shared_label_makes_cells_touch():
    p = build_from_samples(space([0.0, 1.0], labels=["x", "x"]), 4)
    assert validate(p)
    assert all(p.touches(k, 0, 1) for k in range(1, 5))


def test_blocks_enter_on_their_row():
    p = build_from_samples(space([0.0, 0.5], blocks=[1, 2]), 3)
    assert [c.block for c in p.cells[0]] == [1]
    assert sorted(c.block for c in p.cells[1]) == [1, 2]
    assert validate(p)


def test_ingest_rejects_ragged_values():
    with pytest.raises(PresentationError):
        build_from_samples(SampledSpace([SamplePoint(0, 1, 0, (0.0,)),
                                         SamplePoint(1, 1, 1, (0.0, 1.0))]), 3)


def test_ingest_rejects_missing_block():
    with pytest.raises(PresentationError):
        build_from_samples(space([0.0, 1.0], blocks=[1, 3]), 4)


def test_sample_json():
    s = SampledSpace.from_json({"points": [{"id": "a", "block": 1, "values": [0.5]}]})
    assert s.points[0].label == "a" and s.n_functions == 1
    with pytest.raises(PresentationError):
        SampledSpace.from_json({"points": [{"id": "a"}]})
