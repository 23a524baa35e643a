import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from afglimm.diagram import BratteliDiagram, DiagramError, PathSeq, Vertex
from afglimm.ideals import (DESCENDANT_CLOSED, CentralElement, IdealError, IdealSubdiagram,
                            block_unit_quotient_norm, central_norm_distance, compare_path_ideals,
                            empty_ideal, full_ideal, generated_ideal, is_ideal_subdiagram,
                            is_prime_complement, join, largest_ideal_avoiding_path, meet,
                            meet_join, truncated_primitives)
from conftest import chain, diagrams, merging_roots, two_chains
import oracles


def path(*vs, stable_from=None):
    return PathSeq(tuple(Vertex(*v) for v in vs), stable_from)


def test_empty_and_full_are_ideals():
    d = merging_roots()
    assert is_ideal_subdiagram(d, [])
    assert is_ideal_subdiagram(d, d.vertices())


def test_lonely_root_violates_descendant_closure():
    res = is_ideal_subdiagram(merging_roots(), [(1, 1)])
    assert not res and res.vertex == (1, 1) and res.axiom == DESCENDANT_CLOSED


def test_constructor_checks_axioms():
    with pytest.raises(IdealError):
        IdealSubdiagram(merging_roots(), [(1, 1)])


def test_last_row_is_unconstrained():
    # (2,1) has no children yet need not be in an ideal
    assert is_ideal_subdiagram(chain(2), [])


def test_saturation_pulls_in_parent():
    res = is_ideal_subdiagram(chain(3), [(3, 1)])
    assert not res and res.vertex == (2, 1)


@given(diagrams())
def test_lattice_identities(d):
    zero, one = empty_ideal(d), full_ideal(d)
    for lam in (zero, one, generated_ideal(d, d.vertices(d.horizon)[:1])):
        assert meet(lam, zero) == zero and join(lam, zero) == lam
        assert meet(lam, lam) == lam == join(lam, lam)
        assert meet(lam, one) == lam and join(lam, one) == one


@given(diagrams(max_rows=3, max_width=3), st.randoms(use_true_random=False))
def test_meet_join_match_brute_force(d, rnd):
    verts, pos, ideals = oracles.all_ideals(d)
    pick = [rnd.choice(ideals) for _ in range(6)]
    for a in pick:
        for b in pick:
            A = IdealSubdiagram(d, [v for i, v in enumerate(verts) if a >> i & 1])
            B = IdealSubdiagram(d, [v for i, v in enumerate(verts) if b >> i & 1])
            m, j = meet_join(A, B)
            assert oracles.to_bits(pos, m.vertices) == oracles.greatest_below(ideals, a & b)
            assert oracles.to_bits(pos, j.vertices) == oracles.least_above(ideals, a | b)


@given(diagrams(max_rows=3, max_width=3))
def test_axiom_check_matches_brute_force(d):
    verts, pos, kids = oracles.adjacency(d)
    for s in range(1 << len(verts)):
        members = [v for i, v in enumerate(verts) if s >> i & 1]
        assert bool(is_ideal_subdiagram(d, members)) == \
            oracles.is_ideal_bits(verts, kids, d.horizon, s)


def test_generated_ideal_is_least():
    d = merging_roots()
    lam = generated_ideal(d, [(2, 1)])
    # (1,1) and (1,2) have only the child (2,1), so saturation pulls them in
    assert lam.vertices == frozenset(d.vertices())


def test_single_path_avoided_by_nothing():
    d = chain(4)
    assert len(largest_ideal_avoiding_path(d, path((1, 1), (2, 1), (3, 1), (4, 1)))) == 0


def test_merging_roots_removes_both_roots():
    d = merging_roots(4)
    lam = largest_ideal_avoiding_path(d, path((1, 1), (2, 1), (3, 1), (4, 1)))
    verts, pos, ideals = oracles.all_ideals(d)
    avoid = oracles.to_bits(pos, [(1, 1), (2, 1), (3, 1), (4, 1)])
    brute = max((s for s in ideals if s & avoid == 0), key=lambda s: bin(s).count("1"))
    assert oracles.to_bits(pos, lam.vertices) == brute == 0


def test_disjoint_chains_keep_other_chain():
    d = two_chains(4)
    lam = largest_ideal_avoiding_path(d, path(*[(k, 1) for k in range(1, 5)]))
    assert lam.vertices == {Vertex(k, 2) for k in range(1, 5)}


def test_avoiding_needs_connected_path():
    with pytest.raises(IdealError):
        largest_ideal_avoiding_path(two_chains(3), path((1, 1), (2, 2)))


def random_path(d, rnd):
    v = rnd.choice(d.vertices(1))
    vs = [v]
    while vs[-1].row < d.horizon:
        vs.append(rnd.choice(d.children(vs[-1])))
    return PathSeq(tuple(vs))


@given(diagrams(), st.randoms(use_true_random=False))
def test_avoiding_path_is_largest(d, rnd):
    verts, pos, ideals = oracles.all_ideals(d)
    p = random_path(d, rnd)
    lam = largest_ideal_avoiding_path(d, p)
    assert is_ideal_subdiagram(d, lam.mask)
    avoid = oracles.to_bits(pos, p.vertices)
    got = oracles.to_bits(pos, lam.vertices)
    assert got & avoid == 0
    assert all(s & ~got == 0 for s in ideals if s & avoid == 0)


@given(diagrams(), st.randoms(use_true_random=False))
def test_avoiding_path_depends_on_last_vertex(d, rnd):
    p = random_path(d, rnd)
    lam = largest_ideal_avoiding_path(d, p)
    assert lam.complement() == d.ancestors(p.end)


def test_prime_single_path_complement():
    assert is_prime_complement(empty_ideal(chain(5))).status == "yes"


def test_prime_disjoint_chains():
    d = two_chains(6)
    v = is_prime_complement(empty_ideal(d))
    assert v.status == "no"
    assert {w.index for w in v.witness} == {1, 2}


def test_prime_merging_roots():
    assert is_prime_complement(empty_ideal(merging_roots(3))).status == "yes"


def test_prime_short_horizon_is_unknown():
    # the chains have not kept their width long enough to call it
    assert is_prime_complement(empty_ideal(two_chains(3)), window=3).status == "unknown"


@given(diagrams())
def test_truncated_primitives_are_prime(d):
    for v, lam in truncated_primitives(d):
        assert is_ideal_subdiagram(d, lam.mask)
        assert v not in lam
        assert is_prime_complement(lam).status == "yes"


def test_descendant_set_disagrees_on_merging_roots():
    cmp_ = compare_path_ideals(merging_roots(4), path((1, 1), (2, 1), (3, 1), (4, 1)))
    # (1,2) is neither on the path nor below it, yet the fixpoint drops it
    assert Vertex(1, 2) not in cmp_.descendant_set
    assert not cmp_.complement_is_ideal and not cmp_.agree


def test_descendant_set_agrees_on_chains():
    cmp_ = compare_path_ideals(two_chains(4), path(*[(k, 1) for k in range(1, 5)]))
    assert cmp_.agree and cmp_.complement_is_ideal


# -- central norms ------------------------------------------------------------

def test_norm_of_equal_elements_is_zero():
    d = merging_roots()
    a = CentralElement(1, {1: Fraction(2), 2: Fraction(5)})
    assert central_norm_distance(d, a, a) == 0


def test_norm_two_parents_one_child():
    d = merging_roots()
    a1 = CentralElement(1, {1: 2, 2: 5})
    a2 = CentralElement(2, {1: 3})
    assert central_norm_distance(d, a1, a2) == 2


def test_norm_in_corner():
    d = merging_roots()
    a1 = CentralElement(1, {1: 2, 2: 5})
    a2 = CentralElement(2, {1: 3})
    assert central_norm_distance(d, a1, a2, corner=Vertex(1, 1)) == 1


def test_norm_counts_late_roots():
    # (2,2) is a root born on row 2: it meets no unit of row 1
    d = BratteliDiagram([1, 2, 1], [(1, 1, 1), (2, 1, 1), (2, 2, 1)])
    a1 = CentralElement(1, {1: 1})
    assert central_norm_distance(d, a1, CentralElement(2, {1: 1, 2: 7})) == 7
    assert oracles.atom_norm(d, 1, {1: 1}, 2, {1: 1, 2: 7}) == 7


def test_norm_corner_below_rows_rejected():
    d = merging_roots()
    with pytest.raises(IdealError):
        central_norm_distance(d, CentralElement(1, {}), CentralElement(2, {}), corner=Vertex(3, 1))


def test_norm_beyond_horizon_rejected():
    with pytest.raises(DiagramError):
        central_norm_distance(chain(2), CentralElement(1, {}), CentralElement(3, {}))


@given(diagrams(max_rows=5, max_width=4), st.randoms(use_true_random=False))
def test_norm_matches_atom_oracle(d, rnd):
    k = rnd.randint(1, d.horizon)
    l = rnd.randint(k, d.horizon)
    alpha = {j: Fraction(rnd.randint(-6, 6), rnd.randint(1, 4)) for j in range(1, d.rows[k - 1] + 1)}
    beta = {j: Fraction(rnd.randint(-6, 6), rnd.randint(1, 4)) for j in range(1, d.rows[l - 1] + 1)}
    corner = None
    if rnd.random() < 0.5:
        m = rnd.randint(1, k)
        corner = Vertex(m, rnd.randint(1, d.rows[m - 1]))
    got = central_norm_distance(d, CentralElement(k, alpha), CentralElement(l, beta), corner)
    assert got == oracles.atom_norm(d, k, alpha, l, beta, corner)


# -- block units ----------------------------------------------------------------

def test_block_unit_norms():
    d = merging_roots()
    block = full_ideal(d)
    assert block_unit_quotient_norm(block, empty_ideal(d)) == 1
    assert block_unit_quotient_norm(block, full_ideal(d)) == 0


def test_ideal_json_round_trip():
    d = two_chains(3)
    lam = IdealSubdiagram(d, [(k, 2) for k in range(1, 4)])
    assert IdealSubdiagram.from_json(d, lam.to_json()) == lam
    with pytest.raises(IdealError):
        IdealSubdiagram.from_json(d, {"vertices": [], "horizon": 9})


def test_ideals_of_different_diagrams_do_not_mix():
    with pytest.raises(IdealError):
        meet(empty_ideal(chain(2)), empty_ideal(chain(3)))
