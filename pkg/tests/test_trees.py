"""
Tests for the finite-depth tree engine: construction, predicates,
derivatives, ranks, Γ, translation and subtrees.
"""

from __future__ import annotations

import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from cosettree.algebra.ordinals import Ordinal
from cosettree.errors import CapExceeded, NodeNotInTree, NotCosetTree, StructureMismatch
from cosettree.trees.engine import (
    FrontierMode,
    LevelStructure,
    LevelTree,
    RankValue,
    branch_order_violations,
    coset_tree,
    derivative,
    derivative_by_definition,
    empty_tree,
    full_tree,
    gamma,
    gamma_report,
    height,
    is_coset_tree,
    is_group_tree,
    is_wellfounded_at_depth,
    iterate_derivative,
    rank_of,
    rank_table,
    subgroup_tree,
    subtree_at,
    translate,
)

CLOSED, OPEN = FrontierMode.CLOSED, FrontierMode.OPEN


@pytest.fixture
def z2z2():
    return LevelStructure.of([2], [2])


@pytest.fixture
def z4():
    return LevelStructure.of([4])


def _level_sizes(s):
    return [len(s.level(n)) for n in range(1, s.depth + 1)]


def _closed_downward(ls, leaves):
    """Prefix closure of (length, node) pairs."""
    levels = [set() for _ in range(ls.depth)]
    for n, node in leaves:
        for m in range(1, n + 1):
            levels[m - 1].add(ls.restrict(node, m))
    return LevelTree(ls, levels)


class TestLevelStructure:

    def test_products(self):
        ls = LevelStructure.of([2], [3, 3], [4])
        assert ls.depth == 3
        assert ls.offsets == (0, 1, 3, 4)
        assert ls.product(2).orders == (2, 3, 3)
        assert ls.product(3).order == 72

    def test_flatten_and_split(self):
        ls = LevelStructure.of([2], [3, 3])
        node = ls.flatten([1, [2, 0]])
        assert node == (1, 2, 0)
        assert ls.split(node, 2) == [[1], [2, 0]]
        assert ls.restrict(node, 1) == (1,)

    def test_flatten_rejects_out_of_range(self):
        ls = LevelStructure.of([2], [3])
        with pytest.raises(StructureMismatch):
            ls.flatten([2])
        with pytest.raises(StructureMismatch):
            ls.flatten([0, 0, 0])


class TestConstruction:

    def test_full_tree_depth_one(self):
        s = full_tree(LevelStructure.of([2]))
        assert s.nodes(1) == [(0,), (1,)]

    def test_full_tree_depth_two(self, z2z2):
        assert _level_sizes(full_tree(z2z2)) == [2, 4]

    def test_full_tree_cap(self):
        with pytest.raises(CapExceeded):
            full_tree(LevelStructure.of([3]), cap=2)

    def test_missing_parent_rejected(self, z2z2):
        with pytest.raises(StructureMismatch):
            LevelTree(z2z2, [[(0,)], [(1, 0)]])

    def test_node_outside_level_rejected(self, z4):
        with pytest.raises(StructureMismatch):
            LevelTree(z4, [[(4,)]])

    def test_node_cap(self, z2z2):
        with pytest.raises(CapExceeded):
            LevelTree(z2z2, [[(0,), (1,)], []], cap=1)

    def test_subgroup_tree_closes_downward(self):
        ls = LevelStructure.of([2], [2], [2])
        s = subgroup_tree(ls, [[], [], [(1, 1, 1)]])
        assert s.nodes(3) == [(0, 0, 0), (1, 1, 1)]
        assert s.nodes(2) == [(0, 0), (1, 1)]
        assert s.nodes(1) == [(0,), (1,)]
        assert is_group_tree(s)

    def test_coset_tree_is_a_translate(self, z2z2):
        s = coset_tree(z2z2, [[], [(1, 1)]], (1, 0))
        assert s.nodes(2) == [(0, 1), (1, 0)]
        assert is_coset_tree(s) and not is_group_tree(s)

    def test_equality_and_hash(self, z2z2):
        a, b = full_tree(z2z2), full_tree(z2z2)
        assert a == b and hash(a) == hash(b)
        assert a != empty_tree(z2z2)


class TestPredicates:

    def test_subgroup_level(self, z4):
        s = LevelTree(z4, [[(0,), (2,)]])
        assert is_group_tree(s) and is_coset_tree(s)

    def test_odd_level(self, z4):
        s = LevelTree(z4, [[(1,), (3,)]])
        assert not is_group_tree(s) and is_coset_tree(s)

    def test_three_residues(self, z4):
        assert not is_coset_tree(LevelTree(z4, [[(0,), (1,), (2,)]]))

    def test_empty_levels(self, z2z2):
        s = empty_tree(z2z2)
        assert is_coset_tree(s) and not is_group_tree(s)

    def test_branch_orders_divide(self):
        ls = LevelStructure.of([2], [4], [3])
        assert branch_order_violations(full_tree(ls)) == []


class TestDerivative:

    def test_full_tree_closed(self, z2z2):
        d = derivative(full_tree(z2z2), CLOSED)
        assert _level_sizes(d) == [2, 0]

    def test_full_tree_open(self, z2z2):
        s = full_tree(z2z2)
        assert derivative(s, OPEN) == s

    def test_leaf_at_level_one_drops(self, z2z2):
        s = LevelTree(z2z2, [[(0,), (1,)], [(0, 0)]])
        d = derivative(s, CLOSED)
        assert d.nodes(1) == [(0,)]
        assert d.nodes(2) == []

    def test_projection_formula_matches_definition(self):
        ls = LevelStructure.of([2], [3], [2])
        s = _closed_downward(ls, [(3, (0, 1, 1)), (2, (1, 2)), (1, (0,))])
        for mode in (CLOSED, OPEN):
            assert derivative(s, mode) == derivative_by_definition(s, mode)


class TestRanks:

    def test_empty_tree_has_height_zero(self, z2z2):
        assert height(empty_tree(z2z2)) == Ordinal.finite(0)

    def test_open_full_tree_is_all_core(self, z2z2):
        s = full_tree(z2z2)
        assert height(s, OPEN) == Ordinal.finite(0)
        assert not is_wellfounded_at_depth(s, OPEN)
        assert all(r.is_core for _, _, r in rank_table(s, OPEN))

    def test_two_level_example(self, z2z2):
        s = LevelTree(z2z2, [[(0,), (1,)], [(0, 0)]])
        assert rank_of(s, [1]) == RankValue.fin(0)
        assert rank_of(s, [0, 0]) == RankValue.fin(0)
        assert rank_of(s, [0]) == RankValue.fin(1)
        assert height(s) == Ordinal.finite(2)
        assert is_wellfounded_at_depth(s)

    def test_closed_full_tree_root_rank(self):
        ls = LevelStructure.of([2], [2], [2])
        s = full_tree(ls)
        assert len(iterate_derivative(s)) == 4
        assert rank_of(s, [0]) == RankValue.fin(2)
        assert height(s) == Ordinal.finite(3)

    def test_rank_of_missing_node(self, z2z2):
        s = subgroup_tree(z2z2, [[], []])
        with pytest.raises(NodeNotInTree):
            rank_of(s, [1])

    def test_rank_table_order_is_canonical(self, z2z2):
        table = rank_table(full_tree(z2z2))
        assert [(n, node) for n, node, _ in table] == [
            (1, (0,)), (1, (1,)), (2, (0, 0)), (2, (0, 1)), (2, (1, 0)), (2, (1, 1)),
        ]

    def test_rank_value_wire_form(self):
        assert RankValue.core().model_dump() == "core"
        assert RankValue.fin(3).model_dump() == 3
        assert RankValue.model_validate("core").is_core
        assert RankValue.model_validate(2) == RankValue.fin(2)


class TestGamma:

    def test_odd_level_moves_to_zero(self, z4):
        s = LevelTree(z4, [[(1,), (3,)]])
        assert gamma(s).nodes(1) == [(0,), (2,)]

    def test_group_tree_is_fixed(self, z2z2):
        s = subgroup_tree(z2z2, [[], [(1, 1)]])
        assert gamma(s) == s

    def test_empty_levels_get_the_zero_singleton(self, z2z2):
        g, filled = gamma_report(empty_tree(z2z2))
        assert g.nodes(1) == [(0,)]
        assert g.nodes(2) == [(0, 0)]
        assert filled == [1, 2]

    def test_rejects_non_coset_tree(self, z4):
        with pytest.raises(NotCosetTree):
            gamma(LevelTree(z4, [[(0,), (1,)]]))

    def test_zero_fill_is_logged(self, z2z2, caplog):
        gamma_report(derivative(full_tree(z2z2)))
        assert "zero singleton" in caplog.text


class TestTranslateAndSubtrees:

    def test_translate_level(self, z4):
        s = LevelTree(z4, [[(0,), (2,)]])
        assert translate(s, (1,)).nodes(1) == [(1,), (3,)]

    def test_translator_must_have_full_length(self, z2z2):
        with pytest.raises(StructureMismatch):
            translate(full_tree(z2z2), (1,))

    def test_subtree_at(self, z2z2):
        sub = subtree_at(full_tree(z2z2), [0])
        assert sub.nodes(1) == [(0,)]
        assert sub.nodes(2) == [(0, 0), (0, 1)]


# ── Generated corpora ─────────────────────────────────────

_structures = st.sampled_from(
    [
        LevelStructure.of([2], [2], [2]),
        LevelStructure.of([2], [4]),
        LevelStructure.of([3], [3]),
        LevelStructure.of([2, 2], [2]),
        LevelStructure.of([4], [2], [2]),
    ]
)


@st.composite
def trees(draw):
    ls = draw(_structures)
    leaves = []
    for n in range(1, ls.depth + 1):
        elems = list(ls.product(n).elements())
        leaves.extend((n, x) for x in draw(st.lists(st.sampled_from(elems), max_size=5)))
    return _closed_downward(ls, leaves)


@st.composite
def group_trees(draw):
    ls = draw(_structures)
    gens = []
    for n in range(1, ls.depth + 1):
        elems = list(ls.product(n).elements())
        gens.append(draw(st.lists(st.sampled_from(elems), max_size=2)))
    return subgroup_tree(ls, gens)


@st.composite
def coset_trees(draw):
    g = draw(group_trees())
    x = draw(st.sampled_from(list(g.structure.product(g.depth).elements())))
    return translate(g, x)


@hsettings(max_examples=150, deadline=None)
@given(s=trees())
def test_derivative_formula_agrees_with_definition(s):
    for mode in (CLOSED, OPEN):
        assert derivative(s, mode) == derivative_by_definition(s, mode)


@hsettings(max_examples=150, deadline=None)
@given(s=trees())
def test_height_is_at_most_depth_in_closed_world(s):
    assert height(s).as_int() <= s.depth
    assert is_wellfounded_at_depth(s)


@hsettings(max_examples=100, deadline=None)
@given(s=trees())
def test_ranks_do_not_increase_along_branches(s):
    ranks = {(n, node): r for n, node, r in rank_table(s)}
    ls = s.structure
    for (n, node), r in ranks.items():
        if n > 1:
            parent = ranks[(n - 1, ls.restrict(node, n - 1))]
            assert parent.value > r.value


@hsettings(max_examples=100, deadline=None)
@given(s=group_trees())
def test_group_trees_are_coset_trees_fixed_by_gamma(s):
    assert is_group_tree(s)
    assert is_coset_tree(s)
    assert gamma(s) == s


@hsettings(max_examples=100, deadline=None)
@given(s=coset_trees())
def test_gamma_is_idempotent_and_detects_group_trees(s):
    g = gamma(s)
    assert is_group_tree(g)
    assert gamma(g) == g
    assert (g == s) == is_group_tree(s)


@st.composite
def truncated_coset_trees(draw):
    """Coset trees, some emptied from a random level on."""
    s = draw(coset_trees())
    cut = draw(st.integers(min_value=1, max_value=s.depth + 1))
    return s.with_levels([s.level(n) if n < cut else () for n in range(1, s.depth + 1)])


@st.composite
def nested_trees(draw):
    """(S, T) with S a subtree of T."""
    t = draw(trees())
    ls = t.structure
    levels = []
    prev = None
    for n in range(1, t.depth + 1):
        options = [x for x in t.nodes(n) if prev is None or ls.restrict(x, n - 1) in prev]
        prev = frozenset(x for x in options if draw(st.booleans()))
        levels.append(prev)
    return t.with_levels(levels), t


@hsettings(max_examples=100, deadline=None)
@given(s=truncated_coset_trees())
def test_truncated_coset_trees_stay_coset_trees(s):
    assert is_coset_tree(s)
    assert is_group_tree(gamma(s))


@hsettings(max_examples=150, deadline=None)
@given(s=st.one_of(trees(), truncated_coset_trees()), data=st.data())
def test_derivative_and_height_commute_with_translation(s, data):
    x = data.draw(st.sampled_from(list(s.structure.product(s.depth).elements())))
    moved = translate(s, x)
    for mode in (CLOSED, OPEN):
        assert derivative(moved, mode) == translate(derivative(s, mode), x)
        assert height(moved, mode) == height(s, mode)
        assert [t.size for t in iterate_derivative(moved, mode)] == [t.size for t in iterate_derivative(s, mode)]


@hsettings(max_examples=150, deadline=None)
@given(pair=nested_trees())
def test_derivative_is_monotone(pair):
    s, t = pair
    assert s.is_subtree_of(t)
    for mode in (CLOSED, OPEN):
        assert derivative(s, mode).is_subtree_of(derivative(t, mode))
    assert height(s).as_int() <= height(t).as_int()
