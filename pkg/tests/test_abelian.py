"""
Tests for the decision procedures on symbolic abelian groups.
"""

from __future__ import annotations

import random
from math import prod

import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from cosettree.algebra.abelian import (
    ALEPH0,
    FINSUP,
    ONE,
    Cardinal,
    DivNormalForm,
    PrimeSet,
    bad_primes,
    concretize,
    divisible_hull,
    embeds,
    from_finite,
    group_order,
    is_finite,
    is_p_compact,
    is_torsion,
    order_p_count,
    p_component,
)
from cosettree.algebra.expr import (
    AINF,
    Q,
    Z,
    ZERO,
    Cyclic,
    FinSupPower,
    PrimeTail,
    Quasicyclic,
    Sum,
    direct_sum,
    parse_expr,
)
from cosettree.algebra.finite import FiniteAbelian
from cosettree.errors import CapExceeded, InfiniteGroup, InvalidPrime, NonTorsionInput, UnsupportedComparison

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


class TestTorsion:

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("Z", False),
            ("Q", False),
            ("Ainf", False),
            ("0", True),
            ("Zq(3)", True),
            ("ptail(2)", True),
            ("sum(Z(4), finsup(Z(2)))", True),
            ("sum(Z(4), finsup(Q))", False),
        ],
    )
    def test_is_torsion(self, text, expected):
        assert is_torsion(parse_expr(text)) is expected


class TestOrderPCounts:

    def test_cyclic(self):
        assert order_p_count(Cyclic(12), 2) == Cardinal.fin(2)
        assert order_p_count(Cyclic(12), 5) == ONE

    def test_quasicyclic(self):
        assert order_p_count(Quasicyclic(2), 2) == Cardinal.fin(2)
        assert order_p_count(Quasicyclic(2), 3) == ONE

    def test_finsup_power(self):
        assert order_p_count(FinSupPower(Cyclic(3)), 3) == ALEPH0
        assert order_p_count(FinSupPower(Cyclic(3)), 2) == ONE

    def test_torsion_free(self):
        assert order_p_count(Q, 5) == ONE
        assert order_p_count(Z, 2) == ONE

    def test_sum_multiplies(self):
        g = Sum(Cyclic(2), Cyclic(4), Quasicyclic(2))
        assert order_p_count(g, 2) == Cardinal.fin(8)

    def test_prime_tail(self):
        assert order_p_count(PrimeTail(1), 2) == ONE
        assert order_p_count(PrimeTail(1), 3) == ALEPH0

    def test_universal_group(self):
        assert order_p_count(AINF, 7) == ALEPH0

    def test_rejects_non_prime(self):
        with pytest.raises(InvalidPrime):
            order_p_count(Z, 4)


class TestPCompactness:

    def test_catalog(self):
        assert not is_p_compact(Z, 2)
        assert not is_p_compact(FinSupPower(Cyclic(2)), 2)
        assert is_p_compact(Sum(Quasicyclic(2), Quasicyclic(3)), 2)
        assert is_p_compact(Cyclic(8), 2)

    @pytest.mark.parametrize("n", [2, 6, 12, 30, 97, 360])
    def test_finite_groups_are_p_compact_everywhere(self, n):
        g = Sum(Cyclic(n), Cyclic(2))
        assert all(is_p_compact(g, p) for p in SMALL_PRIMES)

    def test_finsup_is_compact_away_from_its_primes(self):
        g = FinSupPower(Cyclic(6))
        assert [p for p in SMALL_PRIMES if is_p_compact(g, p)] == [5, 7, 11, 13]


class TestBadPrimes:

    def test_quasicyclic(self):
        bad = bad_primes(Quasicyclic(7))
        assert bad.nontorsion is False
        assert bad.infinite_p_part.is_empty

    def test_mixed(self):
        bad = bad_primes(Sum(Z, FinSupPower(Cyclic(5))))
        assert bad.nontorsion is True
        assert bad.infinite_p_part == PrimeSet.of([5])

    def test_universal_group(self):
        bad = bad_primes(AINF)
        assert bad.nontorsion is True
        assert bad.infinite_p_part.is_all_primes

    def test_prime_tail(self):
        part = bad_primes(PrimeTail(2)).infinite_p_part
        assert 5 in part and 7 in part
        assert 3 not in part

    @pytest.mark.parametrize("text", ["sum(Z, finsup(Z(5)))", "finsup(Z(6))", "sum(Zq(2), Z(9))", "finsup(Zq(3))"])
    def test_agrees_with_p_compactness(self, text):
        g = parse_expr(text)
        bad = bad_primes(g)
        for p in SMALL_PRIMES:
            assert is_p_compact(g, p) == (not bad.nontorsion and p not in bad.infinite_p_part)


class TestPrimeSet:

    def test_union_with_cofinite_part(self):
        u = PrimeSet.of([2, 7]).union(PrimeSet(from_index=3))
        assert u.primes == (2,)
        assert u.from_index == 3
        assert 7 in u and 11 in u and 5 not in u

    def test_explicit(self):
        assert PrimeSet.of([3], from_index=4).explicit(6) == [3, 11, 13]


class TestComponentsAndHulls:

    def test_p_components(self):
        assert p_component(Cyclic(12), 2) == Cyclic(4)
        assert p_component(Sum(Quasicyclic(2), Cyclic(9)), 3) == Cyclic(9)
        assert p_component(FinSupPower(Cyclic(6)), 3) == FinSupPower(Cyclic(3))
        assert p_component(Cyclic(9), 2) == ZERO

    def test_p_component_of_prime_tail(self):
        assert p_component(PrimeTail(1), 3) == FinSupPower(Quasicyclic(3))
        assert p_component(PrimeTail(1), 2) == ZERO

    def test_p_component_needs_torsion(self):
        with pytest.raises(NonTorsionInput):
            p_component(Sum(Z, Cyclic(2)), 2)

    def test_p_component_keeps_order_p_count(self):
        g = Sum(FinSupPower(Cyclic(6)), Cyclic(10), Quasicyclic(5))
        for p in (2, 3, 5):
            assert order_p_count(p_component(g, p), p) == order_p_count(g, p)

    def test_hulls(self):
        assert divisible_hull(Cyclic(4)).multiplicities == {2: 1}
        assert divisible_hull(Sum(Quasicyclic(2), Quasicyclic(2), Cyclic(3))).multiplicities == {2: 2, 3: 1}
        assert divisible_hull(FinSupPower(Cyclic(2))).multiplicities == {2: FINSUP}

    def test_hull_of_prime_tail(self):
        hull = divisible_hull(Sum(Quasicyclic(2), PrimeTail(2)))
        assert hull.finsup_from == 2
        assert hull.multiplicity(2) == 1
        assert hull.multiplicity(3) == 0
        assert hull.multiplicity(5) == FINSUP

    @pytest.mark.parametrize(
        "g",
        [
            FinSupPower(Quasicyclic(3)),
            FinSupPower(Cyclic(6)),
            PrimeTail(2),
            Sum(Cyclic(4), PrimeTail(0)),
            Sum(Quasicyclic(2), Quasicyclic(2), Cyclic(9)),
        ],
    )
    def test_finsup_exactly_where_order_p_count_is_countable(self, g):
        hull = divisible_hull(g)
        for p in SMALL_PRIMES:
            m = hull.multiplicity(p)
            if order_p_count(g, p) == ALEPH0:
                assert m == FINSUP
            else:
                assert order_p_count(g, p) == Cardinal.fin(p ** m)

    def test_covered_primes_are_dropped(self):
        form = DivNormalForm(multiplicities={2: 1, 3: 2, 5: 4, 7: FINSUP}, finsup_from=2)
        assert form.multiplicities == {2: 1, 3: 2}
        assert form.multiplicity(5) == FINSUP
        assert form == DivNormalForm(multiplicities={2: 1, 3: 2}, finsup_from=2)

    def test_hull_of_sum_with_a_cofinite_tail(self):
        hull = divisible_hull(Sum(Cyclic(10), PrimeTail(1)))
        assert hull.multiplicities == {2: 1}
        assert hull.primes() == [2]

    def test_hull_needs_torsion(self):
        with pytest.raises(NonTorsionInput):
            divisible_hull(Q)


class TestEmbeds:

    def test_multiplicity_comparison(self):
        cert = embeds(DivNormalForm(multiplicities={2: 1}), Sum(Quasicyclic(2), Quasicyclic(2)))
        assert cert.holds
        assert [(c.prime, c.left, c.right) for c in cert.comparisons] == [(2, 1, 2)]

    def test_finsup_into_finite_rank_fails(self):
        cert = embeds(DivNormalForm(multiplicities={2: FINSUP}), Sum(Quasicyclic(2)))
        assert not cert.holds

    def test_universal_target(self):
        cert = embeds(Cyclic(9), AINF)
        assert cert.holds and cert.via_universality

    def test_universal_target_accepts_non_torsion(self):
        assert embeds(Sum(Z, Q), Sum(AINF, Quasicyclic(2)))

    def test_expression_source_goes_through_the_hull(self):
        assert embeds(Sum(Cyclic(2), Cyclic(4)), Sum(Quasicyclic(2), Quasicyclic(2)))
        assert not embeds(Sum(Cyclic(2), Cyclic(4)), Quasicyclic(2))

    def test_prime_tails(self):
        assert embeds(PrimeTail(1), PrimeTail(0))
        cert = embeds(PrimeTail(0), PrimeTail(1))
        assert not cert.holds
        assert "[2]" in cert.tail_note

    def test_gap_filled_by_explicit_finsup(self):
        assert embeds(PrimeTail(0), Sum(FinSupPower(Quasicyclic(2)), PrimeTail(1)))

    def test_unsupported_target(self):
        with pytest.raises(UnsupportedComparison):
            embeds(Cyclic(2), Q)

    def test_non_torsion_source(self):
        with pytest.raises(UnsupportedComparison):
            embeds(Z, Quasicyclic(2))


class TestFiniteExpressions:

    def test_concretize(self):
        assert concretize(Sum(Cyclic(2), Cyclic(4))).orders == (2, 4)
        assert concretize(ZERO).orders == ()

    def test_concretize_infinite(self):
        with pytest.raises(InfiniteGroup):
            concretize(Quasicyclic(2))

    def test_concretize_cap(self):
        with pytest.raises(CapExceeded):
            concretize(Cyclic(1000), cap=10)

    def test_order(self):
        assert group_order(Sum(Cyclic(6), Cyclic(10))) == 60
        assert is_finite(ZERO) and not is_finite(Z)

    def test_from_finite_inverts_concretize(self):
        g = Sum(Cyclic(3), Cyclic(5))
        assert from_finite(concretize(g)) == g
        assert from_finite(FiniteAbelian(orders=(1, 2))) == Cyclic(2)

    def test_order_p_count_matches_brute_force(self):
        g = Sum(Cyclic(4), Cyclic(6), Cyclic(9))
        shape = concretize(g)
        for p in (2, 3, 5):
            killed = sum(1 for x in shape.elements() if shape.scale(p, x) == shape.zero)
            assert order_p_count(g, p) == Cardinal.fin(killed)


def _finite_corpus(seed: int, size: int, max_order: int = 5000):
    rng = random.Random(seed)
    out = []
    while len(out) < size:
        orders = [rng.randint(2, 60) for _ in range(rng.randint(1, 3))]
        if prod(orders) <= max_order:
            out.append(direct_sum([Cyclic(n) for n in orders]))
    return out


def test_finite_corpus_against_brute_force():
    for g in _finite_corpus(seed=1729, size=120):
        shape = concretize(g)
        orders = [shape.order_of(x) for x in shape.elements()]
        assert len(orders) == group_order(g)
        for p in SMALL_PRIMES:
            killed = sum(1 for m in orders if m in (1, p))
            assert order_p_count(g, p) == Cardinal.fin(killed)
            assert is_p_compact(g, p)


# ── Properties ────────────────────────────────────────────

_leaf = st.one_of(
    st.just(Z),
    st.just(Q),
    st.integers(min_value=2, max_value=60).map(Cyclic),
    st.sampled_from([2, 3, 5, 7]).map(Quasicyclic),
    st.integers(min_value=0, max_value=4).map(PrimeTail),
)
_exprs = st.recursive(
    _leaf,
    lambda inner: st.one_of(
        st.lists(inner, min_size=1, max_size=3).map(lambda parts: Sum(*parts)),
        inner.map(FinSupPower),
    ),
    max_leaves=6,
)


@hsettings(max_examples=200, deadline=None)
@given(a=_exprs, b=_exprs, p=st.sampled_from([2, 3, 5, 7]))
def test_p_compactness_of_a_sum_is_the_conjunction(a, b, p):
    assert is_p_compact(Sum(a, b), p) == (is_p_compact(a, p) and is_p_compact(b, p))


@hsettings(max_examples=100, deadline=None)
@given(g=_exprs)
def test_hull_multiplicity_matches_order_p_count(g):
    if not is_torsion(g):
        return
    hull = divisible_hull(g)
    for p in (2, 3, 5, 7, 11):
        m = hull.multiplicity(p)
        count = order_p_count(g, p)
        assert (m == FINSUP) == (count == ALEPH0)
        if m != FINSUP:
            assert count == Cardinal.fin(p ** m)
