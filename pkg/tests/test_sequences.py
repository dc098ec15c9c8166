"""
Tests for eventually periodic group sequences: files, entries, cofinite
queries, regrouping.
"""

from __future__ import annotations

import json

import pytest

from cosettree.algebra.expr import AINF, Q, Z, ZERO, Cyclic, FinSupPower, PrimeTail, Quasicyclic, Sum, direct_sum
from cosettree.errors import BadCuts, MalformedSpec, NotTame
from cosettree.tameness.sequences import (
    AllQuasicyclic,
    HInfinityTail,
    PeriodicCycle,
    Role,
    SeqSpec,
    cycle_spec,
    entries,
    last_nontorsion,
    last_violation,
    load_spec,
    rearrange,
    regroup,
    spec_to_document,
    tail_bad_primes,
    tail_is_p_compact,
)


class TestLoadSpec:

    def test_cycle(self):
        spec = load_spec(json.dumps({"role": "product", "prefix": ["Z"], "tail": {"cycle": ["Zq(2)", "Z(3)"]}}))
        assert spec.role == Role.PRODUCT
        assert spec.prefix == (Z,)
        assert spec.tail == PeriodicCycle(cycle=(Quasicyclic(2), Cyclic(3)))

    def test_families(self):
        assert load_spec(json.dumps({"tail": {"family": "all_quasicyclic"}})).tail == AllQuasicyclic()
        spec = load_spec(json.dumps({"role": "filtration", "tail": {"family": "hinf", "offset": 2}}))
        assert spec.role == Role.FILTRATION
        assert spec.tail == HInfinityTail(offset=2)

    def test_document_round_trip(self):
        spec = cycle_spec(FinSupPower(Cyclic(2)), prefix=(Q,))
        doc = spec_to_document(spec).model_dump(mode="json")
        assert doc == {
            "format": "cosettree/1",
            "role": "product",
            "prefix": ["Q"],
            "tail": {"cycle": ["finsup(Z(2))"], "family": None, "offset": None},
        }
        assert load_spec(json.dumps(doc)) == spec

    @pytest.mark.parametrize(
        "doc, where",
        [
            ({"tail": {}}, "tail"),
            ({"tail": {"cycle": ["Z"], "family": "hinf"}}, "tail"),
            ({"tail": {"cycle": []}}, "tail"),
            ({"tail": {"family": "all_quasicyclic", "offset": 1}}, "tail"),
            ({"tail": {"cycle": ["Z(1)"]}}, "tail.cycle.0"),
            ({"prefix": ["Zq(6)"], "tail": {"cycle": ["Z"]}}, "prefix.0"),
            ({"role": "quotient", "tail": {"cycle": ["Z"]}}, "role"),
            ({"tail": {"cycle": ["Z"]}, "extra": 1}, "extra"),
        ],
    )
    def test_malformed(self, doc, where):
        with pytest.raises(MalformedSpec) as info:
            load_spec(json.dumps(doc))
        assert f"at {where}:" in str(info.value)

    def test_invalid_json(self):
        with pytest.raises(MalformedSpec) as info:
            load_spec('{"tail": ')
        assert "line 1" in str(info.value)


class TestEntries:

    def test_cycle_repeats(self):
        spec = cycle_spec(Cyclic(2), Cyclic(3), prefix=(Z,))
        assert entries(spec, 6) == [Z, Cyclic(2), Cyclic(3), Cyclic(2), Cyclic(3), Cyclic(2)]

    def test_all_quasicyclic(self):
        spec = SeqSpec(prefix=(ZERO,), tail=AllQuasicyclic())
        assert entries(spec, 4) == [ZERO, Quasicyclic(2), Quasicyclic(3), Quasicyclic(5)]

    def test_hinf_family(self):
        spec = SeqSpec(tail=HInfinityTail(offset=0))
        assert entries(spec, 2) == [AINF, Sum(Quasicyclic(2), PrimeTail(1))]


class TestCofiniteQueries:

    def test_last_violation_in_prefix(self):
        spec = cycle_spec(Quasicyclic(3), prefix=(FinSupPower(Cyclic(2)), Cyclic(2)))
        assert last_violation(spec, 2) == 0
        assert last_violation(spec, 3) is None

    def test_last_violation_of_non_torsion_prefix(self):
        spec = cycle_spec(Cyclic(2), prefix=(Z, Z, Cyclic(4)))
        assert last_violation(spec, 5) == 1

    def test_last_violation_needs_compact_tail(self):
        with pytest.raises(NotTame):
            last_violation(cycle_spec(FinSupPower(Cyclic(2))), 2)

    def test_hinf_tail(self):
        spec = SeqSpec(prefix=(AINF,), tail=HInfinityTail(offset=1))
        # H_n is p_i-compact exactly when n > i
        assert last_violation(spec, 2) == 0
        assert last_violation(spec, 5) == 2
        assert last_violation(spec, 11) == 4

    def test_tail_queries(self):
        spec = cycle_spec(Sum(Quasicyclic(2), FinSupPower(Cyclic(3))), PrimeTail(3))
        assert tail_is_p_compact(spec, 2)
        assert not tail_is_p_compact(spec, 3)
        bad = tail_bad_primes(spec)
        assert bad.primes == (3,) and bad.from_index == 3

    def test_last_nontorsion(self):
        assert last_nontorsion(cycle_spec(Cyclic(2), prefix=(Z, Cyclic(3), Q, Cyclic(2)))) == 2
        with pytest.raises(NotTame):
            last_nontorsion(cycle_spec(Z))

    def test_last_nontorsion_sees_the_hinf_head(self):
        assert last_nontorsion(SeqSpec(tail=HInfinityTail())) == 0
        assert last_nontorsion(SeqSpec(prefix=(Z, Cyclic(2)), tail=HInfinityTail())) == 2
        assert last_nontorsion(SeqSpec(prefix=(Z, Cyclic(2)), tail=HInfinityTail(offset=1))) == 0


class TestRegroup:

    def test_whole_cycle_as_one_block(self):
        spec = regroup(cycle_spec(Cyclic(2), Cyclic(3)), [], tail_cycles=1)
        assert spec.tail == PeriodicCycle(cycle=(Sum(Cyclic(2), Cyclic(3)),))

    def test_two_cycles_per_block(self):
        spec = regroup(cycle_spec(Cyclic(2)), [], tail_cycles=2)
        assert spec.tail.cycle == (Sum(Cyclic(2), Cyclic(2)),)

    def test_prefix_blocks(self):
        spec = cycle_spec(Cyclic(5), prefix=(Z, Cyclic(2), Cyclic(3)))
        out = regroup(spec, [0, 1])
        assert out.prefix == (Z, Sum(Cyclic(2), Cyclic(3)))
        assert out.tail == spec.tail

    @pytest.mark.parametrize("cuts", [[1], [0, 0], [0, 3], [0, 2, 1]])
    def test_bad_cuts(self, cuts):
        with pytest.raises(BadCuts):
            regroup(cycle_spec(Cyclic(5), prefix=(Z, Cyclic(2), Cyclic(3))), cuts)

    def test_prefix_needs_cuts(self):
        with pytest.raises(BadCuts):
            regroup(cycle_spec(Cyclic(5), prefix=(Z,)), [])

    def test_family_tail_cannot_be_regrouped(self):
        with pytest.raises(BadCuts):
            regroup(SeqSpec(tail=AllQuasicyclic()), [], tail_cycles=2)

    def test_rearrange_merges_up_to_the_last_non_torsion_entry(self):
        spec = cycle_spec(Cyclic(5), prefix=(Cyclic(2), Z, Cyclic(3), Cyclic(7)))
        out = rearrange(spec)
        assert out.prefix == (direct_sum([Cyclic(2), Z]), Cyclic(3), Cyclic(7))
        assert out.tail == spec.tail
        assert last_nontorsion(out) == 0

    def test_rearrange_keeps_a_leading_non_torsion_entry(self):
        spec = cycle_spec(Cyclic(2), prefix=(Z, Quasicyclic(2)))
        assert rearrange(spec) == spec

    def test_rearrange_absorbs_the_universal_head_of_hinf(self):
        spec = SeqSpec(prefix=(Cyclic(3),), tail=HInfinityTail())
        out = rearrange(spec)
        assert out.prefix == (direct_sum([Cyclic(3), AINF]),)
        assert out.tail == HInfinityTail(offset=1)
        assert entries(out, 3)[1:] == entries(spec, 4)[2:]

    def test_rearrange_leaves_torsion_specs_alone(self):
        spec = cycle_spec(Cyclic(2), prefix=(Cyclic(3), Quasicyclic(2)))
        assert rearrange(spec) == spec
