"""
cosettree — Tameness classifier

Design patterns:
  - Rule Engine: obstructions, tier and local compactness are independent
    rules over the same SeqSpec
  - Lookup Table: bounds come from bounds_for_tier

A sequence is tame iff cofinitely many entries are torsion and, for every
prime p, cofinitely many entries have finitely many elements of order p.
For the product role the entries are the factors H_n; for the filtration
role they are the quotients G_n / G_{n+1}.
"""

from __future__ import annotations

import logging
from typing import List

from cosettree.algebra.abelian import bad_primes, is_finite, is_torsion
from cosettree.errors import MalformedSpec
from cosettree.models import Obstruction, TamenessReport
from cosettree.tameness.complexity import Tier, bounds_for_tier
from cosettree.tameness.sequences import (
    AllQuasicyclic,
    HInfinityTail,
    PeriodicCycle,
    Role,
    SeqSpec,
    head_entries,
    tail_bad_primes,
    tail_is_torsion,
)

logger = logging.getLogger(__name__)


# ── Rules ─────────────────────────────────────────────────


def _obstructions(spec: SeqSpec) -> List[Obstruction]:
    out: List[Obstruction] = []
    if not tail_is_torsion(spec):
        out.append(Obstruction(kind="z_omega"))
    bad = tail_bad_primes(spec)
    out.extend(Obstruction(kind="zp_finsup_omega", prime=p) for p in bad.primes)
    if bad.from_index is not None:
        out.append(Obstruction(kind="zp_finsup_omega", all_primes_from=bad.from_index))
    return out


def _tier(spec: SeqSpec, tame: bool) -> Tier:
    """Tier over every entry, prefix included."""
    if not tame:
        return Tier.NOT_TAME
    finite_entries = head_entries(spec)
    if isinstance(spec.tail, PeriodicCycle):
        finite_entries.extend(spec.tail.cycle)
    torsion = all(is_torsion(g) for g in finite_entries)
    if not torsion:
        return Tier.TAME_GENERAL
    p_compact = all(bad_primes(g).infinite_p_part.is_empty for g in finite_entries)
    # H_n fails p_i-compactness for n <= i, so that family is never all-p-compact
    if p_compact and not isinstance(spec.tail, HInfinityTail):
        return Tier.ALL_P_COMPACT
    return Tier.ALL_TORSION


def _locally_compact(spec: SeqSpec) -> bool:
    return isinstance(spec.tail, PeriodicCycle) and all(is_finite(g) for g in spec.tail.cycle)


def _notes(spec: SeqSpec, tier: Tier, locally_compact: bool) -> List[str]:
    if tier == Tier.NOT_TAME:
        return ["not tame: some orbit equivalence relation of a Borel action is not Borel"]
    notes = [
        "group_tree_bound is an upper bound on heights of wellfounded group trees (<=)",
        "coset_tree_bound is strict: heights of wellfounded coset trees are < the bound",
    ]
    if tier == Tier.TAME_GENERAL:
        notes.append("group_tree_bound w*3 holds after rearranging the finitely many non-torsion entries into index 0")
        notes.append("the w*3 group-tree bound is not known sharp")
    notes.append("upper bounds of the (E0^w)^+ form are not sharp: no orbit equivalence relation is bireducible with (E0^w)^+")
    if locally_compact:
        if spec.role == Role.FILTRATION:
            notes.append("locally compact: the orbit equivalence relations are essentially hyperfinite (E0)")
        else:
            notes.append("all tail factors are finite")
    if spec.role == Role.FILTRATION:
        notes.append("completeness for groups that do not embed in a tame product is not claimed")
    if isinstance(spec.tail, AllQuasicyclic):
        notes.append("builtin family: every entry Zq(p_n) is p-compact for all p")
    if isinstance(spec.tail, HInfinityTail):
        notes.append("builtin family: H_n is p_i-compact exactly when n > i, cofinitely for each prime")
    return notes


# ── Entry points ──────────────────────────────────────────


def _classify(spec: SeqSpec) -> TamenessReport:
    obstructions = _obstructions(spec)
    tame = not obstructions
    tier = _tier(spec, tame)
    locally_compact = tame and _locally_compact(spec)
    report = TamenessReport(
        role=spec.role,
        tame=tame,
        nontorsion_tail=not tail_is_torsion(spec),
        bad_tail_primes=tail_bad_primes(spec),
        obstructions=obstructions,
        tier=tier,
        locally_compact=locally_compact,
        notes=_notes(spec, tier, locally_compact),
    )
    if tame:
        bounds = bounds_for_tier(tier, spec.role, locally_compact=locally_compact)
        report = report.model_copy(update=bounds._asdict())
    logger.info("classified %s spec: tame=%s tier=%s", spec.role.value, tame, tier.value)
    return report


def classify_product(spec: SeqSpec) -> TamenessReport:
    if spec.role != Role.PRODUCT:
        raise MalformedSpec("classify_product needs a spec with role 'product'")
    return _classify(spec)


def classify_filtration(spec: SeqSpec) -> TamenessReport:
    if spec.role != Role.FILTRATION:
        raise MalformedSpec("classify_filtration needs a spec with role 'filtration'")
    return _classify(spec)


def classify(spec: SeqSpec) -> TamenessReport:
    """Dispatch on the spec's role."""
    return classify_product(spec) if spec.role == Role.PRODUCT else classify_filtration(spec)
