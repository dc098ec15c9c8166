"""
cosettree — Eventually periodic group sequences

Design patterns:
  - Value Object: SeqSpec and the TailRule variants are frozen pydantic models
  - Adapter: SpecDocument is the JSON file shape, converted to and from SeqSpec

A SeqSpec lists a finite prefix of groups followed by a tail that is either
a repeating cycle or one of the builtin indexed families. Every per-prime
"for all but finitely many n" question is decidable on this class.
"""

from __future__ import annotations

import json
import logging
from enum import Enum
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from cosettree import FORMAT_TAG
from cosettree.algebra.abelian import PrimeSet, bad_primes, is_p_compact, is_torsion
from cosettree.algebra.expr import Expr, GroupExpr, direct_sum
from cosettree.errors import BadCuts, MalformedSpec, NotTame
from cosettree.tameness.families import h_infinity, hinf_last_violation, quasicyclic_entry

logger = logging.getLogger(__name__)


class Role(str, Enum):
    PRODUCT = "product"  # H_n are the factors of a full product
    FILTRATION = "filtration"  # H_n are the quotients G_n / G_{n+1}


# ── Tail rules ────────────────────────────────────────────


class PeriodicCycle(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["cycle"] = "cycle"
    cycle: Tuple[Expr, ...] = Field(..., min_length=1)


class AllQuasicyclic(BaseModel):
    """Tail entry t is Zq(p_t)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["all_quasicyclic"] = "all_quasicyclic"


class HInfinityTail(BaseModel):
    """Tail entry t is H_{offset + t} of the universal tame product."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["hinf"] = "hinf"
    offset: int = Field(default=0, ge=0)


TailRule = Annotated[Union[PeriodicCycle, AllQuasicyclic, HInfinityTail], Field(discriminator="kind")]


class SeqSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    role: Role = Role.PRODUCT
    prefix: Tuple[Expr, ...] = ()
    tail: TailRule

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.tail, PeriodicCycle)


def cycle_spec(*cycle: GroupExpr, prefix: Tuple[GroupExpr, ...] = (), role: Role = Role.PRODUCT) -> SeqSpec:
    return SeqSpec(role=role, prefix=tuple(prefix), tail=PeriodicCycle(cycle=tuple(cycle)))


# ── JSON documents ────────────────────────────────────────


class TailDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cycle: Optional[List[Expr]] = None
    family: Optional[Literal["all_quasicyclic", "hinf"]] = None
    offset: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _one_shape(self) -> "TailDocument":
        if (self.cycle is None) == (self.family is None):
            raise ValueError("tail needs exactly one of 'cycle' or 'family'")
        if self.cycle is not None and not self.cycle:
            raise ValueError("cycle must be nonempty")
        if self.offset is not None and self.family != "hinf":
            raise ValueError("'offset' only applies to the hinf family")
        return self


class SpecDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Literal["cosettree/1"] = FORMAT_TAG
    role: Role = Role.PRODUCT
    prefix: List[Expr] = Field(default_factory=list)
    tail: TailDocument


def spec_from_document(doc: SpecDocument) -> SeqSpec:
    t = doc.tail
    if t.cycle is not None:
        tail: Union[PeriodicCycle, AllQuasicyclic, HInfinityTail] = PeriodicCycle(cycle=tuple(t.cycle))
    elif t.family == "all_quasicyclic":
        tail = AllQuasicyclic()
    else:
        tail = HInfinityTail(offset=t.offset or 0)
    return SeqSpec(role=doc.role, prefix=tuple(doc.prefix), tail=tail)


def spec_to_document(spec: SeqSpec) -> SpecDocument:
    t = spec.tail
    if isinstance(t, PeriodicCycle):
        tail = TailDocument(cycle=list(t.cycle))
    elif isinstance(t, AllQuasicyclic):
        tail = TailDocument(family="all_quasicyclic")
    else:
        tail = TailDocument(family="hinf", offset=t.offset)
    return SpecDocument(role=spec.role, prefix=list(spec.prefix), tail=tail)


def _location(err: ValidationError) -> str:
    first = err.errors()[0]
    path = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"{path}: {first['msg']}"


def load_spec(text: str) -> SeqSpec:
    """Parse a spec JSON document; every failure is a MalformedSpec."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedSpec(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        doc = SpecDocument.model_validate(data)
    except ValidationError as exc:
        raise MalformedSpec(f"malformed spec at {_location(exc)}") from exc
    return spec_from_document(doc)


# ── Entries ───────────────────────────────────────────────


def entry_at(spec: SeqSpec, n: int) -> GroupExpr:
    """The n-th group of the sequence."""
    if n < 0:
        raise ValueError("index must be >= 0")
    if n < len(spec.prefix):
        return spec.prefix[n]
    t = n - len(spec.prefix)
    tail = spec.tail
    if isinstance(tail, PeriodicCycle):
        return tail.cycle[t % len(tail.cycle)]
    if isinstance(tail, AllQuasicyclic):
        return quasicyclic_entry(t)
    return h_infinity(tail.offset + t)


def entries(spec: SeqSpec, count: int) -> List[GroupExpr]:
    return [entry_at(spec, n) for n in range(count)]


def head_entries(spec: SeqSpec) -> List[GroupExpr]:
    """Entries that the tail's uniform description does not cover.

    The prefix, plus the first H_n of an ``hinf`` tail when it is H_0 = Ainf,
    the only member of that family that is not torsion.
    """
    out = list(spec.prefix)
    if isinstance(spec.tail, HInfinityTail) and spec.tail.offset == 0:
        out.append(h_infinity(0))
    return out


# ── Cofiniteness queries ──────────────────────────────────


def tail_is_torsion(spec: SeqSpec) -> bool:
    if isinstance(spec.tail, PeriodicCycle):
        return all(is_torsion(g) for g in spec.tail.cycle)
    return True


def tail_is_p_compact(spec: SeqSpec, p: int) -> bool:
    """All but finitely many entries are p-compact."""
    if isinstance(spec.tail, PeriodicCycle):
        return all(is_p_compact(g, p) for g in spec.tail.cycle)
    return True


def tail_bad_primes(spec: SeqSpec) -> PrimeSet:
    """Primes p for which infinitely many entries have an infinite [p]-part."""
    out = PrimeSet()
    if isinstance(spec.tail, PeriodicCycle):
        for g in spec.tail.cycle:
            out = out.union(bad_primes(g).infinite_p_part)
    return out


def last_violation(spec: SeqSpec, p: int) -> Optional[int]:
    """Largest index whose entry is not p-compact; None when every entry is."""
    if not tail_is_p_compact(spec, p):
        raise NotTame(f"infinitely many entries fail {p}-compactness")
    found = [i for i, g in enumerate(spec.prefix) if not is_p_compact(g, p)]
    if isinstance(spec.tail, HInfinityTail):
        t = hinf_last_violation(spec.tail.offset, p)
        if t is not None:
            return len(spec.prefix) + t
    return found[-1] if found else None


def last_nontorsion(spec: SeqSpec) -> Optional[int]:
    if not tail_is_torsion(spec):
        raise NotTame("infinitely many entries are not torsion")
    found = [i for i, g in enumerate(head_entries(spec)) if not is_torsion(g)]
    return found[-1] if found else None


# ── Regrouping ────────────────────────────────────────────


def regroup(spec: SeqSpec, cuts: List[int], tail_cycles: Optional[int] = None) -> SeqSpec:
    """Replace consecutive blocks by their direct sums.

    ``cuts`` are the block starts inside the prefix (strictly increasing,
    first 0; the last block runs to the end of the prefix). ``tail_cycles``
    groups the periodic tail into blocks of that many whole cycles.
    """
    size = len(spec.prefix)
    if cuts:
        if cuts[0] != 0:
            raise BadCuts("cuts must start at 0")
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise BadCuts("cuts must be strictly increasing")
        if cuts[-1] >= max(size, 1):
            raise BadCuts(f"cut {cuts[-1]} is not inside the prefix of length {size}")
    elif size:
        raise BadCuts("a nonempty prefix needs cuts starting at 0")

    bounds = list(cuts) + [size]
    prefix = [
        spec.prefix[a] if b - a == 1 else direct_sum(list(spec.prefix[a:b]))
        for a, b in zip(bounds, bounds[1:])
        if b > a
    ]

    tail = spec.tail
    if tail_cycles is not None:
        if not isinstance(tail, PeriodicCycle):
            raise BadCuts("only a periodic tail can be regrouped")
        if tail_cycles < 1:
            raise BadCuts("tail blocks must contain at least one cycle")
        tail = PeriodicCycle(cycle=(direct_sum(list(tail.cycle) * tail_cycles),))
    return SeqSpec(role=spec.role, prefix=tuple(prefix), tail=tail)


def rearrange(spec: SeqSpec) -> SeqSpec:
    """Merge entries 0..m into index 0, m the last non-torsion index.

    Only that block moves; torsion entries after it keep their positions,
    so [Z(2), Z, Z(3), Z(7)] becomes [sum(Z(2), Z), Z(3), Z(7)]. When m is
    the Ainf head of an ``hinf`` tail, the tail restarts at offset 1.
    Afterwards every entry from index 1 on is torsion.
    """
    m = last_nontorsion(spec)
    if m is None or m == 0:
        return spec
    logger.info("rearrange: merging entries 0..%d", m)
    merged = direct_sum(entries(spec, m + 1))
    tail = spec.tail
    if m >= len(spec.prefix):
        tail = HInfinityTail(offset=1)
    return SeqSpec(role=spec.role, prefix=(merged,) + tuple(spec.prefix[m + 1 :]), tail=tail)
