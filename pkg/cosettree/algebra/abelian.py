"""
cosettree — Decision procedures on symbolic abelian groups

Design patterns:
  - Interpreter: each decision is a structural recursion over GroupExpr
  - Value Object: Cardinal / PrimeSet / DivNormalForm are frozen models

Covers torsion, order-p counts, p-compactness, bad primes, p-components,
divisible hulls, the restricted embedding test and concretization of
finite expressions.
"""

from __future__ import annotations

import logging
from math import prod
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import sympy
from pydantic import BaseModel, ConfigDict, Field, model_validator

from cosettree.algebra.expr import (
    AInfinity,
    Cyclic,
    FinSupPower,
    GroupExpr,
    IntZ,
    PrimeTail,
    Quasicyclic,
    RatQ,
    Sum,
    Zero,
    ZERO,
    direct_sum,
    format_expr,
    normalize,
    nth_prime,
    prime_index,
    require_prime,
    summands,
)
from cosettree.algebra.finite import FiniteAbelian
from cosettree.config import resolve_cap, settings
from cosettree.errors import CapExceeded, InfiniteGroup, NonTorsionInput, UnsupportedComparison

logger = logging.getLogger(__name__)

FINSUP = "finsup"
Multiplicity = Union[int, Literal["finsup"]]


# ── Value types ───────────────────────────────────────────


class Cardinal(BaseModel):
    """Fin(n) when ``count`` is set, CountablyInfinite when it is None."""

    model_config = ConfigDict(frozen=True)

    count: Optional[int] = Field(default=None, ge=0)

    @classmethod
    def fin(cls, n: int) -> "Cardinal":
        return cls(count=n)

    @classmethod
    def countably_infinite(cls) -> "Cardinal":
        return cls(count=None)

    @property
    def is_finite(self) -> bool:
        return self.count is not None

    def __mul__(self, other: "Cardinal") -> "Cardinal":
        if self.count == 0 or other.count == 0:
            return Cardinal.fin(0)
        if self.count is None or other.count is None:
            return Cardinal.countably_infinite()
        return Cardinal.fin(self.count * other.count)

    def __str__(self) -> str:
        return "aleph0" if self.count is None else str(self.count)


ONE = Cardinal.fin(1)
ALEPH0 = Cardinal.countably_infinite()


class PrimeSet(BaseModel):
    """Finite set of primes, optionally plus every prime p_i with i >= ``from_index``."""

    model_config = ConfigDict(frozen=True)

    primes: Tuple[int, ...] = ()
    from_index: Optional[int] = Field(default=None, ge=0)

    @classmethod
    def of(cls, primes, from_index: Optional[int] = None) -> "PrimeSet":
        ps = sorted(set(primes))
        if from_index is not None:
            ps = [p for p in ps if prime_index(p) < from_index]
        return cls(primes=tuple(ps), from_index=from_index)

    @classmethod
    def all_primes(cls) -> "PrimeSet":
        return cls(primes=(), from_index=0)

    @property
    def is_all_primes(self) -> bool:
        return self.from_index == 0

    @property
    def is_empty(self) -> bool:
        return not self.primes and self.from_index is None

    def __contains__(self, p: int) -> bool:
        if p in self.primes:
            return True
        return self.from_index is not None and prime_index(p) >= self.from_index

    def union(self, other: "PrimeSet") -> "PrimeSet":
        idx = [i for i in (self.from_index, other.from_index) if i is not None]
        return PrimeSet.of(self.primes + other.primes, min(idx) if idx else None)

    def explicit(self, upto_index: int) -> List[int]:
        """Members among p_0 .. p_{upto_index - 1}."""
        return [nth_prime(i) for i in range(upto_index) if nth_prime(i) in self]

    def __str__(self) -> str:
        parts = [str(p) for p in self.primes]
        if self.from_index is not None:
            parts.append(f"p_i for i>={self.from_index}")
        return "{" + ", ".join(parts) + "}"


class BadPrimes(BaseModel):
    model_config = ConfigDict(frozen=True)

    nontorsion: bool
    infinite_p_part: PrimeSet


class DivNormalForm(BaseModel):
    """(+)_p Z(p^inf)^{m_p}; ``finsup`` marks Z(p^inf)^{<w}.

    ``finsup_from`` extends the finsup mark to every prime p_i with i >= it.
    """

    model_config = ConfigDict(frozen=True)

    multiplicities: Dict[int, Multiplicity] = Field(default_factory=dict)
    finsup_from: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="before")
    @classmethod
    def _drop_covered(cls, data: Any) -> Any:
        """Entries for primes under the finsup tail carry no information."""
        if not isinstance(data, dict) or data.get("finsup_from") is None:
            return data
        start = int(data["finsup_from"])
        mults = data.get("multiplicities") or {}
        kept = {p: m for p, m in mults.items() if prime_index(int(p)) < start}
        return {**data, "multiplicities": kept}

    def multiplicity(self, p: int) -> Multiplicity:
        if self.finsup_from is not None and prime_index(p) >= self.finsup_from:
            return FINSUP
        return self.multiplicities.get(p, 0)

    def primes(self) -> List[int]:
        return sorted(p for p, m in self.multiplicities.items() if m != 0)


class PrimeComparison(BaseModel):
    prime: int
    left: Multiplicity
    right: Multiplicity
    holds: bool


class EmbeddingCertificate(BaseModel):
    """Outcome of ``embeds`` with the per-prime evidence behind it."""

    holds: bool
    via_universality: bool = False
    comparisons: List[PrimeComparison] = Field(default_factory=list)
    tail_note: Optional[str] = None

    def __bool__(self) -> bool:
        return self.holds


# ── Multiplicity arithmetic ───────────────────────────────


def _madd(a: Multiplicity, b: Multiplicity) -> Multiplicity:
    if a == FINSUP or b == FINSUP:
        return FINSUP
    return a + b  # type: ignore[operator]


def _mle(a: Multiplicity, b: Multiplicity) -> bool:
    if b == FINSUP:
        return True
    if a == FINSUP:
        return False
    return a <= b  # type: ignore[operator]


# ── Torsion and order-p counts ────────────────────────────


def is_torsion(g: GroupExpr) -> bool:
    if isinstance(g, (IntZ, RatQ, AInfinity)):
        return False
    if isinstance(g, (Zero, Cyclic, Quasicyclic, PrimeTail)):
        return True
    if isinstance(g, Sum):
        return all(is_torsion(p) for p in g.parts)
    if isinstance(g, FinSupPower):
        return is_torsion(g.base)
    raise TypeError(f"not a GroupExpr: {g!r}")


def order_p_count(g: GroupExpr, p: int) -> Cardinal:
    """|g[p]|, the number of elements killed by p."""
    require_prime(p)
    return _order_p_count(g, p)


def _order_p_count(g: GroupExpr, p: int) -> Cardinal:
    if isinstance(g, (Zero, IntZ, RatQ)):
        return ONE
    if isinstance(g, Cyclic):
        return Cardinal.fin(p) if g.n % p == 0 else ONE
    if isinstance(g, Quasicyclic):
        return Cardinal.fin(p) if g.p == p else ONE
    if isinstance(g, Sum):
        total = ONE
        for part in g.parts:
            total = total * _order_p_count(part, p)
        return total
    if isinstance(g, FinSupPower):
        return ONE if _order_p_count(g.base, p) == ONE else ALEPH0
    if isinstance(g, AInfinity):
        return ALEPH0
    if isinstance(g, PrimeTail):
        return ALEPH0 if prime_index(p) >= g.start else ONE
    raise TypeError(f"not a GroupExpr: {g!r}")


def is_p_compact(g: GroupExpr, p: int) -> bool:
    """Torsion with finitely many elements of order p."""
    return is_torsion(g) and order_p_count(g, p).is_finite


def torsion_primes(g: GroupExpr) -> PrimeSet:
    """Primes p with g[p] nontrivial."""
    if isinstance(g, (Zero, IntZ, RatQ)):
        return PrimeSet()
    if isinstance(g, Cyclic):
        return PrimeSet.of(sympy.factorint(g.n).keys())
    if isinstance(g, Quasicyclic):
        return PrimeSet.of([g.p])
    if isinstance(g, Sum):
        out = PrimeSet()
        for part in g.parts:
            out = out.union(torsion_primes(part))
        return out
    if isinstance(g, FinSupPower):
        return torsion_primes(g.base)
    if isinstance(g, AInfinity):
        return PrimeSet.all_primes()
    if isinstance(g, PrimeTail):
        return PrimeSet(from_index=g.start)
    raise TypeError(f"not a GroupExpr: {g!r}")


def _infinite_part(g: GroupExpr) -> PrimeSet:
    if isinstance(g, Sum):
        out = PrimeSet()
        for part in g.parts:
            out = out.union(_infinite_part(part))
        return out
    if isinstance(g, FinSupPower):
        return torsion_primes(g.base)
    if isinstance(g, AInfinity):
        return PrimeSet.all_primes()
    if isinstance(g, PrimeTail):
        return PrimeSet(from_index=g.start)
    return PrimeSet()


def bad_primes(g: GroupExpr) -> BadPrimes:
    """Both failure modes of p-compactness, across all primes at once."""
    return BadPrimes(nontorsion=not is_torsion(g), infinite_p_part=_infinite_part(g))


def primes_of(g: GroupExpr) -> List[int]:
    """Explicitly mentioned primes: divisors of moduli and quasicyclic parameters."""
    found = set()

    def walk(h: GroupExpr) -> None:
        if isinstance(h, Cyclic):
            found.update(sympy.factorint(h.n).keys())
        elif isinstance(h, Quasicyclic):
            found.add(h.p)
        elif isinstance(h, Sum):
            for part in h.parts:
                walk(part)
        elif isinstance(h, FinSupPower):
            walk(h.base)

    walk(g)
    return sorted(found)


# ── p-components and divisible hulls ──────────────────────


def _require_torsion(g: GroupExpr) -> None:
    if not is_torsion(g):
        raise NonTorsionInput(f"{format_expr(g)} is not torsion")


def p_component(g: GroupExpr, p: int) -> GroupExpr:
    require_prime(p)
    _require_torsion(g)
    return normalize(_p_component(g, p))


def _p_component(g: GroupExpr, p: int) -> GroupExpr:
    if isinstance(g, Zero):
        return ZERO
    if isinstance(g, Cyclic):
        v = sympy.multiplicity(p, g.n)
        return Cyclic(p ** v) if v else ZERO
    if isinstance(g, Quasicyclic):
        return g if g.p == p else ZERO
    if isinstance(g, Sum):
        return Sum(*(_p_component(part, p) for part in g.parts))
    if isinstance(g, FinSupPower):
        return FinSupPower(_p_component(g.base, p))
    if isinstance(g, PrimeTail):
        return FinSupPower(Quasicyclic(p)) if prime_index(p) >= g.start else ZERO
    raise NonTorsionInput(f"{format_expr(g)} is not torsion")


def divisible_hull(g: GroupExpr) -> DivNormalForm:
    """Multiplicity table of a divisible torsion group containing g."""
    _require_torsion(g)
    mults, tail = _hull(g)
    return DivNormalForm(
        multiplicities={p: m for p, m in sorted(mults.items()) if m != 0},
        finsup_from=tail,
    )


def _hull(g: GroupExpr) -> Tuple[Dict[int, Multiplicity], Optional[int]]:
    if isinstance(g, Zero):
        return {}, None
    if isinstance(g, Cyclic):
        # one Z(p^inf) per cyclic p-power factor
        return {p: 1 for p in sympy.factorint(g.n)}, None
    if isinstance(g, Quasicyclic):
        return {g.p: 1}, None
    if isinstance(g, PrimeTail):
        return {}, g.start
    if isinstance(g, FinSupPower):
        tp = torsion_primes(g.base)
        return {p: FINSUP for p in tp.primes}, tp.from_index
    if isinstance(g, Sum):
        mults: Dict[int, Multiplicity] = {}
        tail: Optional[int] = None
        for part in g.parts:
            pm, pt = _hull(part)
            for p, m in pm.items():
                mults[p] = _madd(mults.get(p, 0), m)
            if pt is not None:
                tail = pt if tail is None else min(tail, pt)
        return mults, tail
    raise NonTorsionInput(f"{format_expr(g)} is not torsion")


# ── Restricted embedding test ─────────────────────────────


def _has_ainf_summand(k: GroupExpr) -> bool:
    return any(isinstance(part, AInfinity) for part in summands(k))


def _divisible_form_of(k: GroupExpr) -> DivNormalForm:
    """Multiplicities of a target that is already a sum of divisible parts."""
    for part in summands(k):
        if isinstance(part, (Quasicyclic, PrimeTail)):
            continue
        if isinstance(part, FinSupPower) and isinstance(normalize(part.base), Quasicyclic):
            continue
        raise UnsupportedComparison(
            f"target part {format_expr(part)} is outside the quasicyclic normal forms"
        )
    return divisible_hull(k)


def embeds(l: Union[DivNormalForm, GroupExpr], k: GroupExpr) -> EmbeddingCertificate:
    """Decide l <= k on the normal forms of the universal-group construction.

    Unconditionally true when k has an A_inf summand; otherwise l is taken
    to its divisible hull and compared prime by prime with k.
    """
    if _has_ainf_summand(k):
        return EmbeddingCertificate(
            holds=True,
            via_universality=True,
            tail_note="A_inf is a universal countable abelian group",
        )
    if isinstance(l, DivNormalForm):
        left = l
    else:
        if not is_torsion(l):
            raise UnsupportedComparison(f"source {format_expr(l)} is not torsion")
        left = divisible_hull(l)
    right = _divisible_form_of(k)

    primes = sorted(set(left.primes()) | set(right.primes()))
    comparisons = []
    for p in primes:
        a, b = left.multiplicity(p), right.multiplicity(p)
        comparisons.append(PrimeComparison(prime=p, left=a, right=b, holds=_mle(a, b)))
    holds = all(c.holds for c in comparisons)

    tail_note = None
    if left.finsup_from is not None:
        if right.finsup_from is None:
            holds = False
            tail_note = f"source has finsup at every p_i, i>={left.finsup_from}; target has no such tail"
        else:
            gap = range(left.finsup_from, right.finsup_from)
            missing = [nth_prime(i) for i in gap if right.multiplicity(nth_prime(i)) != FINSUP]
            if missing:
                holds = False
                tail_note = f"target lacks finsup at primes {missing}"
            else:
                tail_note = f"finsup tails: source from p_{left.finsup_from}, target from p_{right.finsup_from}"
    return EmbeddingCertificate(holds=holds, comparisons=comparisons, tail_note=tail_note)


# ── Finite expressions ────────────────────────────────────


def is_finite(g: GroupExpr) -> bool:
    if isinstance(g, (Zero, Cyclic)):
        return True
    if isinstance(g, Sum):
        return all(is_finite(p) for p in g.parts)
    return False


def _cyclic_orders(g: GroupExpr) -> List[int]:
    if isinstance(g, Zero):
        return []
    if isinstance(g, Cyclic):
        return [g.n]
    if isinstance(g, Sum):
        return [n for part in g.parts for n in _cyclic_orders(part)]
    raise InfiniteGroup(f"{format_expr(g)} is not a finite group")


def group_order(g: GroupExpr) -> int:
    if not is_finite(g):
        raise InfiniteGroup(f"{format_expr(g)} is not a finite group")
    return prod(_cyclic_orders(normalize(g)))


def concretize(g: GroupExpr, *, cap: Optional[int] = None) -> FiniteAbelian:
    """Explicit product of cyclic groups, left to right in normal form."""
    limit = resolve_cap(cap, settings.order_cap)
    orders = _cyclic_orders(normalize(g))
    if prod(orders) > limit:
        raise CapExceeded(f"{format_expr(g)} has order {prod(orders)} > cap {limit}")
    return FiniteAbelian(orders=tuple(orders))


def from_finite(shape: FiniteAbelian) -> GroupExpr:
    """Inverse of concretize (order-1 factors vanish)."""
    return direct_sum([Cyclic(n) for n in shape.orders if n > 1])
