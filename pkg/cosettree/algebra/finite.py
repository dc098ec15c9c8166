"""
cosettree — Explicit finite abelian groups

Design patterns:
  - Value Object: FiniteAbelian / GroupElement are frozen pydantic models
  - Fast path: the tree engine works on raw residue tuples through the
    FiniteAbelian methods; GroupElement wraps them for the public API

A FiniteAbelian is Z(n_1) x ... x Z(n_k); elements are residue tuples.
"""

from __future__ import annotations

import itertools
from math import gcd, prod
from typing import AbstractSet, Iterable, Iterator, List, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from cosettree.errors import ShapeMismatch

Residues = Tuple[int, ...]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class FiniteAbelian(BaseModel):
    model_config = ConfigDict(frozen=True)

    orders: Tuple[int, ...] = Field(default=())

    @model_validator(mode="after")
    def _positive(self) -> "FiniteAbelian":
        if any(n < 1 for n in self.orders):
            raise ValueError(f"cyclic orders must be >= 1, got {self.orders}")
        return self

    # ── Shape facts ───────────────────────────────────────

    @property
    def order(self) -> int:
        return prod(self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def times(self, other: "FiniteAbelian") -> "FiniteAbelian":
        return FiniteAbelian(orders=self.orders + other.orders)

    # ── Raw residue arithmetic ────────────────────────────

    @property
    def zero(self) -> Residues:
        return (0,) * len(self.orders)

    def contains(self, a: Residues) -> bool:
        return len(a) == len(self.orders) and all(0 <= x < n for x, n in zip(a, self.orders))

    def add(self, a: Residues, b: Residues) -> Residues:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def sub(self, a: Residues, b: Residues) -> Residues:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.orders))

    def neg(self, a: Residues) -> Residues:
        return tuple((-x) % n for x, n in zip(a, self.orders))

    def scale(self, k: int, a: Residues) -> Residues:
        return tuple((k * x) % n for x, n in zip(a, self.orders))

    def order_of(self, a: Residues) -> int:
        """Least m >= 1 with m*a = 0."""
        m = 1
        for x, n in zip(a, self.orders):
            m = _lcm(m, n // gcd(n, x))
        return m

    def elements(self) -> Iterator[Residues]:
        """All elements, lexicographic in residues."""
        return itertools.product(*(range(n) for n in self.orders))

    # ── Subsets ───────────────────────────────────────────

    def closure(self, xs: Iterable[Residues]) -> Set[Residues]:
        """Subgroup generated by xs."""
        group: Set[Residues] = {self.zero}
        for x in xs:
            if x not in group:
                group = self._extend(group, x)
        return group

    def _extend(self, group: Set[Residues], x: Residues) -> Set[Residues]:
        multiples = [self.zero]
        y = x
        while y != self.zero:
            multiples.append(y)
            y = self.add(y, x)
        return {self.add(h, m) for h in group for m in multiples}

    def is_subgroup(self, xs: AbstractSet[Residues]) -> bool:
        """Contains zero and is closed under subtraction."""
        if self.zero not in xs:
            return False
        group: Set[Residues] = {self.zero}
        for x in sorted(xs):
            if x in group:
                continue
            group = self._extend(group, x)
            if len(group) > len(xs) or not group <= xs:
                return False
        return len(group) == len(xs)

    def is_coset(self, xs: AbstractSet[Residues]) -> bool:
        """a - b + c in xs for all a, b, c in xs (the empty set qualifies)."""
        if not xs:
            return True
        a = min(xs)
        return self.is_subgroup({self.sub(x, a) for x in xs})


class GroupElement(BaseModel):
    """A residue tuple paired with its shape."""

    model_config = ConfigDict(frozen=True)

    shape: FiniteAbelian
    residues: Residues

    @model_validator(mode="after")
    def _in_range(self) -> "GroupElement":
        if not self.shape.contains(self.residues):
            raise ValueError(f"residues {self.residues} do not fit orders {self.shape.orders}")
        return self


def _same_shape(a: GroupElement, b: GroupElement) -> FiniteAbelian:
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape.orders} and {b.shape.orders} differ")
    return a.shape


def element(shape: FiniteAbelian, *residues: int) -> GroupElement:
    return GroupElement(shape=shape, residues=tuple(residues))


def add(a: GroupElement, b: GroupElement) -> GroupElement:
    shape = _same_shape(a, b)
    return GroupElement(shape=shape, residues=shape.add(a.residues, b.residues))


def sub(a: GroupElement, b: GroupElement) -> GroupElement:
    shape = _same_shape(a, b)
    return GroupElement(shape=shape, residues=shape.sub(a.residues, b.residues))


def negate(a: GroupElement) -> GroupElement:
    return GroupElement(shape=a.shape, residues=a.shape.neg(a.residues))


def order(a: GroupElement) -> int:
    return a.shape.order_of(a.residues)


def zero(shape: FiniteAbelian) -> GroupElement:
    return GroupElement(shape=shape, residues=shape.zero)


def enumerate_elements(shape: FiniteAbelian) -> List[GroupElement]:
    return [GroupElement(shape=shape, residues=r) for r in shape.elements()]


def _residue_set(shape: FiniteAbelian, xs: Iterable[GroupElement]) -> Set[Residues]:
    out = set()
    for x in xs:
        if x.shape != shape:
            raise ShapeMismatch(f"element of shape {x.shape.orders} in a set over {shape.orders}")
        out.add(x.residues)
    return out


def is_subgroup(shape: FiniteAbelian, xs: Iterable[GroupElement]) -> bool:
    return shape.is_subgroup(_residue_set(shape, xs))


def is_coset(shape: FiniteAbelian, xs: Iterable[GroupElement]) -> bool:
    return shape.is_coset(_residue_set(shape, xs))


def closure(shape: FiniteAbelian, xs: Iterable[GroupElement]) -> List[GroupElement]:
    """Generated subgroup, in lexicographic order."""
    group = shape.closure(sorted(_residue_set(shape, xs)))
    return [GroupElement(shape=shape, residues=r) for r in sorted(group)]


def scale(k: int, a: GroupElement) -> GroupElement:
    return GroupElement(shape=a.shape, residues=a.shape.scale(k, a.residues))


def coset_of(a: GroupElement, subgroup: Iterable[GroupElement]) -> List[GroupElement]:
    """a + subgroup, in lexicographic order."""
    shape = a.shape
    return [
        GroupElement(shape=shape, residues=r)
        for r in sorted({shape.add(a.residues, h) for h in _residue_set(shape, subgroup)})
    ]
