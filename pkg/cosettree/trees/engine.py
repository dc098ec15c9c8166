"""
cosettree — Finite-depth tree engine

Design patterns:
  - Value Object: LevelStructure (pydantic) and LevelTree (immutable class)
  - Strategy: FrontierMode decides how depth-d nodes behave under the derivative
  - Template Method: iterate_derivative drives height / rank / rank_table

A tree over levels H_0, ..., H_{d-1} keeps, for each 1 <= n <= d, the set
S ∩ H^n of its length-n nodes. A node of length n is stored as the flat
residue tuple of its coordinates in H^n = H_0 x ... x H_{n-1}, so
restriction σ↾m is a tuple slice and H^n arithmetic is FiniteAbelian
arithmetic on the concatenated orders.
"""

from __future__ import annotations

import logging
from enum import Enum
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_serializer, model_validator

from cosettree.algebra.finite import FiniteAbelian, Residues
from cosettree.algebra.ordinals import Ordinal
from cosettree.config import resolve_cap, settings
from cosettree.errors import CapExceeded, NodeNotInTree, NotCosetTree, StructureMismatch

logger = logging.getLogger(__name__)

Node = Residues
Coordinate = Union[int, Sequence[int]]


class FrontierMode(str, Enum):
    CLOSED = "closed"  # nothing exists beyond depth d
    OPEN = "open"  # depth-d nodes are presumed extendible


class RankValue(BaseModel):
    """Fin(k), or Core for nodes of the stabilized derivative."""

    model_config = ConfigDict(frozen=True)

    value: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="before")
    @classmethod
    def _from_plain(cls, data: Any) -> Any:
        if data == "core":
            return {"value": None}
        if isinstance(data, int) and not isinstance(data, bool):
            return {"value": data}
        return data

    @classmethod
    def fin(cls, k: int) -> "RankValue":
        return cls(value=k)

    @classmethod
    def core(cls) -> "RankValue":
        return cls(value=None)

    @property
    def is_core(self) -> bool:
        return self.value is None

    @model_serializer
    def _plain(self) -> Any:
        return "core" if self.value is None else self.value

    def __str__(self) -> str:
        return "core" if self.value is None else str(self.value)


# ── Level structures ──────────────────────────────────────


class LevelStructure(BaseModel):
    """H_0, ..., H_{d-1} with the derived products H^n."""

    model_config = ConfigDict(frozen=True)

    levels: Tuple[FiniteAbelian, ...] = Field(..., min_length=1)

    @classmethod
    def of(cls, *orders: Sequence[int]) -> "LevelStructure":
        return cls(levels=tuple(FiniteAbelian(orders=tuple(o)) for o in orders))

    @property
    def depth(self) -> int:
        return len(self.levels)

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        """offsets[n] = number of residues in a length-n node."""
        out = [0]
        for level in self.levels:
            out.append(out[-1] + level.rank)
        return tuple(out)

    @cached_property
    def _products(self) -> Tuple[FiniteAbelian, ...]:
        out = [FiniteAbelian()]
        for level in self.levels:
            out.append(out[-1].times(level))
        return tuple(out)

    def product(self, n: int) -> FiniteAbelian:
        """H^n."""
        return self._products[n]

    def check_cap(self, cap: Optional[int] = None) -> None:
        limit = resolve_cap(cap, settings.order_cap)
        total = self.product(self.depth).order
        if total > limit:
            raise CapExceeded(f"|H^{self.depth}| = {total} exceeds cap {limit}")

    def flatten(self, coords: Sequence[Coordinate]) -> Node:
        """Per-level coordinates -> flat node of length len(coords)."""
        if not 1 <= len(coords) <= self.depth:
            raise StructureMismatch(f"node length {len(coords)} outside 1..{self.depth}")
        flat: List[int] = []
        for level, c in zip(self.levels, coords):
            residues = (c,) if isinstance(c, int) else tuple(c)
            if not level.contains(residues):
                raise StructureMismatch(f"coordinate {list(residues)} does not fit level orders {list(level.orders)}")
            flat.extend(residues)
        return tuple(flat)

    def split(self, node: Node, n: int) -> List[List[int]]:
        """Flat node of length n -> per-level coordinate lists."""
        return [list(node[self.offsets[i]:self.offsets[i + 1]]) for i in range(n)]

    def restrict(self, node: Node, m: int) -> Node:
        """σ↾m."""
        return node[: self.offsets[m]]


# ── Trees ─────────────────────────────────────────────────


class LevelTree:
    """Immutable prefix-closed tree of finite depth."""

    __slots__ = ("structure", "_levels")

    def __init__(
        self,
        structure: LevelStructure,
        levels: Sequence[Iterable[Node]],
        *,
        validate: bool = True,
        cap: Optional[int] = None,
    ) -> None:
        if len(levels) != structure.depth:
            raise StructureMismatch(f"expected {structure.depth} levels, got {len(levels)}")
        self.structure = structure
        self._levels: Tuple[FrozenSet[Node], ...] = tuple(frozenset(level) for level in levels)
        if validate:
            self._validate(cap)

    def _validate(self, cap: Optional[int]) -> None:
        limit = resolve_cap(cap, settings.node_cap)
        if self.size > limit:
            raise CapExceeded(f"tree has {self.size} nodes, cap {limit}")
        for n in range(1, self.depth + 1):
            shape = self.structure.product(n)
            for node in self._levels[n - 1]:
                if not shape.contains(node):
                    raise StructureMismatch(f"node {list(node)} is not an element of H^{n}")
                if n > 1 and self.structure.restrict(node, n - 1) not in self._levels[n - 2]:
                    raise StructureMismatch(f"node {list(node)} at length {n} has no parent in the tree")

    # ── Access ────────────────────────────────────────────

    @property
    def depth(self) -> int:
        return self.structure.depth

    def level(self, n: int) -> FrozenSet[Node]:
        """S ∩ H^n (1 <= n <= depth)."""
        return self._levels[n - 1]

    def nodes(self, n: int) -> List[Node]:
        """Level n in canonical (lexicographic) order."""
        return sorted(self._levels[n - 1])

    def all_nodes(self) -> Iterable[Tuple[int, Node]]:
        for n in range(1, self.depth + 1):
            for node in self.nodes(n):
                yield n, node

    @property
    def size(self) -> int:
        return sum(len(level) for level in self._levels)

    @property
    def is_empty(self) -> bool:
        return not self._levels[0]

    def contains(self, n: int, node: Node) -> bool:
        return node in self._levels[n - 1]

    def is_subtree_of(self, other: "LevelTree") -> bool:
        return self.structure == other.structure and all(a <= b for a, b in zip(self._levels, other._levels))

    def with_levels(self, levels: Sequence[Iterable[Node]]) -> "LevelTree":
        """Same structure, new node sets (trusted: callers preserve prefix closure)."""
        return LevelTree(self.structure, levels, validate=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LevelTree):
            return NotImplemented
        return self.structure == other.structure and self._levels == other._levels

    def __hash__(self) -> int:
        return hash((self.structure, self._levels))

    def __repr__(self) -> str:
        sizes = [len(level) for level in self._levels]
        return f"LevelTree(depth={self.depth}, level_sizes={sizes})"


def empty_tree(structure: LevelStructure) -> LevelTree:
    return LevelTree(structure, [()] * structure.depth, validate=False)


def node_of(s: LevelTree, coords: Sequence[Coordinate]) -> Tuple[int, Node]:
    """Resolve per-level coordinates to (length, flat node)."""
    return len(coords), s.structure.flatten(coords)


def _require_node(s: LevelTree, coords: Sequence[Coordinate]) -> Tuple[int, Node]:
    n, node = node_of(s, coords)
    if not s.contains(n, node):
        raise NodeNotInTree(f"node {[list(c) if not isinstance(c, int) else [c] for c in coords]} is not in the tree")
    return n, node


# ── Construction ──────────────────────────────────────────


def full_tree(ls: LevelStructure, *, cap: Optional[int] = None) -> LevelTree:
    """T_H: every tuple at every level."""
    ls.check_cap(cap)
    limit = resolve_cap(cap, settings.node_cap)
    total = sum(ls.product(n).order for n in range(1, ls.depth + 1))
    if total > limit:
        raise CapExceeded(f"full tree would have {total} nodes, cap {limit}")
    return LevelTree(ls, [ls.product(n).elements() for n in range(1, ls.depth + 1)], validate=False)


def subgroup_tree(ls: LevelStructure, generators: Sequence[Iterable[Node]]) -> LevelTree:
    """Levelwise generated subgroups, closed downward so the result is prefix-closed.

    generators[n-1] are flat elements of H^n; level n becomes the subgroup
    generated by them together with lifts of nothing else, and level n-1
    is enlarged by the projections of level n.
    """
    d = ls.depth
    groups: List[set] = [set() for _ in range(d)]
    for n in range(d, 0, -1):
        shape = ls.product(n)
        gens = set(generators[n - 1]) if n - 1 < len(generators) else set()
        if n < d:
            gens |= {ls.restrict(x, n) for x in groups[n]}
        groups[n - 1] = shape.closure(sorted(gens))
    return LevelTree(ls, groups)


def coset_tree(ls: LevelStructure, generators: Sequence[Iterable[Node]], shift: Node) -> LevelTree:
    """shift + subgroup_tree(generators), shift a full-length node."""
    return translate(subgroup_tree(ls, generators), shift)


# ── Group / coset predicates ──────────────────────────────


def is_group_tree(s: LevelTree) -> bool:
    """Every level nonempty and a subgroup of H^n."""
    for n in range(1, s.depth + 1):
        level = s.level(n)
        if not level or not s.structure.product(n).is_subgroup(level):
            return False
    return True


def is_coset_tree(s: LevelTree) -> bool:
    """Every nonempty level closed under a - b + c."""
    return all(s.structure.product(n).is_coset(s.level(n)) for n in range(1, s.depth + 1))


def node_order(s: LevelTree, n: int, node: Node) -> int:
    return s.structure.product(n).order_of(node)


# ── Derivatives ───────────────────────────────────────────


def derivative(s: LevelTree, mode: FrontierMode = FrontierMode.CLOSED) -> LevelTree:
    """D(S): nodes with a proper extension, computed as levelwise projections.

    By prefix closure D(S) ∩ H^n is the image of S ∩ H^{n+1} under σ ↦ σ↾n.
    """
    ls = s.structure
    levels: List[FrozenSet[Node]] = []
    for n in range(1, s.depth):
        cut = ls.offsets[n]
        levels.append(frozenset(node[:cut] for node in s.level(n + 1)))
    levels.append(s.level(s.depth) if mode == FrontierMode.OPEN else frozenset())
    return s.with_levels(levels)


def derivative_by_definition(s: LevelTree, mode: FrontierMode = FrontierMode.CLOSED) -> LevelTree:
    """D(S) node by node: σ survives iff some τ ∈ S with σ ⊆ τ is strictly longer."""
    ls = s.structure
    levels: List[List[Node]] = []
    for n in range(1, s.depth + 1):
        keep = []
        for sigma in s.level(n):
            if n == s.depth:
                if mode == FrontierMode.OPEN:
                    keep.append(sigma)
                continue
            cut = ls.offsets[n]
            if any(tau[:cut] == sigma for m in range(n + 1, s.depth + 1) for tau in s.level(m)):
                keep.append(sigma)
        levels.append(keep)
    return s.with_levels(levels)


def iterate_derivative(s: LevelTree, mode: FrontierMode = FrontierMode.CLOSED) -> List[LevelTree]:
    """[S, D(S), D²(S), ...] ending at the first fixpoint (listed once)."""
    stages = [s]
    while True:
        nxt = derivative(stages[-1], mode)
        if nxt == stages[-1]:
            return stages
        stages.append(nxt)
        logger.debug("derivative stage %d: %d nodes", len(stages) - 1, nxt.size)


def height(s: LevelTree, mode: FrontierMode = FrontierMode.CLOSED) -> Ordinal:
    """Number of strict derivative steps before the fixpoint."""
    return Ordinal.finite(len(iterate_derivative(s, mode)) - 1)


def is_wellfounded_at_depth(s: LevelTree, mode: FrontierMode = FrontierMode.CLOSED) -> bool:
    """The stabilized derivative is empty."""
    return iterate_derivative(s, mode)[-1].is_empty


def _ranks(stages: List[LevelTree]) -> Dict[Tuple[int, Node], RankValue]:
    first = stages[0]
    out: Dict[Tuple[int, Node], RankValue] = {}
    for n, node in first.all_nodes():
        k = 0
        while k + 1 < len(stages) and stages[k + 1].contains(n, node):
            k += 1
        if k == len(stages) - 1:
            out[(n, node)] = RankValue.core()
        else:
            out[(n, node)] = RankValue.fin(k)
    return out


def rank_of(s: LevelTree, coords: Sequence[Coordinate], mode: FrontierMode = FrontierMode.CLOSED) -> RankValue:
    """Fin(k) for the k with σ ∈ D^k(S) \\ D^{k+1}(S); Core inside the fixpoint."""
    n, node = _require_node(s, coords)
    return _ranks(iterate_derivative(s, mode))[(n, node)]


def rank_table(s: LevelTree, mode: FrontierMode = FrontierMode.CLOSED) -> List[Tuple[int, Node, RankValue]]:
    """Every node with its rank, in canonical order."""
    ranks = _ranks(iterate_derivative(s, mode))
    return [(n, node, ranks[(n, node)]) for n, node in s.all_nodes()]


# ── Γ(S), translation, subtrees ───────────────────────────


def gamma_report(s: LevelTree) -> Tuple[LevelTree, List[int]]:
    """Γ(S) and the levels where the zero-singleton rule fired."""
    if not is_coset_tree(s):
        raise NotCosetTree("Γ is only defined on coset trees")
    ls = s.structure
    levels: List[set] = []
    zero_filled: List[int] = []
    for n in range(1, s.depth + 1):
        shape = ls.product(n)
        level = s.level(n)
        if level:
            base = min(level)
            levels.append({shape.sub(x, base) for x in level})
        else:
            levels.append({shape.zero})
            zero_filled.append(n)
    if zero_filled:
        logger.warning("Γ filled empty levels %s with the zero singleton", zero_filled)
    return s.with_levels(levels), zero_filled


def gamma(s: LevelTree) -> LevelTree:
    """Canonical group tree of a coset tree: each level translated to contain zero."""
    return gamma_report(s)[0]


def _full_length(s: LevelTree, x: Node) -> Node:
    if not s.structure.product(s.depth).contains(x):
        raise StructureMismatch(f"translator {list(x)} is not an element of H^{s.depth}")
    return x


def translate(s: LevelTree, x: Node) -> LevelTree:
    """x + S, x a flat node of full length d."""
    x = _full_length(s, x)
    ls = s.structure
    levels = []
    for n in range(1, s.depth + 1):
        shape = ls.product(n)
        xn = ls.restrict(x, n)
        levels.append({shape.add(xn, node) for node in s.level(n)})
    return s.with_levels(levels)


def subtree_at(s: LevelTree, coords: Sequence[Coordinate]) -> LevelTree:
    """S_σ: the nodes comparable with σ."""
    n, sigma = _require_node(s, coords)
    ls = s.structure
    levels: List[set] = []
    for m in range(1, s.depth + 1):
        if m <= n:
            levels.append({ls.restrict(sigma, m)})
        else:
            cut = ls.offsets[n]
            levels.append({tau for tau in s.level(m) if tau[:cut] == sigma})
    return s.with_levels(levels)


def branch_order_violations(s: LevelTree) -> List[Tuple[int, Node]]:
    """Nodes σ whose restriction σ↾(n-1) has an order not dividing order(σ)."""
    ls = s.structure
    bad = []
    for n in range(2, s.depth + 1):
        shape, parent_shape = ls.product(n), ls.product(n - 1)
        for node in s.level(n):
            if shape.order_of(node) % parent_shape.order_of(ls.restrict(node, n - 1)):
                bad.append((n, node))
    return bad

