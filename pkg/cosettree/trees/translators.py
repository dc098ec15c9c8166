"""
cosettree — Partial translators: Φ(S, S′), Ψ and orbit decisions

Design patterns:
  - Specification: a node of the ambient tree belongs to Φ(S, S′) iff every
    restriction σ↾m translates S ∩ H^m onto S′ ∩ H^m
  - Oracle: brute_force_translators checks whole-tree translates directly

The ambient tree plays the role of T_G; it defaults to the full tree and
must be a group tree over the same structure.
"""

from __future__ import annotations

import logging
from typing import FrozenSet, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel

from cosettree.errors import StructureMismatch
from cosettree.trees.engine import LevelTree, Node, full_tree, is_group_tree, translate

logger = logging.getLogger(__name__)


class OrbitDecision(BaseModel):
    equivalent_at_depth: bool
    translator: Optional[Tuple[int, ...]] = None


def _check_shared(trees: Sequence[LevelTree], ambient: LevelTree) -> None:
    for t in trees:
        if t.structure != ambient.structure:
            raise StructureMismatch("trees and ambient tree must share one level structure")
    if not is_group_tree(ambient):
        raise StructureMismatch("ambient tree must be a group tree")


def _resolve_ambient(s: LevelTree, ambient: Optional[LevelTree]) -> LevelTree:
    return ambient if ambient is not None else full_tree(s.structure)


def _level_translators(s: LevelTree, s2: LevelTree, ambient: LevelTree, n: int) -> Optional[Set[Node]]:
    """{x ∈ H^n : x + (S ∩ H^n) = S′ ∩ H^n}; None stands for all of H^n."""
    a, b = s.level(n), s2.level(n)
    if not a and not b:
        return None
    if not a or not b or len(a) != len(b):
        return set()
    shape = s.structure.product(n)
    base = min(a)
    out = set()
    for y in b:
        x = shape.sub(y, base)
        if x in ambient.level(n) and all(shape.add(x, z) in b for z in a):
            out.add(x)
    return out


def phi(s: LevelTree, s2: LevelTree, ambient: Optional[LevelTree] = None) -> LevelTree:
    """Φ(S, S′): ambient nodes σ with (σ↾m) + (S ∩ H^m) = S′ ∩ H^m for all m <= lh(σ)."""
    ambient = _resolve_ambient(s, ambient)
    _check_shared([s, s2], ambient)
    ls = s.structure
    levels: List[FrozenSet[Node]] = []
    prev: Optional[FrozenSet[Node]] = None
    for n in range(1, s.depth + 1):
        allowed = _level_translators(s, s2, ambient, n)
        candidates = ambient.level(n) if allowed is None else allowed
        if prev is not None:
            candidates = {x for x in candidates if ls.restrict(x, n - 1) in prev}
        prev = frozenset(candidates)
        levels.append(prev)
    return s.with_levels(levels)


def psi(pairs: Sequence[Tuple[LevelTree, LevelTree]], ambient: LevelTree) -> LevelTree:
    """Ψ: levelwise intersection of Φ over the pairs (the ambient itself when there are none)."""
    _check_shared([t for pair in pairs for t in pair], ambient)
    out = ambient
    for s, s2 in pairs:
        f = phi(s, s2, ambient)
        out = out.with_levels([out.level(n) & f.level(n) for n in range(1, out.depth + 1)])
    return out


def orbit_equivalent(s: LevelTree, s2: LevelTree, ambient: Optional[LevelTree] = None) -> OrbitDecision:
    """Φ(S, S′) has a node at full depth; the least such node is the translator."""
    f = phi(s, s2, ambient)
    top = f.level(f.depth)
    if not top:
        return OrbitDecision(equivalent_at_depth=False)
    x = min(top)
    logger.debug("orbit translator %s", x)
    return OrbitDecision(equivalent_at_depth=True, translator=x)


def brute_force_translators(s: LevelTree, s2: LevelTree, ambient: Optional[LevelTree] = None) -> List[Node]:
    """Every full-length ambient node x with x + S = S′, found by translating the whole tree."""
    ambient = _resolve_ambient(s, ambient)
    _check_shared([s, s2], ambient)
    return [x for x in ambient.nodes(ambient.depth) if translate(s, x) == s2]
