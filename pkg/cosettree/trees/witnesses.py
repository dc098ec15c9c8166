"""
cosettree — Staircase witnesses

Design patterns:
  - Builder: staircase_witness materializes a levelwise-subgroup tree from a
    profile table
  - Value Object: WitnessSpec validates the profile once

Every level is Z(p)^D. A length-n node (v_1, ..., v_n) belongs to the tree
iff each v_j lies in the span of the first f(j, n) standard coordinates.
The default profile f(j, n) = max(0, D - (n - j)) shrinks every coordinate
by one dimension per level.
"""

from __future__ import annotations

import itertools
import logging
from typing import List, Optional, Tuple

import sympy
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cosettree.config import resolve_cap, settings
from cosettree.errors import CapExceeded
from cosettree.trees.engine import FrontierMode, LevelStructure, LevelTree, RankValue, rank_of, rank_table

logger = logging.getLogger(__name__)


class WitnessSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int
    dim: int = Field(..., ge=1)
    depth: int = Field(..., ge=1)
    profile: Optional[Tuple[Tuple[int, ...], ...]] = None

    @field_validator("p")
    @classmethod
    def _prime(cls, v: int) -> int:
        if not sympy.isprime(v):
            raise ValueError(f"{v} is not a prime")
        return v

    @model_validator(mode="after")
    def _profile_shape(self) -> "WitnessSpec":
        if self.profile is None:
            return self
        if len(self.profile) != self.depth:
            raise ValueError(f"profile needs {self.depth} rows, got {len(self.profile)}")
        for j, row in enumerate(self.profile, start=1):
            if len(row) != self.depth - j + 1:
                raise ValueError(f"profile row {j} needs {self.depth - j + 1} entries")
            if row[0] != self.dim:
                raise ValueError(f"profile row {j} must start at f({j},{j}) = {self.dim}")
            if any(not 0 <= v <= self.dim for v in row):
                raise ValueError(f"profile row {j} has values outside 0..{self.dim}")
            if any(b > a for a, b in zip(row, row[1:])):
                raise ValueError(f"profile row {j} is not nonincreasing")
        return self

    def f(self, j: int, n: int) -> int:
        """Free coordinates of v_j in a length-n node (1 <= j <= n <= depth)."""
        if self.profile is not None:
            return self.profile[j - 1][n - j]
        return max(0, self.dim - (n - j))

    def profile_table(self) -> List[List[int]]:
        return [[self.f(j, n) for n in range(j, self.depth + 1)] for j in range(1, self.depth + 1)]

    def structure(self) -> LevelStructure:
        return LevelStructure.of(*([[self.p] * self.dim] * self.depth))


def _span(p: int, dim: int, free: int) -> List[Tuple[int, ...]]:
    tail = (0,) * (dim - free)
    return [head + tail for head in itertools.product(range(p), repeat=free)]


def staircase_witness(spec: WitnessSpec, *, cap: Optional[int] = None) -> LevelTree:
    limit = resolve_cap(cap, settings.node_cap)
    total = sum(spec.p ** sum(spec.f(j, n) for j in range(1, n + 1)) for n in range(1, spec.depth + 1))
    if total > limit:
        raise CapExceeded(f"witness would have {total} nodes, cap {limit}")
    levels = []
    for n in range(1, spec.depth + 1):
        spans = [_span(spec.p, spec.dim, spec.f(j, n)) for j in range(1, n + 1)]
        levels.append([tuple(itertools.chain.from_iterable(vs)) for vs in itertools.product(*spans)])
    logger.debug("witness p=%d D=%d d=%d: %d nodes", spec.p, spec.dim, spec.depth, total)
    return LevelTree(spec.structure(), levels, cap=limit)


def root_rank(spec: WitnessSpec, *, cap: Optional[int] = None) -> RankValue:
    """Rank of the zero node of length 1 (closed world)."""
    s = staircase_witness(spec, cap=cap)
    return rank_of(s, [[0] * spec.dim], FrontierMode.CLOSED)


def rank_profile(
    spec: WitnessSpec,
    mode: FrontierMode = FrontierMode.CLOSED,
    *,
    cap: Optional[int] = None,
) -> List[Tuple[int, Optional[int]]]:
    """(level, largest finite rank at that level); None when the level is all core."""
    s = staircase_witness(spec, cap=cap)
    best: List[Optional[int]] = [None] * spec.depth
    for n, _, rank in rank_table(s, mode):
        if rank.is_core:
            continue
        cur = best[n - 1]
        best[n - 1] = rank.value if cur is None else max(cur, rank.value)  # type: ignore[type-var]
    return [(n, best[n - 1]) for n in range(1, spec.depth + 1)]
