"""
cosettree — Pydantic Models

Design patterns:
  - Value Object: immutable report objects
  - Contract: every emitted JSON document is one of these models and
    carries ``"format": "cosettree/1"``

Shared report and document models used by the pipeline, CLI and service.
"""

from __future__ import annotations

from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from cosettree import FORMAT_TAG
from cosettree.algebra.abelian import DivNormalForm, EmbeddingCertificate, PrimeSet
from cosettree.algebra.expr import Expr
from cosettree.algebra.ordinals import Ordinal
from cosettree.tameness.complexity import ComplexityClass, Tier
from cosettree.tameness.sequences import Role
from cosettree.trees.engine import FrontierMode, RankValue

# One H_i coordinate: a bare residue for single-factor levels, a list otherwise.
Coordinate = Union[int, List[int]]
NodeCoords = List[Coordinate]


class Document(BaseModel):
    format: Literal["cosettree/1"] = FORMAT_TAG


# ── Trees ────────────────────────────────────────────────


class TreeDocument(Document):
    """Tree file: level orders plus the nodes of each length."""

    model_config = ConfigDict(extra="forbid")

    levels: List[List[int]] = Field(..., min_length=1, description="Cyclic orders of H_0, H_1, ...")
    nodes: Dict[str, List[NodeCoords]] = Field(default_factory=dict, description="Length -> nodes")


class ProfileDocument(Document):
    """Witness profile sidecar: row j lists f(j, n) for n = j..d."""

    model_config = ConfigDict(extra="forbid")

    profile: List[List[int]] = Field(..., min_length=1)


class RankEntry(BaseModel):
    level: int
    node: NodeCoords
    rank: RankValue


class TreeAnalysis(Document):
    mode: FrontierMode
    depth: int
    level_orders: List[List[int]]
    size: int
    is_group_tree: bool
    is_coset_tree: bool
    height: Ordinal
    wellfounded_at_depth: bool
    ranks: List[RankEntry] = Field(default_factory=list)


class DerivativeStage(BaseModel):
    stage: int
    size: int
    tree: TreeDocument


class DerivativeReport(Document):
    mode: FrontierMode
    steps_requested: Optional[int] = None
    reached_fixpoint: bool
    stages: List[DerivativeStage] = Field(default_factory=list)


class GammaReport(Document):
    zero_filled_levels: List[int] = Field(default_factory=list)
    tree: TreeDocument


class PhiReport(Document):
    is_coset_tree: bool
    size: int
    tree: TreeDocument


class OrbitReport(Document):
    equivalent_at_depth: bool
    translator: Optional[NodeCoords] = None


class LevelRank(BaseModel):
    level: int
    max_rank: Optional[int] = Field(default=None, description="Largest finite rank; null when every node is core")


class WitnessReport(Document):
    p: int
    dim: int
    depth: int
    profile: List[List[int]]
    is_group_tree: bool
    root_rank: RankValue
    rank_profile: List[LevelRank]
    tree: TreeDocument


# ── Tameness ─────────────────────────────────────────────


class Obstruction(BaseModel):
    """Z^w, or (Z(p)^{<w})^w for one prime or every prime of index >= all_primes_from."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["z_omega", "zp_finsup_omega"]
    prime: Optional[int] = None
    all_primes_from: Optional[int] = None


class TamenessReport(Document):
    role: Role
    tame: bool
    nontorsion_tail: bool
    bad_tail_primes: PrimeSet
    obstructions: List[Obstruction] = Field(default_factory=list)
    tier: Tier
    locally_compact: bool
    group_tree_bound: Optional[Ordinal] = None
    coset_tree_bound: Optional[Ordinal] = None
    coset_tree_bound_strict: bool = True
    complexity_bound: Optional[ComplexityClass] = None
    notes: List[str] = Field(default_factory=list)


class SimplifyReport(Document):
    input: str
    result: ComplexityClass


# ── Universal product ────────────────────────────────────


class MultiplicityEntry(BaseModel):
    n: int
    k: int
    m: int


class PlanCertificate(BaseModel):
    index: int
    source: Expr
    source_hull: Optional[DivNormalForm] = None
    target: Expr
    certificate: EmbeddingCertificate


class EmbeddingPlan(Document):
    """Universal-product embedding data up to ``horizon``.

    n_seq[k] = n_k and l_seq[k] = L_k for k = 0..horizon; m_caps[i] = M_{i+1},
    n_caps[i] = N_{i+1} and k_seq[n] = K_n.
    """

    horizon: int
    n_seq: List[int]
    l_seq: List[Expr]
    m_table: List[MultiplicityEntry]
    m_caps: List[int]
    n_caps: List[int]
    k_seq: List[Expr]
    certificates: List[PlanCertificate]
    notes: List[str] = Field(default_factory=list)

    def m(self, n: int, k: int) -> int:
        for e in self.m_table:
            if e.n == n and e.k == k:
                return e.m
        raise KeyError((n, k))


# ── Expressions ──────────────────────────────────────────


class PrimeFacts(BaseModel):
    prime: int
    order_p_count: str
    p_compact: bool


class ExprReport(Document):
    input: str
    normal_form: Expr
    torsion: bool
    finite: bool
    order: Optional[int] = None
    bad_primes_nontorsion: bool
    bad_primes: PrimeSet
    primes: List[PrimeFacts] = Field(default_factory=list)
    divisible_hull: Optional[DivNormalForm] = None


class HInfReport(Document):
    n: int
    h_n: Expr
    a_n: Expr
    torsion: bool
    not_p_compact_at: PrimeSet
