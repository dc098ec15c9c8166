"""
cosettree — Command Facade

Design patterns:
  - Facade: one function per command, shared by the CLI and the HTTP service
  - Chain of Responsibility: read → compute → report, each phase logged

Every function returns a report model; render() turns it into the
canonical JSON text (sorted keys, two-space indent, trailing newline).
"""

from __future__ import annotations

import json
import logging
from typing import Iterator, Optional, Tuple

from pydantic import BaseModel

from cosettree.algebra.abelian import (
    PrimeSet,
    bad_primes,
    divisible_hull,
    group_order,
    is_finite,
    is_p_compact,
    is_torsion,
    order_p_count,
    primes_of,
)
from cosettree.algebra.expr import normalize, parse_expr
from cosettree.models import (
    DerivativeReport,
    DerivativeStage,
    EmbeddingPlan,
    ExprReport,
    GammaReport,
    HInfReport,
    LevelRank,
    OrbitReport,
    PhiReport,
    PrimeFacts,
    RankEntry,
    SimplifyReport,
    TamenessReport,
    TreeAnalysis,
    WitnessReport,
)
from cosettree.tameness.classifier import classify
from cosettree.tameness.complexity import complexity_simplify
from cosettree.tameness.sequences import SeqSpec
from cosettree.tameness.universal import a_n, embedding_plan, h_infinity
from cosettree.trees.codec import node_coords, tree_to_document
from cosettree.trees.engine import (
    FrontierMode,
    LevelTree,
    derivative,
    gamma_report,
    height,
    is_coset_tree,
    is_group_tree,
    is_wellfounded_at_depth,
    rank_table,
)
from cosettree.trees.translators import orbit_equivalent, phi
from cosettree.trees.witnesses import WitnessSpec, rank_profile, root_rank, staircase_witness

logger = logging.getLogger(__name__)


def render(doc: BaseModel) -> str:
    """Canonical JSON text of a report."""
    return json.dumps(doc.model_dump(mode="json"), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ── Classification and planning ──────────────────────────


def classify_report(spec: SeqSpec) -> TamenessReport:
    logger.info("Phase 1 — classify: role=%s prefix=%d", spec.role.value, len(spec.prefix))
    return classify(spec)


def plan_report(spec: SeqSpec, horizon: Optional[int] = None) -> EmbeddingPlan:
    logger.info("Phase 1 — embedding plan: horizon=%s", horizon)
    return embedding_plan(spec, horizon)


def hinf_report(n: int) -> HInfReport:
    if n < 0:
        raise ValueError("n must be >= 0")
    h = h_infinity(n)
    return HInfReport(n=n, h_n=h, a_n=a_n(n), torsion=is_torsion(h), not_p_compact_at=PrimeSet(from_index=n))


def simplify_report(text: str) -> SimplifyReport:
    return SimplifyReport(input=text, result=complexity_simplify(text))


def expr_report(text: str) -> ExprReport:
    g = normalize(parse_expr(text))
    bad = bad_primes(g)
    torsion = is_torsion(g)
    primes = sorted(set(primes_of(g)) | set(bad.infinite_p_part.primes))
    return ExprReport(
        input=text,
        normal_form=g,
        torsion=torsion,
        finite=is_finite(g),
        order=group_order(g) if is_finite(g) else None,
        bad_primes_nontorsion=bad.nontorsion,
        bad_primes=bad.infinite_p_part,
        primes=[PrimeFacts(prime=p, order_p_count=str(order_p_count(g, p)), p_compact=is_p_compact(g, p)) for p in primes],
        divisible_hull=divisible_hull(g) if torsion else None,
    )


# ── Trees ────────────────────────────────────────────────


def analyze_tree(s: LevelTree, mode: FrontierMode = FrontierMode.CLOSED) -> TreeAnalysis:
    logger.info("Phase 1 — analyze tree: depth=%d size=%d mode=%s", s.depth, s.size, mode.value)
    ls = s.structure
    return TreeAnalysis(
        mode=mode,
        depth=s.depth,
        level_orders=[list(level.orders) for level in ls.levels],
        size=s.size,
        is_group_tree=is_group_tree(s),
        is_coset_tree=is_coset_tree(s),
        height=height(s, mode),
        wellfounded_at_depth=is_wellfounded_at_depth(s, mode),
        ranks=[RankEntry(level=n, node=node_coords(ls, node, n), rank=r) for n, node, r in rank_table(s, mode)],
    )


def _stages(s: LevelTree, mode: FrontierMode, steps: Optional[int]) -> Iterator[Tuple[int, LevelTree]]:
    cur, k = s, 0
    while True:
        yield k, cur
        if steps is not None and k >= steps:
            return
        nxt = derivative(cur, mode)
        if nxt == cur:
            return
        cur, k = nxt, k + 1


def iter_stages(s: LevelTree, mode: FrontierMode, steps: Optional[int] = None) -> Iterator[DerivativeStage]:
    """S, D(S), D²(S), ... up to ``steps`` applications or the fixpoint."""
    for k, tree in _stages(s, mode, steps):
        yield DerivativeStage(stage=k, size=tree.size, tree=tree_to_document(tree))


def derivative_report(s: LevelTree, mode: FrontierMode = FrontierMode.CLOSED, steps: Optional[int] = None) -> DerivativeReport:
    trees = list(_stages(s, mode, steps))
    k, last = trees[-1]
    reached = steps is None or k < steps or derivative(last, mode) == last
    return DerivativeReport(
        mode=mode,
        steps_requested=steps,
        reached_fixpoint=reached,
        stages=[DerivativeStage(stage=i, size=t.size, tree=tree_to_document(t)) for i, t in trees],
    )


def gamma_document(s: LevelTree) -> GammaReport:
    g, filled = gamma_report(s)
    return GammaReport(zero_filled_levels=filled, tree=tree_to_document(g))


def phi_report(s: LevelTree, s2: LevelTree, ambient: Optional[LevelTree] = None) -> PhiReport:
    f = phi(s, s2, ambient)
    return PhiReport(is_coset_tree=is_coset_tree(f), size=f.size, tree=tree_to_document(f))


def orbit_report(s: LevelTree, s2: LevelTree, ambient: Optional[LevelTree] = None) -> OrbitReport:
    decision = orbit_equivalent(s, s2, ambient)
    translator = None
    if decision.translator is not None:
        translator = node_coords(s.structure, decision.translator, s.depth)
    return OrbitReport(equivalent_at_depth=decision.equivalent_at_depth, translator=translator)


def witness_report(spec: WitnessSpec) -> WitnessReport:
    logger.info("Phase 1 — witness: p=%d D=%d d=%d", spec.p, spec.dim, spec.depth)
    s = staircase_witness(spec)
    return WitnessReport(
        p=spec.p,
        dim=spec.dim,
        depth=spec.depth,
        profile=spec.profile_table(),
        is_group_tree=is_group_tree(s),
        root_rank=root_rank(spec),
        rank_profile=[LevelRank(level=n, max_rank=r) for n, r in rank_profile(spec)],
        tree=tree_to_document(s),
    )
