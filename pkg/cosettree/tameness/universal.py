"""
cosettree — Universal tame product and the embedding planner

Design patterns:
  - Builder: embedding_plan assembles n_k, L_k, m(n,k), M_n, N_n and K_n
    phase by phase
  - Verifier: verify_plan recomputes every identity and certificate

Given a tame product spec (H_n), the plan groups the factors into blocks
L_k = H_{n_{k-1}} + ... + H_{n_k - 1}, where past n_k every factor is
p_k-compact, and embeds each L_n into the block K_n of the universal
product H_0 x H_1 x ... .
"""

from __future__ import annotations

import logging
from typing import List, Optional

from cosettree.algebra.abelian import FINSUP, divisible_hull, embeds
from cosettree.algebra.expr import AInfinity, GroupExpr, direct_sum, format_expr, nth_prime, summands
from cosettree.config import settings
from cosettree.errors import HorizonTooSmall, InvariantViolation, NotTame
from cosettree.models import EmbeddingPlan, MultiplicityEntry, PlanCertificate
from cosettree.tameness.classifier import classify_product
from cosettree.tameness.families import a_infinity, a_n, h_infinity
from cosettree.tameness.sequences import HInfinityTail, Role, SeqSpec, entries, last_violation

logger = logging.getLogger(__name__)

__all__ = [
    "a_infinity",
    "a_n",
    "h_infinity",
    "h_infinity_spec",
    "embedding_plan",
    "plan_problems",
    "verify_plan",
]


def h_infinity_spec() -> SeqSpec:
    """H_0 = Ainf followed by H_1, H_2, ..."""
    return SeqSpec(role=Role.PRODUCT, prefix=(h_infinity(0),), tail=HInfinityTail(offset=1))


# ── Plan arithmetic ───────────────────────────────────────


def _n_seq(spec: SeqSpec, horizon: int) -> List[int]:
    """n_0 < n_1 < ...: past n_k every entry is p_k-compact."""
    out: List[int] = []
    for k in range(horizon + 1):
        last = last_violation(spec, nth_prime(k))
        least = 0 if last is None else last + 1
        out.append(least if k == 0 else max(out[-1] + 1, least))
    return out


def _blocks(spec: SeqSpec, n_seq: List[int]) -> List[GroupExpr]:
    groups = entries(spec, n_seq[-1])
    bounds = [0] + n_seq
    return [direct_sum(groups[a:b]) for a, b in zip(bounds, bounds[1:])]


def _multiplicity(block: GroupExpr, p: int, n: int) -> int:
    m = divisible_hull(block).multiplicity(p)
    if m == FINSUP:
        raise InvariantViolation(f"L_{n} has an infinite Z({p}^inf) multiplicity")
    return int(m)


def _k_block(n: int, n_caps: List[int]) -> GroupExpr:
    """K_n = A_n + H_{N_n} + ... + H_{N_{n+1}-1}."""
    if n == 0:
        return h_infinity(0)
    lo, hi = n_caps[n - 1], n_caps[n]
    return direct_sum([a_n(n)] + [h_infinity(i) for i in range(lo, hi)])


def _certify(n: int, source: GroupExpr, target: GroupExpr) -> PlanCertificate:
    if any(isinstance(part, AInfinity) for part in summands(target)):
        return PlanCertificate(index=n, source=source, target=target, certificate=embeds(source, target))
    hull = divisible_hull(source)
    return PlanCertificate(index=n, source=source, source_hull=hull, target=target, certificate=embeds(hull, target))


def _period_note(l_seq: List[GroupExpr]) -> Optional[str]:
    tail = l_seq[1:]
    if len(tail) >= 3 and len(set(tail[1:])) == 1:
        return f"plan is eventually periodic: L_k = {format_expr(tail[-1])} for k >= 2"
    return None


# ── Planner ───────────────────────────────────────────────


def embedding_plan(spec: SeqSpec, horizon: Optional[int] = None) -> EmbeddingPlan:
    """Embed the tame product described by ``spec`` into H_inf, up to ``horizon``."""
    horizon = settings.default_horizon if horizon is None else horizon
    if horizon < 2:
        raise HorizonTooSmall(f"horizon must be >= 2, got {horizon}")
    product = spec if spec.role == Role.PRODUCT else spec.model_copy(update={"role": Role.PRODUCT})
    report = classify_product(product)
    if not report.tame:
        raise NotTame("embedding plans exist only for tame products")

    n_seq = _n_seq(spec, horizon)
    logger.info("planner: n_k = %s", n_seq)
    l_seq = _blocks(spec, n_seq)

    m_table: List[MultiplicityEntry] = []
    m_caps: List[int] = []
    for n in range(1, horizon + 1):
        row = [_multiplicity(l_seq[n], nth_prime(k), n) for k in range(n)]
        m_table.extend(MultiplicityEntry(n=n, k=k, m=m) for k, m in enumerate(row))
        m_caps.append(max(row))

    n_caps = [1]
    for m_cap in m_caps:
        n_caps.append(n_caps[-1] + m_cap + 1)

    k_seq = [_k_block(n, n_caps) for n in range(horizon + 1)]
    certificates = [_certify(n, l_seq[n], k_seq[n]) for n in range(horizon + 1)]
    logger.info("planner: %d certificates, all hold=%s", len(certificates), all(c.certificate.holds for c in certificates))

    notes = []
    period = _period_note(l_seq)
    if period:
        notes.append(period)
    return EmbeddingPlan(
        horizon=horizon,
        n_seq=n_seq,
        l_seq=l_seq,
        m_table=m_table,
        m_caps=m_caps,
        n_caps=n_caps,
        k_seq=k_seq,
        certificates=certificates,
        notes=notes,
    )


# ── Verification ──────────────────────────────────────────


def plan_problems(plan: EmbeddingPlan) -> List[str]:
    """Every identity or certificate of the plan that fails; empty when it verifies."""
    problems: List[str] = []
    h = plan.horizon
    if len(plan.n_seq) != h + 1 or len(plan.l_seq) != h + 1 or len(plan.k_seq) != h + 1:
        return ["sequence lengths do not match the horizon"]
    if len(plan.m_caps) != h or len(plan.n_caps) != h + 1:
        return ["M/N sequence lengths do not match the horizon"]

    if any(b <= a for a, b in zip(plan.n_seq, plan.n_seq[1:])):
        problems.append("n_k is not strictly increasing")
    if plan.n_caps[0] != 1:
        problems.append("N_1 must be 1")
    for i, m_cap in enumerate(plan.m_caps):
        if plan.n_caps[i + 1] != plan.n_caps[i] + m_cap + 1:
            problems.append(f"N_{i + 2} != N_{i + 1} + M_{i + 1} + 1")

    for n in range(1, h + 1):
        row = []
        for k in range(n):
            try:
                row.append(plan.m(n, k))
            except KeyError:
                problems.append(f"m({n},{k}) missing")
        if row and max(row) != plan.m_caps[n - 1]:
            problems.append(f"M_{n} is not the maximum of m({n},k)")
        hull = divisible_hull(plan.l_seq[n])
        for k, m in enumerate(row):
            if hull.multiplicity(nth_prime(k)) != m:
                problems.append(f"m({n},{k}) does not match the hull of L_{n}")

    for n in range(h + 1):
        if plan.k_seq[n] != _k_block(n, plan.n_caps):
            problems.append(f"K_{n} does not match N_{n}..N_{n + 1}")
        if not embeds(plan.l_seq[n] if n == 0 else divisible_hull(plan.l_seq[n]), plan.k_seq[n]):
            problems.append(f"L_{n} does not embed in K_{n}")
    for cert in plan.certificates:
        if not cert.certificate.holds:
            problems.append(f"certificate {cert.index} does not hold")
    return problems


def verify_plan(plan: EmbeddingPlan) -> bool:
    problems = plan_problems(plan)
    for problem in problems:
        logger.warning("plan check failed: %s", problem)
    return not problems
