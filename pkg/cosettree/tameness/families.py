"""
cosettree — Builtin indexed group families

Closed forms for the sequences that are not eventually periodic:

    A_0 = 0,  A_n = ptail(n)
    H_0 = Ainf,  H_n = Zq(p_0) + ... + Zq(p_{n-1}) + ptail(n)

H_n fails p_i-compactness exactly when n <= i.
"""

from __future__ import annotations

from typing import Optional

from cosettree.algebra.expr import AINF, ZERO, GroupExpr, PrimeTail, Quasicyclic, direct_sum, nth_prime, prime_index


def a_infinity() -> GroupExpr:
    """The universal countable abelian group."""
    return AINF


def a_n(n: int) -> GroupExpr:
    if n < 0:
        raise ValueError("index must be >= 0")
    return ZERO if n == 0 else PrimeTail(n)


def h_infinity(n: int) -> GroupExpr:
    """n-th factor of the universal tame product."""
    if n < 0:
        raise ValueError("index must be >= 0")
    if n == 0:
        return AINF
    return direct_sum([Quasicyclic(nth_prime(i)) for i in range(n)] + [PrimeTail(n)])


def quasicyclic_entry(t: int) -> GroupExpr:
    """t-th member of the all-quasicyclic family: Zq(p_t)."""
    return Quasicyclic(nth_prime(t))


def hinf_last_violation(offset: int, p: int) -> Optional[int]:
    """Largest t with H_{offset + t} not p-compact, or None."""
    i = prime_index(p)
    return i - offset if i >= offset else None
