"""
cosettree — Ordinals below w^w in Cantor normal form

Design patterns:
  - Value Object: Ordinal is a frozen pydantic model; it validates from and
    serializes to its text form (``w^2*2+w+1``, ``w*3+5``, ``0``)

Only the arithmetic the height and bound reports need: addition, right
multiplication by naturals, successor and comparison.
"""

from __future__ import annotations

import re
from enum import Enum
from typing import Any, List, Tuple

from pydantic import BaseModel, ConfigDict, model_serializer, model_validator

from cosettree.config import settings
from cosettree.errors import ParseError

Term = Tuple[int, int]  # (exponent, coefficient)


class Cmp(str, Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"


class Ordinal(BaseModel):
    """sum of w^e_i * c_i with strictly decreasing exponents; () is 0."""

    model_config = ConfigDict(frozen=True)

    terms: Tuple[Term, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data: Any) -> Any:
        if isinstance(data, str):
            return {"terms": _parse_terms(data)}
        if isinstance(data, int) and not isinstance(data, bool):
            return {"terms": ((0, data),) if data else ()}
        return data

    @model_validator(mode="after")
    def _canonical(self) -> "Ordinal":
        cap = settings.ordinal_exponent_cap
        prev = None
        for e, c in self.terms:
            if c < 1:
                raise ValueError(f"coefficient must be >= 1, got {c}")
            if e < 0 or e > cap:
                raise ValueError(f"exponent {e} outside 0..{cap}")
            if prev is not None and e >= prev:
                raise ValueError("exponents must strictly decrease")
            prev = e
        return self

    @model_serializer
    def _as_text(self) -> str:
        return format_ordinal(self)

    # ── Constructors ──────────────────────────────────────

    @classmethod
    def finite(cls, n: int) -> "Ordinal":
        if n < 0:
            raise ValueError("ordinals are nonnegative")
        return cls(terms=((0, n),) if n else ())

    @classmethod
    def omega(cls, n: int = 1) -> "Ordinal":
        """w*n."""
        return cls(terms=((1, n),) if n else ())

    # ── Predicates ────────────────────────────────────────

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return all(e == 0 for e, _ in self.terms)

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] > 0

    def as_int(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    # ── Operators ─────────────────────────────────────────

    def __add__(self, other: "Ordinal") -> "Ordinal":
        return ord_add(self, other)

    def __lt__(self, other: "Ordinal") -> bool:
        return self.terms < other.terms

    def __le__(self, other: "Ordinal") -> bool:
        return self.terms <= other.terms

    def __gt__(self, other: "Ordinal") -> bool:
        return self.terms > other.terms

    def __ge__(self, other: "Ordinal") -> bool:
        return self.terms >= other.terms

    def __str__(self) -> str:
        return format_ordinal(self)


ZERO = Ordinal()
ONE = Ordinal.finite(1)
OMEGA = Ordinal.omega(1)


def ord_add(a: Ordinal, b: Ordinal) -> Ordinal:
    """Non-commutative sum: terms of a below b's leading exponent are absorbed."""
    if b.is_zero:
        return a
    lead, coeff = b.terms[0]
    kept: List[Term] = [t for t in a.terms if t[0] > lead]
    same = [c for e, c in a.terms if e == lead]
    if same:
        kept.append((lead, same[0] + coeff))
    else:
        kept.append((lead, coeff))
    kept.extend(b.terms[1:])
    return Ordinal(terms=tuple(kept))


def ord_nat_mul(a: Ordinal, n: int) -> Ordinal:
    """a * n for a natural n (right multiplication)."""
    if n < 0:
        raise ValueError("n must be a natural number")
    if n == 0 or a.is_zero:
        return ZERO
    lead, coeff = a.terms[0]
    return Ordinal(terms=((lead, coeff * n),) + a.terms[1:])


def ord_cmp(a: Ordinal, b: Ordinal) -> Cmp:
    if a.terms == b.terms:
        return Cmp.EQ
    return Cmp.LT if a.terms < b.terms else Cmp.GT


def ord_succ(a: Ordinal) -> Ordinal:
    return ord_add(a, ONE)


# ── Text form ─────────────────────────────────────────────


def format_ordinal(a: Ordinal) -> str:
    if a.is_zero:
        return "0"
    parts = []
    for e, c in a.terms:
        if e == 0:
            parts.append(str(c))
            continue
        base = "w" if e == 1 else f"w^{e}"
        parts.append(base if c == 1 else f"{base}*{c}")
    return "+".join(parts)


_TERM = re.compile(r"^(?:(?P<fin>\d+)|w(?:\^(?P<exp>\d+))?(?:\*(?P<coef>\d+))?)$")


def _parse_terms(text: str) -> Tuple[Term, ...]:
    """Terms of a Cantor normal form; error positions index into ``text``."""
    if text.replace(" ", "") == "0":
        return ()
    terms: List[Term] = []
    start = 0
    for raw in text.split("+"):
        offset = start + len(raw) - len(raw.lstrip(" "))
        start += len(raw) + 1
        chunk = raw.replace(" ", "")
        m = _TERM.match(chunk)
        if not m or (m.group("fin") is not None and int(m.group("fin")) == 0):
            raise ParseError(f"bad ordinal term {chunk!r}", position=offset, text=text)
        if m.group("fin") is not None:
            terms.append((0, int(m.group("fin"))))
        else:
            exp = int(m.group("exp")) if m.group("exp") is not None else 1
            coef = int(m.group("coef")) if m.group("coef") is not None else 1
            if exp == 0 or coef == 0:
                raise ParseError(f"bad ordinal term {chunk!r}", position=offset, text=text)
            terms.append((exp, coef))
    for (e1, _), (e2, _) in zip(terms, terms[1:]):
        if e2 >= e1:
            raise ParseError("ordinal terms must have strictly decreasing exponents", text=text)
    return tuple(terms)


def parse_ordinal(text: str) -> Ordinal:
    return Ordinal(terms=_parse_terms(text))
