"""
cosettree — Complexity classes and tier bounds

Design patterns:
  - Interpreter: class expressions parse into a small AST and are rewritten
    into the linear chain E0 < E0^w < (E0^w)^+ < (E0^w)^++ < (E0^w)^+++
  - Lookup Table: bounds_for_tier maps a tameness tier to its bounds

Expression text grammar:

    expr    := 'id(w)' '*' expr | postfix
    postfix := primary ( '^w' | '^+' )*
    primary := 'E0' | '(' expr ')'

Rewrites: (E^w)^w -> E^w, (E^+)^w -> E^+ and id(w) x E -> E, the last two
for every E at or above E0^w (where id(w) x E <=_B E holds).
"""

from __future__ import annotations

import re
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict

from cosettree.algebra.ordinals import Ordinal
from cosettree.errors import NotTameTier, ParseError, UnsupportedExpression
from cosettree.tameness.sequences import Role


class ComplexityClass(str, Enum):
    E0 = "E0"
    E0_OMEGA = "E0^w"
    E0_OMEGA_PLUS1 = "(E0^w)^+"
    E0_OMEGA_PLUS2 = "(E0^w)^++"
    E0_OMEGA_PLUS3 = "(E0^w)^+++"

    @property
    def level(self) -> int:
        return _CHAIN.index(self)

    @property
    def pluses(self) -> int:
        """k for E0OmegaPlus(k), 0 otherwise."""
        return max(0, self.level - 1)

    @classmethod
    def plus(cls, k: int) -> "ComplexityClass":
        if not 1 <= k <= 3:
            raise UnsupportedExpression(f"(E0^w) with {k} jumps is outside the supported chain")
        return _CHAIN[k + 1]

    def __lt__(self, other: "ComplexityClass") -> bool:  # type: ignore[override]
        return self.level < other.level

    def __le__(self, other: "ComplexityClass") -> bool:  # type: ignore[override]
        return self.level <= other.level

    def __gt__(self, other: "ComplexityClass") -> bool:  # type: ignore[override]
        return self.level > other.level

    def __ge__(self, other: "ComplexityClass") -> bool:  # type: ignore[override]
        return self.level >= other.level


_CHAIN: List[ComplexityClass] = list(ComplexityClass)


def format_class(c: ComplexityClass) -> str:
    return c.value


class Tier(str, Enum):
    ALL_P_COMPACT = "all_p_compact"
    ALL_TORSION = "all_torsion"
    TAME_GENERAL = "tame_general"
    NOT_TAME = "not_tame"


# ── Class expressions ─────────────────────────────────────


class Base(BaseModel):
    """E0."""

    model_config = ConfigDict(frozen=True)


class Power(BaseModel):
    """E^w."""

    model_config = ConfigDict(frozen=True)
    inner: "ClassExpr"


class Jump(BaseModel):
    """E^+."""

    model_config = ConfigDict(frozen=True)
    inner: "ClassExpr"


class TimesId(BaseModel):
    """id(w) x E."""

    model_config = ConfigDict(frozen=True)
    inner: "ClassExpr"


ClassExpr = Union[Base, Power, Jump, TimesId]
Power.model_rebuild()
Jump.model_rebuild()
TimesId.model_rebuild()


def format_class_expr(e: ClassExpr) -> str:
    if isinstance(e, Base):
        return "E0"
    if isinstance(e, Power):
        return f"({format_class_expr(e.inner)})^w"
    if isinstance(e, Jump):
        return f"({format_class_expr(e.inner)})^+"
    return f"id(w)*{format_class_expr(e.inner)}"


_TOKEN = re.compile(r"\s*(E0|id\(w\)|\^w|\^\+|[()*])")


def _tokenize(text: str) -> List[Tuple[str, int]]:
    src = text.replace("ω", "w").replace("×", "*")
    out: List[Tuple[str, int]] = []
    pos = 0
    while pos < len(src):
        if not src[pos:].strip():
            break
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected input {src[pos:pos + 8]!r}", position=pos, text=text)
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def _peek(self) -> Tuple[str, int]:
        return self.tokens[self.i] if self.i < len(self.tokens) else ("", len(self.text))

    def _take(self, want: Optional[str] = None) -> str:
        tok, pos = self._peek()
        if not tok or (want is not None and tok != want):
            raise ParseError(f"expected {want or 'a class expression'!r}, got {tok or 'end of input'!r}",
                             position=pos, text=self.text)
        self.i += 1
        return tok

    def parse(self) -> ClassExpr:
        e = self._expr()
        tok, pos = self._peek()
        if tok:
            raise ParseError(f"trailing input {tok!r}", position=pos, text=self.text)
        return e

    def _expr(self) -> ClassExpr:
        if self._peek()[0] == "id(w)":
            self._take()
            self._take("*")
            return TimesId(inner=self._expr())
        return self._postfix()

    def _postfix(self) -> ClassExpr:
        e = self._primary()
        while self._peek()[0] in ("^w", "^+"):
            e = Power(inner=e) if self._take() == "^w" else Jump(inner=e)
        return e

    def _primary(self) -> ClassExpr:
        if self._peek()[0] == "(":
            self._take()
            e = self._expr()
            self._take(")")
            return e
        self._take("E0")
        return Base()


def parse_complexity(text: str) -> ClassExpr:
    return _Parser(text).parse()


def complexity_simplify(expr: Union[ClassExpr, str]) -> ComplexityClass:
    """Normal form of a class expression in the linear chain."""
    e = parse_complexity(expr) if isinstance(expr, str) else expr
    if isinstance(e, Base):
        return ComplexityClass.E0
    inner = complexity_simplify(e.inner)
    if isinstance(e, Power):
        # E0^w, and (E^w)^w -> E^w, (E^+)^w -> E^+ above it
        return ComplexityClass.E0_OMEGA if inner == ComplexityClass.E0 else inner
    if isinstance(e, Jump):
        if inner == ComplexityClass.E0:
            raise UnsupportedExpression("E0^+ is not in the supported chain")
        return ComplexityClass.plus(inner.pluses + 1)
    if inner == ComplexityClass.E0:
        raise UnsupportedExpression("id(w) x E0 is not in the supported chain")
    return inner


# ── Tier bounds ───────────────────────────────────────────


class TierBounds(NamedTuple):
    group_tree_bound: Ordinal  # het(S) <= this
    coset_tree_bound: Ordinal  # het(S) < this
    complexity_bound: ComplexityClass


_BOUNDS = {
    Tier.ALL_P_COMPACT: (1, ComplexityClass.E0_OMEGA_PLUS1),
    Tier.ALL_TORSION: (2, ComplexityClass.E0_OMEGA_PLUS2),
    Tier.TAME_GENERAL: (3, ComplexityClass.E0_OMEGA_PLUS3),
}


def bounds_for_tier(tier: Tier, role: Role = Role.PRODUCT, *, locally_compact: bool = False) -> TierBounds:
    """Height bounds w*k (group trees) and < w*(k+1) (coset trees) with the matching class.

    A locally compact filtration lowers the class to E0.
    """
    if tier not in _BOUNDS:
        raise NotTameTier("no bounds for a group that is not tame")
    k, cls = _BOUNDS[tier]
    if locally_compact and role == Role.FILTRATION:
        cls = ComplexityClass.E0
    return TierBounds(Ordinal.omega(k), Ordinal.omega(k + 1), cls)
