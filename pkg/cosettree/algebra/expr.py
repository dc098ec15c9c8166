"""
cosettree — Symbolic countable abelian groups

Design patterns:
  - Value Object: every GroupExpr node is a frozen pydantic model
  - Composite: Sum / FinSupPower nest arbitrary expressions
  - Interpreter: recursive-descent parser for the text form

Text grammar (whitespace insensitive):

    0 | Z | Q | Z(n) | Zq(p) | sum(e, e, ...) | finsup(e) | Ainf | ptail(k)

``ptail(k)`` is the sum over primes p_i with i >= k of Z(p_i^inf)^{<w},
with the primes enumerated in ascending order p_0 = 2, p_1 = 3, ...
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Annotated, Any, List, Literal, Tuple, Union

import sympy
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, field_validator

from cosettree.errors import InvalidPrime, ParseError


# ── Prime enumeration ─────────────────────────────────────


@lru_cache(maxsize=None)
def nth_prime(index: int) -> int:
    """p_index in the fixed ascending enumeration (p_0 = 2)."""
    if index < 0:
        raise InvalidPrime(f"prime index must be >= 0, got {index}")
    return int(sympy.prime(index + 1))


@lru_cache(maxsize=None)
def prime_index(p: int) -> int:
    """Inverse of nth_prime."""
    require_prime(p)
    return int(sympy.primepi(p)) - 1


def require_prime(p: int) -> int:
    if not isinstance(p, int) or not sympy.isprime(p):
        raise InvalidPrime(f"{p!r} is not a prime")
    return p


# ── Expression nodes ──────────────────────────────────────


class _Expr(BaseModel):
    model_config = ConfigDict(frozen=True)

    def __str__(self) -> str:
        return format_expr(self)


class Zero(_Expr):
    kind: Literal["zero"] = "zero"


class IntZ(_Expr):
    kind: Literal["int"] = "int"


class RatQ(_Expr):
    kind: Literal["rat"] = "rat"


class AInfinity(_Expr):
    """A_inf = (+)_p Z(p^inf)^{<w} (+) Q^{<w}."""

    kind: Literal["ainf"] = "ainf"


class Cyclic(_Expr):
    kind: Literal["cyclic"] = "cyclic"
    n: int = Field(..., ge=2)

    def __init__(self, n: int = None, **data: Any) -> None:  # type: ignore[assignment]
        if n is not None:
            data["n"] = n
        super().__init__(**data)


class Quasicyclic(_Expr):
    kind: Literal["quasicyclic"] = "quasicyclic"
    p: int

    def __init__(self, p: int = None, **data: Any) -> None:  # type: ignore[assignment]
        if p is not None:
            data["p"] = p
        super().__init__(**data)

    @field_validator("p")
    @classmethod
    def _prime(cls, v: int) -> int:
        if not sympy.isprime(v):
            raise ValueError(f"quasicyclic parameter {v} is not prime")
        return v


class PrimeTail(_Expr):
    """(+)_{i >= start} Z(p_i^inf)^{<w}."""

    kind: Literal["ptail"] = "ptail"
    start: int = Field(..., ge=0)

    def __init__(self, start: int = None, **data: Any) -> None:  # type: ignore[assignment]
        if start is not None:
            data["start"] = start
        super().__init__(**data)


class Sum(_Expr):
    kind: Literal["sum"] = "sum"
    parts: Tuple["GroupExpr", ...] = Field(..., min_length=1)

    def __init__(self, *parts: "GroupExpr", **data: Any) -> None:
        if parts:
            data["parts"] = tuple(parts)
        super().__init__(**data)


class FinSupPower(_Expr):
    """base^{<w}: finitely supported countable power."""

    kind: Literal["finsup"] = "finsup"
    base: "GroupExpr"

    def __init__(self, base: "GroupExpr" = None, **data: Any) -> None:  # type: ignore[assignment]
        if base is not None:
            data["base"] = base
        super().__init__(**data)


GroupExpr = Annotated[
    Union[Zero, IntZ, RatQ, AInfinity, Cyclic, Quasicyclic, PrimeTail, Sum, FinSupPower],
    Field(discriminator="kind"),
]

Sum.model_rebuild()
FinSupPower.model_rebuild()

ZERO = Zero()
Z = IntZ()
Q = RatQ()
AINF = AInfinity()


# ── Normalization ─────────────────────────────────────────


def normalize(g: GroupExpr) -> GroupExpr:
    """Flatten nested sums, drop Zero parts, collapse trivial wrappers."""
    if isinstance(g, Sum):
        flat: List[GroupExpr] = []
        for part in g.parts:
            n = normalize(part)
            if isinstance(n, Sum):
                flat.extend(n.parts)
            elif not isinstance(n, Zero):
                flat.append(n)
        if not flat:
            return ZERO
        if len(flat) == 1:
            return flat[0]
        return Sum(*flat)
    if isinstance(g, FinSupPower):
        base = normalize(g.base)
        return ZERO if isinstance(base, Zero) else FinSupPower(base)
    return g


def summands(g: GroupExpr) -> Tuple[GroupExpr, ...]:
    """Top-level parts of the normal form (empty for Zero)."""
    n = normalize(g)
    if isinstance(n, Zero):
        return ()
    if isinstance(n, Sum):
        return n.parts
    return (n,)


def direct_sum(parts: List[GroupExpr]) -> GroupExpr:
    """Normalized Sum of a possibly empty list."""
    if not parts:
        return ZERO
    return normalize(Sum(*parts))


# ── Printing ──────────────────────────────────────────────


def format_expr(g: GroupExpr) -> str:
    if isinstance(g, Zero):
        return "0"
    if isinstance(g, IntZ):
        return "Z"
    if isinstance(g, RatQ):
        return "Q"
    if isinstance(g, AInfinity):
        return "Ainf"
    if isinstance(g, Cyclic):
        return f"Z({g.n})"
    if isinstance(g, Quasicyclic):
        return f"Zq({g.p})"
    if isinstance(g, PrimeTail):
        return f"ptail({g.start})"
    if isinstance(g, Sum):
        return "sum(" + ", ".join(format_expr(p) for p in g.parts) + ")"
    if isinstance(g, FinSupPower):
        return f"finsup({format_expr(g.base)})"
    raise TypeError(f"not a GroupExpr: {g!r}")


# ── Parsing ───────────────────────────────────────────────

_TOKEN = re.compile(r"\s*(?:(?P<word>sum|finsup|ptail|Ainf|Zq|Z|Q)|(?P<int>\d+)|(?P<punct>[(),]))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens: List[Tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", position=start, text=text)
        kind = m.lastgroup or ""
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def _peek(self) -> Tuple[str, str, int]:
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("eof", "", len(self.text))

    def _next(self) -> Tuple[str, str, int]:
        tok = self._peek()
        self.i += 1
        return tok

    def _expect(self, value: str) -> None:
        kind, val, pos = self._next()
        if val != value:
            got = val or "end of input"
            raise ParseError(f"expected {value!r}, got {got!r}", position=pos, text=self.text)

    def _int(self) -> Tuple[int, int]:
        kind, val, pos = self._next()
        if kind != "int":
            raise ParseError(f"expected an integer, got {val or 'end of input'!r}", position=pos, text=self.text)
        return int(val), pos

    def parse(self) -> GroupExpr:
        g = self._expr()
        kind, val, pos = self._peek()
        if kind != "eof":
            raise ParseError(f"trailing input {val!r}", position=pos, text=self.text)
        return g

    def _expr(self) -> GroupExpr:
        kind, val, pos = self._next()
        if kind == "int":
            if val == "0":
                return ZERO
            raise ParseError(f"bare integer {val!r} is not a group", position=pos, text=self.text)
        if val == "Q":
            return Q
        if val == "Ainf":
            return AINF
        if val == "Z":
            if self._peek()[1] != "(":
                return Z
            self._expect("(")
            n, npos = self._int()
            self._expect(")")
            if n < 2:
                raise ParseError(f"cyclic modulus must be >= 2, got {n}", position=npos, text=self.text)
            return Cyclic(n)
        if val == "Zq":
            self._expect("(")
            p, ppos = self._int()
            self._expect(")")
            if not sympy.isprime(p):
                raise ParseError(f"quasicyclic parameter {p} is not prime", position=ppos, text=self.text)
            return Quasicyclic(p)
        if val == "ptail":
            self._expect("(")
            k, _ = self._int()
            self._expect(")")
            return PrimeTail(k)
        if val == "finsup":
            self._expect("(")
            base = self._expr()
            self._expect(")")
            return FinSupPower(base)
        if val == "sum":
            self._expect("(")
            parts = [self._expr()]
            while self._peek()[1] == ",":
                self._next()
                parts.append(self._expr())
            self._expect(")")
            return Sum(*parts)
        raise ParseError(f"unexpected token {val or 'end of input'!r}", position=pos, text=self.text)


def parse_expr(text: str) -> GroupExpr:
    """Parse the text form; raises ParseError with a character offset."""
    return _Parser(text).parse()


def _coerce(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return parse_expr(value)
        except ParseError as exc:
            # surfaces as a ValidationError carrying the field location
            raise ValueError(str(exc)) from exc
    return value


# Field type for models that carry expressions in text form on the wire.
Expr = Annotated[GroupExpr, BeforeValidator(_coerce), PlainSerializer(format_expr, return_type=str)]
