"""
cosettree — Exception hierarchy

InputError subclasses are the user's fault (bad file, cap exceeded,
precondition failed) and map to CLI exit code 2 / HTTP 422.
InvariantViolation is ours and maps to exit code 1.
"""

from __future__ import annotations

from typing import Optional


class CosetTreeError(Exception):
    """Base class for every error raised by the package."""


class InputError(CosetTreeError):
    """Invalid input or violated precondition."""


class InvariantViolation(CosetTreeError):
    """An internal consistency check failed."""


class ParseError(InputError):
    """Malformed text or file, with a position for the diagnostic."""

    def __init__(self, message: str, *, position: Optional[object] = None, text: str = "") -> None:
        self.position = position
        self.text = text
        where = f" at {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class InvalidPrime(InputError):
    pass


class CapExceeded(InputError):
    pass


class InfiniteGroup(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class StructureMismatch(InputError):
    pass


class NodeNotInTree(InputError):
    pass


class NotCosetTree(InputError):
    pass


class NonTorsionInput(InputError):
    pass


class UnsupportedComparison(InputError):
    pass


class UnsupportedExpression(InputError):
    pass


class MalformedSpec(InputError):
    pass


class BadCuts(InputError):
    pass


class NotTame(InputError):
    pass


class NotTameTier(InputError):
    pass


class HorizonTooSmall(InputError):
    pass
