"""Error types shared across the kernel.

All user-facing errors derive from CurError and render as
``file:line:col: <kind>: <message>`` when a source span is available.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Span:
    """Location of a token or form inside a source text."""

    file: str
    line: int  # 1-based
    col: int  # 1-based
    length: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


class CurError(Exception):
    kind = "error"

    def __init__(self, message: str, span: Optional[Span] = None):
        self.message = message
        self.span = span
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.span is not None:
            return f"{self.span}: {self.kind}: {self.message}"
        return f"{self.kind}: {self.message}"


class ParseError(CurError):
    kind = "parse error"


class ElabError(CurError):
    """Elaboration failure that is not a plain type mismatch."""

    kind = "elab error"


class TypeMismatch(CurError):
    kind = "ty mismatch"

    def __init__(self, expected: str, actual: str, span: Optional[Span] = None):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected {expected}, got {actual}", span)


class UnifyError(CurError):
    kind = "unify error"


class NonTerminating(CurError):
    kind = "nonterminate"


class SizeError(CurError):
    kind = "non-terminating!"


class DivergenceError(CurError):
    kind = "divergence"

    def __init__(self, rule: str, message: str):
        self.rule = rule
        super().__init__(message)


class RegistrationError(CurError):
    kind = "registration error"


class TacticError(CurError):
    kind = "tactic error"
