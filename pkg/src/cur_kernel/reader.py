"""Parenthesized surface syntax: tokens, trees with spans, and a printer.

Round and square brackets are interchangeable but must match by kind.
Comments run from ``;`` to end of line.  Keywords are ``#:``-prefixed
atoms; integer literals and identifiers are plain atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Tuple, Union

from .errors import ParseError, Span

_OPEN = {"(": ")", "[": "]"}
_CLOSE = {")", "]"}
_DELIMS = set("()[]") | {";"}


@dataclass(frozen=True)
class SAtom:
    text: str
    span: Span

    def __repr__(self) -> str:
        return f"SAtom({self.text!r})"


@dataclass(frozen=True)
class SList:
    items: Tuple["SurfaceTerm", ...]
    span: Span

    def __repr__(self) -> str:
        return f"SList({list(self.items)!r})"


SurfaceTerm = Union[SAtom, SList]


@dataclass(frozen=True)
class Token:
    kind: str  # 'open' | 'close' | 'atom'
    text: str
    span: Span


@dataclass(frozen=True)
class Skipped:
    """A region of the input not belonging to any token (space/comment)."""

    start: int
    end: int


def tokenize(text: str, file: str = "<input>") -> Tuple[List[Token], List[Skipped]]:
    """Split ``text`` into tokens plus the skipped regions between them.

    Every character of the input lands in exactly one token or one
    skipped region (the partition is what the reader tests check).
    """
    tokens: List[Token] = []
    skipped: List[Skipped] = []
    i = 0
    line, col = 1, 1
    n = len(text)

    def advance(ch: str) -> None:
        nonlocal line, col
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1

    while i < n:
        ch = text[i]
        if ch.isspace():
            start = i
            while i < n and text[i].isspace():
                advance(text[i])
                i += 1
            skipped.append(Skipped(start, i))
            continue
        if ch == ";":
            start = i
            while i < n and text[i] != "\n":
                advance(text[i])
                i += 1
            skipped.append(Skipped(start, i))
            continue
        if ch in _OPEN:
            tokens.append(Token("open", ch, Span(file, line, col, 1)))
            advance(ch)
            i += 1
            continue
        if ch in _CLOSE:
            tokens.append(Token("close", ch, Span(file, line, col, 1)))
            advance(ch)
            i += 1
            continue
        start = i
        start_line, start_col = line, col
        while i < n and not text[i].isspace() and text[i] not in _DELIMS:
            advance(text[i])
            i += 1
        tokens.append(
            Token("atom", text[start:i], Span(file, start_line, start_col, i - start))
        )
    return tokens, skipped


def parse(text: str, file: str = "<input>") -> List[SurfaceTerm]:
    """Parse source text into its top-level forms, in order."""
    tokens, _ = tokenize(text, file)
    forms: List[SurfaceTerm] = []
    stack: List[Tuple[Token, List[SurfaceTerm]]] = []
    for tok in tokens:
        if tok.kind == "open":
            stack.append((tok, []))
        elif tok.kind == "close":
            if not stack:
                raise ParseError(f"stray closing bracket {tok.text!r}", tok.span)
            opener, items = stack.pop()
            if _OPEN[opener.text] != tok.text:
                raise ParseError(
                    f"mismatched brackets: {opener.text!r} closed by {tok.text!r}",
                    tok.span,
                )
            node = SList(tuple(items), opener.span)
            if stack:
                stack[-1][1].append(node)
            else:
                forms.append(node)
        else:
            node = SAtom(tok.text, tok.span)
            if stack:
                stack[-1][1].append(node)
            else:
                forms.append(node)
    if stack:
        opener, _ = stack[0]
        raise ParseError(f"{len(stack)} unclosed bracket(s)", opener.span)
    return forms


def parse_one(text: str, file: str = "<input>") -> SurfaceTerm:
    forms = parse(text, file)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one form, found {len(forms)}")
    return forms[0]


def print_surface(term: SurfaceTerm) -> str:
    """Render a surface tree back to text (re-parses to an equal tree)."""
    if isinstance(term, SAtom):
        return term.text
    return "(" + " ".join(print_surface(t) for t in term.items) + ")"


def is_atom(term: SurfaceTerm, text: str | None = None) -> bool:
    if not isinstance(term, SAtom):
        return False
    return text is None or term.text == text


def is_keyword(term: SurfaceTerm) -> bool:
    return isinstance(term, SAtom) and term.text.startswith("#:")


def int_value(term: SurfaceTerm) -> int | None:
    """The integer value of a literal atom, or None."""
    if not isinstance(term, SAtom):
        return None
    t = term.text
    if t and (t.isdigit() or (t[0] == "-" and t[1:].isdigit())):
        return int(t)
    return None


def surface_equal(a: SurfaceTerm, b: SurfaceTerm) -> bool:
    """Tree equality, spans ignored."""
    if isinstance(a, SAtom) and isinstance(b, SAtom):
        return a.text == b.text
    if isinstance(a, SList) and isinstance(b, SList):
        return len(a.items) == len(b.items) and all(
            surface_equal(x, y) for x, y in zip(a.items, b.items)
        )
    return False


def iter_atoms(term: SurfaceTerm) -> Iterator[SAtom]:
    if isinstance(term, SAtom):
        yield term
    else:
        for item in term.items:
            yield from iter_atoms(item)
