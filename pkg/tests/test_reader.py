"""Reader: tokens, trees, spans, and the print/parse round trip."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cur_kernel.errors import ParseError
from cur_kernel.reader import (
    SAtom,
    SList,
    parse,
    parse_one,
    print_surface,
    surface_equal,
    tokenize,
)


def test_parse_lambda_form():
    form = parse_one("(λ [x : Nat] x)")
    assert isinstance(form, SList)
    lam, binder, body = form.items
    assert isinstance(lam, SAtom) and lam.text == "λ"
    assert isinstance(binder, SList)
    assert [a.text for a in binder.items] == ["x", ":", "Nat"]
    assert isinstance(body, SAtom) and body.text == "x"


def test_empty_input():
    assert parse("") == []


def test_unclosed_brackets_counted():
    with pytest.raises(ParseError) as e:
        parse("(f (g")
    assert "2 unclosed" in str(e.value)


def test_stray_closer():
    with pytest.raises(ParseError):
        parse(")")


def test_mismatched_bracket_kind():
    with pytest.raises(ParseError) as e:
        parse("(f]")
    assert "mismatched" in str(e.value)


def test_square_and_round_interchangeable():
    assert surface_equal(parse_one("[x : Nat]"), parse_one("(x : Nat)"))


def test_comments_skipped():
    forms = parse("; a comment\n(f x) ; trailing\n")
    assert len(forms) == 1


def test_keywords_are_atoms():
    form = parse_one("(match e #:as x)")
    assert form.items[2].text == "#:as"


def test_spans_inside_source():
    text = "(f\n  (g y))"
    form = parse_one(text)
    g_form = form.items[1]
    assert g_form.span.line == 2
    assert g_form.span.col == 3
    y = g_form.items[1]
    assert y.span.line == 2 and y.span.col == 6 and y.span.length == 1


def test_every_char_attributed():
    text = "(λ [x : Nat] x) ; comment\n  [y 12]"
    tokens, skipped = tokenize(text)
    covered = []
    pos = 0
    spans = sorted(
        [(s.start, s.end, "skip") for s in skipped]
        + [(_tok_start(text, t), _tok_start(text, t) + t.span.length, "tok") for t in tokens]
    )
    for start, end, _ in spans:
        assert start == pos, "gap or overlap in coverage"
        pos = end
    assert pos == len(text)


def _tok_start(text: str, tok) -> int:
    lines = text.split("\n")
    return sum(len(l) + 1 for l in lines[: tok.span.line - 1]) + tok.span.col - 1


_atom = st.text(
    alphabet=list("abcxyzSZλΠ→∀=+-*#:0123456789"), min_size=1, max_size=6
).filter(lambda s: not s.startswith(";"))

_tree = st.recursive(
    _atom.map(lambda t: ("atom", t)),
    lambda kids: st.lists(kids, max_size=4).map(lambda items: ("list", items)),
    max_leaves=12,
)


def _render(tree) -> str:
    kind, payload = tree
    if kind == "atom":
        return payload
    return "(" + " ".join(_render(t) for t in payload) + ")"


@given(_tree)
def test_print_parse_print_roundtrip(tree):
    text = _render(tree)
    parsed = parse(text)
    printed = " ".join(print_surface(f) for f in parsed)
    reparsed = parse(printed)
    assert len(parsed) == len(reparsed)
    for a, b in zip(parsed, reparsed):
        assert surface_equal(a, b)
    assert printed == " ".join(print_surface(f) for f in reparsed)
