"""Shared helpers: elaboration shorthands, unary-numeral conversions, and
hypothesis strategies for random core terms."""

from __future__ import annotations

from typing import Tuple

from hypothesis import strategies as st

from cur_kernel.check import check, infer
from cur_kernel.core import (
    EMPTY_CTX,
    App,
    Const,
    Lam,
    Name,
    Pi,
    Term,
    Universe,
    Var,
    fresh,
    unspine,
)
from cur_kernel.elab import desugar
from cur_kernel.environment import Env
from cur_kernel.reader import parse_one


def ex(env: Env, src: str) -> Tuple[Term, Term]:
    """Infer a source expression in the empty context."""
    return infer(env, EMPTY_CTX, desugar(parse_one(src)))


def chk(env: Env, src: str, ty_src: str) -> Term:
    ty = env.normalize(check(env, EMPTY_CTX, desugar(parse_one(ty_src)), Universe()))
    return check(env, EMPTY_CTX, desugar(parse_one(src)), ty)


def nv(env: Env, src: str) -> Term:
    core, _ = ex(env, src)
    return env.normalize(core)


def nat_term(n: int) -> Term:
    t: Term = Const("Z")
    for _ in range(n):
        t = App(Const("S"), t)
    return t


def to_int(t: Term) -> int:
    """Unary numeral back to an int (raises on non-numerals)."""
    n = 0
    while True:
        head, args = unspine(t)
        if isinstance(head, Const) and head.name == "Z" and not args:
            return n
        if isinstance(head, Const) and head.name == "S" and len(args) == 1:
            n += 1
            t = args[0]
            continue
        raise ValueError(f"not a unary numeral: {t!r}")


# --- random core terms (typing-free, for binding/equality properties) -------

_FREE = [Name(-(i + 1), h) for i, h in enumerate("uvw")]


def free_var_names():
    return list(_FREE)


def terms(max_depth: int = 4):
    base = st.one_of(
        st.sampled_from([Var(n) for n in _FREE]),
        st.sampled_from([Const("Z"), Const("Nat"), Const("Bool")]),
        st.just(Universe()),
    )

    def extend(children):
        def lam(body_and_ann):
            body, ann = body_and_ann
            x = fresh("x")
            return Lam(x, ann, _close_some(body, x))

        def pi(pair):
            dom, cod = pair
            x = fresh("p")
            return Pi(x, dom, _close_some(cod, x))

        return st.one_of(
            st.tuples(children, children).map(lambda p: App(p[0], p[1])),
            st.tuples(children, st.none() | children).map(lam),
            st.tuples(children, children).map(pi),
        )

    return st.recursive(base, extend, max_leaves=max_depth * 3)


def _close_some(t: Term, x: Name) -> Term:
    """Rebind occurrences of the first free placeholder to x, making the
    generated binder actually bind something now and then."""
    from cur_kernel.core import subst

    return subst(t, _FREE[0], Var(x))
