"""Bidirectional type checker over surface syntax.

`infer` synthesizes a (core term, normalized type) pair; `check` pushes
an expected type inward.  Definitional equality normalizes both sides,
compares up to alpha, and then consults the active equality mode's
extension predicate — the hook the termination and sized analyses
overload for the duration of a judgment.

Surface forms beyond the core calculus (pattern matching, literals,
implicit applications, proof scripts) dispatch through SPECIAL_FORMS,
which the modules implementing them populate at import time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .core import (
    App,
    Const,
    Context,
    Lam,
    Name,
    Pi,
    Telescope,
    Term,
    Universe,
    Var,
    alpha_eq,
    fresh,
    meta_get,
    print_term,
    subst,
    with_meta,
)
from .environment import Env
from .errors import ElabError, Span, TypeMismatch
from .reader import SAtom, SList, SurfaceTerm, int_value


@dataclass(frozen=True)
class EqMode:
    """A definitional-equality mode: baseline equality plus an extension.

    The extension runs only after baseline equality succeeds; it may
    return False or raise a domain error ("nonterminate" and friends).
    Exactly one mode is active per judgment invocation.
    """

    label: str
    extension: Callable[[Term, Term], bool]


DEFAULT_MODE = EqMode("default", lambda actual, expected: True)

# form head -> handler(env, ctx, form, expected_or_None) -> (core, type)
SPECIAL_FORMS: Dict[str, Callable[..., Tuple[Term, Term]]] = {}

# handler(env, value:int, span) -> SurfaceTerm ; installed by the literal overload
DATUM_HANDLER: List[Callable[..., SurfaceTerm]] = []

ATOM_ALIASES = {"==": "="}

_LAM_HEADS = {"λ", "lambda"}
_PI_HEADS = {"Π", "Pi"}


def def_eq(env: Env, t1: Term, t2: Term, mode: Optional[EqMode] = None) -> bool:
    """Normalize both sides, compare up to alpha, then run the mode's extension."""
    if mode is None:
        mode = env.eq_mode or DEFAULT_MODE  # type: ignore[assignment]
    n1 = env.normalize(t1)
    n2 = env.normalize(t2)
    if not alpha_eq(n1, n2):
        return False
    return bool(mode.extension(n1, n2))


def _got(env: Env, ctx: Context, t: Term) -> str:
    return print_term(env.normalize(t), reserved=env.globals.keys())


def parse_binder(b: SurfaceTerm) -> Tuple[str, SurfaceTerm]:
    """Split a [x : τ] binder form."""
    if (
        isinstance(b, SList)
        and len(b.items) == 3
        and isinstance(b.items[0], SAtom)
        and isinstance(b.items[1], SAtom)
        and b.items[1].text == ":"
    ):
        return b.items[0].text, b.items[2]
    raise ElabError("expected a binder of shape [x : τ]", b.span)


def infer(env: Env, ctx: Context, s: SurfaceTerm) -> Tuple[Term, Term]:
    """Synthesize the elaborated core term and its type (in normal form)."""
    if isinstance(s, SAtom):
        return _infer_atom(env, ctx, s)

    items = s.items
    if not items:
        raise ElabError("empty application", s.span)
    head = items[0]

    if isinstance(head, SAtom):
        txt = ATOM_ALIASES.get(head.text, head.text)
        if txt in _LAM_HEADS:
            return _infer_lambda(env, ctx, s)
        if txt in _PI_HEADS:
            return _infer_pi(env, ctx, s)
        if txt in SPECIAL_FORMS:
            return SPECIAL_FORMS[txt](env, ctx, s, None)

    fhead, fargs = _flatten(s)
    if isinstance(fhead, SAtom):
        txt = ATOM_ALIASES.get(fhead.text, fhead.text)
        info = env.lookup(txt) if ctx.resolve(txt) is None else None
        if info is not None and info.role == "elim":
            from .datatypes import elab_elim_spine

            return elab_elim_spine(env, ctx, s, fhead, fargs)
        if info is not None and info.role == "implicit":
            from .unify import elab_implicit_app

            return elab_implicit_app(env, ctx, info, list(fargs), None, s.span)
        if info is not None and info.role == "sized-ctor":
            from .sized import elab_sized_ctor

            return elab_sized_ctor(env, ctx, info, list(fargs), s.span)

    if len(items) != 2:
        # application is binary after sugar; a longer list means the
        # caller skipped desugaring, so curry it here for convenience
        if len(items) > 2:
            cur: SurfaceTerm = items[0]
            for a in items[1:]:
                cur = SList((cur, a), s.span)
            return infer(env, ctx, cur)
        return infer(env, ctx, items[0])
    return _infer_app(env, ctx, s)


def _is_form(s: SurfaceTerm) -> bool:
    if not (isinstance(s, SList) and s.items and isinstance(s.items[0], SAtom)):
        return False
    t = s.items[0].text
    return t in _LAM_HEADS or t in _PI_HEADS or t in SPECIAL_FORMS


def _flatten(s: SurfaceTerm) -> Tuple[SurfaceTerm, Tuple[SurfaceTerm, ...]]:
    """Head and argument list of a (possibly nested binary) application."""
    args: List[SurfaceTerm] = []
    cur = s
    while isinstance(cur, SList) and len(cur.items) >= 2 and not _is_form(cur):
        args[:0] = cur.items[1:]
        cur = cur.items[0]
    if isinstance(cur, SList) and len(cur.items) == 1:
        cur = cur.items[0]
    return cur, tuple(args)


def _infer_atom(env: Env, ctx: Context, s: SAtom) -> Tuple[Term, Term]:
    txt = ATOM_ALIASES.get(s.text, s.text)
    n = int_value(s)
    if n is not None:
        if not DATUM_HANDLER:
            raise ElabError(f"unsupported literal {s.text!r}", s.span)
        return infer(env, ctx, DATUM_HANDLER[0](env, n, s.span))
    if txt == "Type":
        return Universe(), Universe()
    if txt.startswith("#:"):
        raise ElabError(f"unexpected keyword {txt}", s.span)
    local = ctx.resolve(txt)
    if local is not None:
        return Var(local), ctx.type_of(local)
    info = env.lookup(txt)
    if info is not None:
        if info.role == "elim":
            raise ElabError(
                f"eliminator {txt} must be applied to a target, motive, and methods",
                s.span,
            )
        if info.role == "implicit":
            from .unify import elab_implicit_app

            return elab_implicit_app(env, ctx, info, [], None, s.span)
        if info.role == "sized-ctor":
            from .sized import elab_sized_ctor

            return elab_sized_ctor(env, ctx, info, [], s.span)
        term: Term = Const(txt)
        if info.role == "axiom":
            term = with_meta(term, "axiom", txt)
        return term, info.type_
    raise ElabError(f"unbound name {txt!r}", s.span)


def _infer_lambda(env: Env, ctx: Context, s: SList) -> Tuple[Term, Term]:
    if len(s.items) != 3:
        raise ElabError("lambda takes one binder and a body", s.span)
    binder = s.items[1]
    if isinstance(binder, SAtom):
        raise ElabError(
            f"cannot infer a type for unannotated λ binder {binder.text!r}", s.span
        )
    x, dom_s = parse_binder(binder)
    dom = env.normalize(check(env, ctx, dom_s, Universe()))
    name = fresh(x)
    body_core, body_ty = infer(env, ctx.bind(x, name, dom), s.items[2])
    return Lam(name, dom, body_core), Pi(name, dom, body_ty)


def _infer_pi(env: Env, ctx: Context, s: SList) -> Tuple[Term, Term]:
    if len(s.items) != 3:
        raise ElabError("Π takes one binder and a body", s.span)
    x, dom_s = parse_binder(s.items[1])
    dom = env.normalize(check(env, ctx, dom_s, Universe()))
    name = fresh(x)
    cod = check(env, ctx.bind(x, name, dom), s.items[2], Universe())
    return Pi(name, dom, cod), Universe()


def _infer_app(env: Env, ctx: Context, s: SList) -> Tuple[Term, Term]:
    f_s, a_s = s.items
    f_core, f_ty = infer(env, ctx, f_s)
    f_ty = env.whnf(f_ty)
    if not isinstance(f_ty, Pi):
        raise ElabError(
            f"applying a non-Π: {_got(env, ctx, f_ty)}",
            s.span,
        )
    sig_meta = meta_get(f_ty, "sized-sig")
    if sig_meta is not None:
        return _infer_sized_app(env, ctx, s, f_core, f_ty, sig_meta)
    a_core = check(env, ctx, a_s, f_ty.domain)
    out = env.normalize(subst(f_ty.codomain, f_ty.binder, a_core))
    return App(f_core, a_core), out


def _infer_sized_app(
    env: Env, ctx: Context, s: SList, f_core: Term, f_ty: Pi, sig_meta: object
) -> Tuple[Term, Term]:
    """Applications of size-checked functions: the declared output size is
    instantiated with the actual first argument's size once fully applied."""
    from .sized import get_sz, subst_size

    _, a_s = s.items
    if isinstance(sig_meta, tuple):
        sig, first_sz = sig_meta
    else:
        sig, first_sz = sig_meta, None
    a_core, a_ty = infer(env, ctx, a_s)
    _ensure(env, ctx, a_ty, f_ty.domain, a_s.span)
    if first_sz is None:
        first_sz = get_sz(a_ty)
    out = env.normalize(subst(f_ty.codomain, f_ty.binder, a_core))
    if isinstance(out, Pi):
        out = with_meta(out, "sized-sig", (sig, first_sz))
    else:
        out = with_meta(out, "size", subst_size(sig.out_size, sig.in_var, first_sz))
    return App(f_core, a_core), out


def check(env: Env, ctx: Context, s: SurfaceTerm, expected: Term) -> Term:
    """Elaborate `s` so that its type is definitionally equal to `expected`."""
    if isinstance(s, SList) and s.items:
        if isinstance(s.items[0], SAtom):
            txt = ATOM_ALIASES.get(s.items[0].text, s.items[0].text)
            if txt in _LAM_HEADS and len(s.items) == 3 and isinstance(s.items[1], SAtom):
                w = env.whnf(expected)
                if not isinstance(w, Pi):
                    raise TypeMismatch(
                        _got(env, ctx, expected), "a λ (function)", s.span
                    )
                x = s.items[1].text
                name = fresh(x)
                body = check(
                    env,
                    ctx.bind(x, name, env.normalize(w.domain)),
                    s.items[2],
                    subst(w.codomain, w.binder, Var(name)),
                )
                return Lam(name, env.normalize(w.domain), body)
            if txt in SPECIAL_FORMS:
                core, ty = SPECIAL_FORMS[txt](env, ctx, s, expected)
                _ensure(env, ctx, ty, expected, s.span)
                return core
        fhead, fargs = _flatten(s)
        if isinstance(fhead, SAtom):
            ftxt = ATOM_ALIASES.get(fhead.text, fhead.text)
            info = env.lookup(ftxt) if ctx.resolve(ftxt) is None else None
            if info is not None and info.role == "implicit":
                from .unify import elab_implicit_app

                core, ty = elab_implicit_app(
                    env, ctx, info, list(fargs), expected, s.span
                )
                _ensure(env, ctx, ty, expected, s.span)
                return core
    if isinstance(s, SAtom):
        info = env.lookup(ATOM_ALIASES.get(s.text, s.text)) if ctx.resolve(s.text) is None else None
        if info is not None and info.role == "implicit":
            from .unify import elab_implicit_app

            core, ty = elab_implicit_app(env, ctx, info, [], expected, s.span)
            _ensure(env, ctx, ty, expected, s.span)
            return core
    core, ty = infer(env, ctx, s)
    _ensure(env, ctx, ty, expected, s.span)
    return core


def _ensure(env: Env, ctx: Context, actual: Term, expected: Term, span: Span) -> None:
    if not def_eq(env, actual, expected):
        raise TypeMismatch(_got(env, ctx, expected), _got(env, ctx, actual), span)


def check_telescope(
    env: Env,
    ctx: Context,
    bindings: List[Tuple[str, SurfaceTerm]],
    expected_sort: Term,
) -> Tuple[Context, Telescope]:
    """Fold-check a binding sequence, left to right.

    Each type is checked against `expected_sort` in the context extended
    by all *earlier* bindings only, then its binder joins the context for
    the rest of the fold.
    """
    seen = set()
    tele: List[Tuple[Name, Term]] = []
    for text, ty_s in bindings:
        if text in seen:
            raise ElabError(f"duplicate binder {text!r} in telescope", ty_s.span)
        seen.add(text)
        ty = env.normalize(check(env, ctx, ty_s, expected_sort))
        name = fresh(text)
        ctx = ctx.bind(text, name, ty)
        tele.append((name, ty))
    return ctx, tuple(tele)


# --- termination-mark helpers (used by the recursive-definition checker) ----


def rec_check_mode() -> EqMode:
    from .errors import NonTerminating

    def extension(actual: Term, expected: Term) -> bool:
        if meta_get(expected, "rec-arg") and not meta_get(actual, "rec-ok"):
            raise NonTerminating(
                "recursive call on an argument that is not structurally smaller"
            )
        return True

    return EqMode("rec-check", extension)
