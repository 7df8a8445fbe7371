"""Core terms: binding, substitution, alpha-equivalence, and printing.

Terms use globally unique binder names instead of de Bruijn indices, so
alpha-equivalence is a parallel traversal with a renaming map and
printed terms stay readable.  Every node carries a small metadata bag
(axiom/size/termination tags) that equality ignores.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, Optional, Set, Tuple

Meta = Tuple[Tuple[str, object], ...]

_ids = itertools.count(1)  # .__next__ is atomic under the GIL
_hole_ids = itertools.count(1)


@dataclass(frozen=True, eq=False)
class Name:
    """A binder identity: unique numeric id plus a printable hint."""

    id: int
    hint: str = "x"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Name) and other.id == self.id

    def __hash__(self) -> int:
        return hash(self.id)

    def __repr__(self) -> str:
        return f"{self.hint or '_'}#{self.id}"


def fresh(hint: str = "x") -> Name:
    """A Name whose id has never been handed out in this session."""
    return Name(next(_ids), hint)


class Term:
    """Base class for core terms; see the concrete node types below."""

    meta: Meta

    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: Name
    meta: Meta = field(default=(), kw_only=True)


@dataclass(frozen=True, eq=False)
class Const(Term):
    name: str
    meta: Meta = field(default=(), kw_only=True)


@dataclass(frozen=True, eq=False)
class Universe(Term):
    meta: Meta = field(default=(), kw_only=True)


@dataclass(frozen=True, eq=False)
class Pi(Term):
    binder: Name
    domain: Term
    codomain: Term
    meta: Meta = field(default=(), kw_only=True)


@dataclass(frozen=True, eq=False)
class Lam(Term):
    binder: Name
    annotation: Optional[Term]
    body: Term
    meta: Meta = field(default=(), kw_only=True)


@dataclass(frozen=True, eq=False)
class App(Term):
    fn: Term
    arg: Term
    meta: Meta = field(default=(), kw_only=True)


@dataclass(frozen=True, eq=False)
class Elim(Term):
    """Eliminator application: one method per constructor of `datatype`."""

    datatype: str
    target: Term
    motive: Term
    methods: Tuple[Term, ...]
    meta: Meta = field(default=(), kw_only=True)


@dataclass(frozen=True, eq=False)
class Hole(Term):
    id: int
    meta: Meta = field(default=(), kw_only=True)


TYPE = Universe()


def fresh_hole() -> Hole:
    return Hole(next(_hole_ids))


# --- metadata -------------------------------------------------------------


def meta_get(t: Term, key: str, default: object = None) -> object:
    for k, v in t.meta:
        if k == key:
            return v
    return default


def with_meta(t: Term, key: str, value: object) -> Term:
    kept = tuple((k, v) for k, v in t.meta if k != key)
    return replace(t, meta=kept + ((key, value),))


def strip_meta(t: Term, key: str) -> Term:
    if meta_get(t, key) is None:
        return t
    return replace(t, meta=tuple((k, v) for k, v in t.meta if k != key))


def strip_meta_deep(t: Term, key: str) -> Term:
    """Remove `key` metadata from every node of the term."""

    def go(u: Term) -> Term:
        u = strip_meta(u, key)
        if isinstance(u, Pi):
            return replace(u, domain=go(u.domain), codomain=go(u.codomain))
        if isinstance(u, Lam):
            ann = go(u.annotation) if u.annotation is not None else None
            return replace(u, annotation=ann, body=go(u.body))
        if isinstance(u, App):
            return replace(u, fn=go(u.fn), arg=go(u.arg))
        if isinstance(u, Elim):
            return replace(
                u,
                target=go(u.target),
                motive=go(u.motive),
                methods=tuple(go(m) for m in u.methods),
            )
        return u

    return go(t)


# --- application spines ---------------------------------------------------


def app(fn: Term, *args: Term) -> Term:
    t = fn
    for a in args:
        t = App(t, a)
    return t


def unspine(t: Term) -> Tuple[Term, Tuple[Term, ...]]:
    """Unwind nested applications: head plus arguments, left to right."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, tuple(args)


# --- free variables and substitution --------------------------------------


def free_vars(t: Term) -> Set[Name]:
    out: Set[Name] = set()

    def go(u: Term, bound: FrozenSet[Name]) -> None:
        if isinstance(u, Var):
            if u.name not in bound:
                out.add(u.name)
        elif isinstance(u, Pi):
            go(u.domain, bound)
            go(u.codomain, bound | {u.binder})
        elif isinstance(u, Lam):
            if u.annotation is not None:
                go(u.annotation, bound)
            go(u.body, bound | {u.binder})
        elif isinstance(u, App):
            go(u.fn, bound)
            go(u.arg, bound)
        elif isinstance(u, Elim):
            go(u.target, bound)
            go(u.motive, bound)
            for m in u.methods:
                go(m, bound)

    go(t, frozenset())
    return out


def subst(body: Term, x: Name, value: Term) -> Term:
    """Capture-avoiding replacement of free occurrences of x by value."""
    return subst_many(body, {x: value})


def subst_many(body: Term, mapping: Dict[Name, Term]) -> Term:
    if not mapping:
        return body
    danger: Set[Name] = set()
    for v in mapping.values():
        danger |= free_vars(v)

    def go(u: Term, mp: Dict[Name, Term]) -> Term:
        if isinstance(u, Var):
            got = mp.get(u.name)
            if got is None:
                return u
            if u.meta:
                # occurrence keeps its own tags on top of the replacement's
                merged = dict(got.meta)
                merged.update(dict(u.meta))
                return replace(got, meta=tuple(merged.items()))
            return got
        if isinstance(u, (Const, Universe, Hole)):
            return u
        if isinstance(u, Pi):
            mp2, b = _enter_binder(u.binder, mp)
            dom = go(u.domain, mp)
            cod = go(u.codomain, mp2)
            return replace(u, binder=b, domain=dom, codomain=cod)
        if isinstance(u, Lam):
            ann = go(u.annotation, mp) if u.annotation is not None else None
            mp2, b = _enter_binder(u.binder, mp)
            return replace(u, binder=b, annotation=ann, body=go(u.body, mp2))
        if isinstance(u, App):
            return replace(u, fn=go(u.fn, mp), arg=go(u.arg, mp))
        if isinstance(u, Elim):
            return replace(
                u,
                target=go(u.target, mp),
                motive=go(u.motive, mp),
                methods=tuple(go(m, mp) for m in u.methods),
            )
        raise TypeError(f"unknown term node {u!r}")

    def _enter_binder(b: Name, mp: Dict[Name, Term]) -> Tuple[Dict[Name, Term], Name]:
        mp = {k: v for k, v in mp.items() if k != b}
        if b in danger and mp:
            b2 = fresh(b.hint)
            mp = dict(mp)
            mp[b] = Var(b2)
            return mp, b2
        return mp, b

    return go(body, dict(mapping))


def rename(body: Term, x: Name, y: Name) -> Term:
    return subst(body, x, Var(y))


# --- alpha-equivalence ----------------------------------------------------


def alpha_eq(t1: Term, t2: Term) -> bool:
    """Identical up to consistent renaming of bound Names; metadata ignored."""

    def go(a: Term, b: Term, m1: Dict[Name, int], m2: Dict[Name, int], depth: int) -> bool:
        if isinstance(a, Var) and isinstance(b, Var):
            i, j = m1.get(a.name), m2.get(b.name)
            if i is None and j is None:
                return a.name == b.name
            return i is not None and i == j
        if isinstance(a, Const) and isinstance(b, Const):
            return a.name == b.name
        if isinstance(a, Universe) and isinstance(b, Universe):
            return True
        if isinstance(a, Hole) and isinstance(b, Hole):
            return a.id == b.id
        if isinstance(a, Pi) and isinstance(b, Pi):
            if not go(a.domain, b.domain, m1, m2, depth):
                return False
            n1 = dict(m1)
            n2 = dict(m2)
            n1[a.binder] = depth
            n2[b.binder] = depth
            return go(a.codomain, b.codomain, n1, n2, depth + 1)
        if isinstance(a, Lam) and isinstance(b, Lam):
            if (a.annotation is None) != (b.annotation is None):
                return False
            if a.annotation is not None and not go(a.annotation, b.annotation, m1, m2, depth):
                return False
            n1 = dict(m1)
            n2 = dict(m2)
            n1[a.binder] = depth
            n2[b.binder] = depth
            return go(a.body, b.body, n1, n2, depth + 1)
        if isinstance(a, App) and isinstance(b, App):
            return go(a.fn, b.fn, m1, m2, depth) and go(a.arg, b.arg, m1, m2, depth)
        if isinstance(a, Elim) and isinstance(b, Elim):
            return (
                a.datatype == b.datatype
                and len(a.methods) == len(b.methods)
                and go(a.target, b.target, m1, m2, depth)
                and go(a.motive, b.motive, m1, m2, depth)
                and all(go(x, y, m1, m2, depth) for x, y in zip(a.methods, b.methods))
            )
        return False

    return go(t1, t2, {}, {}, 0)


# --- contexts and telescopes ----------------------------------------------

Telescope = Tuple[Tuple[Name, Term], ...]


@dataclass(frozen=True)
class CtxEntry:
    name: Name
    text: str  # surface spelling used to introduce the binder
    type_: Term
    definition: Optional[Term] = None


@dataclass(frozen=True)
class Context:
    """Ordered typing environment; later entries may reference earlier ones."""

    entries: Tuple[CtxEntry, ...] = ()

    def bind(
        self, text: str, name: Name, type_: Term, definition: Optional[Term] = None
    ) -> "Context":
        if any(e.name == name for e in self.entries):
            raise ValueError(f"duplicate context name {name!r}")
        return Context(self.entries + (CtxEntry(name, text, type_, definition),))

    def resolve(self, text: str) -> Optional[Name]:
        for e in reversed(self.entries):
            if e.text == text:
                return e.name
        return None

    def lookup(self, name: Name) -> Optional[CtxEntry]:
        for e in reversed(self.entries):
            if e.name == name:
                return e
        return None

    def type_of(self, name: Name) -> Term:
        e = self.lookup(name)
        if e is None:
            raise KeyError(f"{name!r} not in context")
        return e.type_

    def __len__(self) -> int:
        return len(self.entries)


EMPTY_CTX = Context()


# --- printing ---------------------------------------------------------------


def _pick_name(hint: str, taken: Set[str]) -> str:
    base = hint or "_"
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def _free_occurrence_order(t: Term) -> list[Name]:
    seen: list[Name] = []

    def go(u: Term, bound: FrozenSet[Name]) -> None:
        if isinstance(u, Var):
            if u.name not in bound and u.name not in seen:
                seen.append(u.name)
        elif isinstance(u, Pi):
            go(u.domain, bound)
            go(u.codomain, bound | {u.binder})
        elif isinstance(u, Lam):
            if u.annotation is not None:
                go(u.annotation, bound)
            go(u.body, bound | {u.binder})
        elif isinstance(u, App):
            go(u.fn, bound)
            go(u.arg, bound)
        elif isinstance(u, Elim):
            go(u.target, bound)
            go(u.motive, bound)
            for m in u.methods:
                go(m, bound)

    go(t, frozenset())
    return seen


def print_term(
    t: Term,
    scope: Optional[Dict[Name, str]] = None,
    reserved: Iterable[str] = (),
    style: str = "canonical",
) -> str:
    """Render a core term as surface syntax.

    `scope` pre-seeds printed names for free variables (context entries);
    `reserved` names are avoided when choosing binder spellings.  The
    canonical style prints univariate Pi/lambda forms; the display style
    collapses Pi chains into a single  (∀ (x : τ) ... body)  form for
    interactive goal output.  Both re-parse.
    """
    scope = dict(scope or {})
    taken = set(scope.values()) | set(reserved)
    for name in _free_occurrence_order(t):
        if name not in scope:
            printed = _pick_name(name.hint, taken)
            scope[name] = printed
            taken.add(printed)

    def bind(name: Name, sc: Dict[Name, str], tk: Set[str]) -> Tuple[str, Dict[Name, str], Set[str]]:
        printed = _pick_name(name.hint, tk)
        sc2 = dict(sc)
        sc2[name] = printed
        return printed, sc2, tk | {printed}

    def go(u: Term, sc: Dict[Name, str], tk: Set[str]) -> str:
        if isinstance(u, Var):
            got = sc.get(u.name)
            if got is not None:
                return got
            return f"_v{u.name.id}"
        if isinstance(u, Const):
            return u.name
        if isinstance(u, Universe):
            return "Type"
        if isinstance(u, Hole):
            return f"?h{u.id}"
        if isinstance(u, Pi):
            if style == "display":
                binders = []
                while isinstance(u, Pi):
                    dom = go(u.domain, sc, tk)
                    printed, sc, tk = bind(u.binder, sc, tk)
                    binders.append(f"({printed} : {dom})")
                    u = u.codomain
                return f"(∀ {' '.join(binders)} {go(u, sc, tk)})"
            printed, sc2, tk2 = bind(u.binder, sc, tk)
            return f"(Π [{printed} : {go(u.domain, sc, tk)}] {go(u.codomain, sc2, tk2)})"
        if isinstance(u, Lam):
            printed, sc2, tk2 = bind(u.binder, sc, tk)
            if u.annotation is None:
                return f"(λ {printed} {go(u.body, sc2, tk2)})"
            return f"(λ [{printed} : {go(u.annotation, sc, tk)}] {go(u.body, sc2, tk2)})"
        if isinstance(u, App):
            head, args = unspine(u)
            parts = [go(head, sc, tk)] + [go(a, sc, tk) for a in args]
            return "(" + " ".join(parts) + ")"
        if isinstance(u, Elim):
            parts = [f"elim-{u.datatype}", go(u.target, sc, tk), go(u.motive, sc, tk)]
            parts += [go(m, sc, tk) for m in u.methods]
            return "(" + " ".join(parts) + ")"
        raise TypeError(f"unknown term node {u!r}")

    return go(t, scope, taken)
