"""Indexed inductive families.

`define_datatype` validates a declaration, mints the type and data
constructors, generates the eliminator's typing rule and its iota
reduction rules, and registers the datatype's generic methods
(`getDatatypeDef`, `patToCtxt`).  Parameters stay invariant across a
declaration; indices may vary per constructor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .check import check, check_telescope, infer
from .core import (
    EMPTY_CTX,
    Const,
    Context,
    Elim,
    Name,
    Pi,
    Telescope,
    Term,
    Universe,
    Var,
    alpha_eq,
    app,
    fresh,
    print_term,
    subst_many,
    unspine,
)
from .environment import Env, GlobalInfo
from .errors import ElabError, Span
from .reader import SAtom, SList, SurfaceTerm
from .reduce import PAny, PCtor, PVar, Pattern, ReductionRule


@dataclass(frozen=True)
class Ctor:
    """A data constructor: argument telescope plus result index terms."""

    name: str
    args: Telescope  # may reference parameters and earlier arguments
    result_indices: Tuple[Term, ...]
    rec_positions: Tuple[int, ...]  # argument slots whose type head is the datatype


@dataclass(frozen=True)
class DatatypeDecl:
    name: str
    params: Telescope
    indices: Telescope  # types may reference parameters
    ctors: Tuple[Ctor, ...]

    @property
    def elim_name(self) -> str:
        return f"elim-{self.name}"


def _pis(tele: Sequence[Tuple[Name, Term]], body: Term) -> Term:
    for name, ty in reversed(tele):
        body = Pi(name, ty, body)
    return body


def _instantiate(
    tele: Telescope, mapping: Dict[Name, Term]
) -> Tuple[List[Tuple[Name, Term]], Dict[Name, Term]]:
    """Freshen a telescope's binders under a substitution for earlier names."""
    mapping = dict(mapping)
    out: List[Tuple[Name, Term]] = []
    for name, ty in tele:
        ty2 = subst_many(ty, mapping)
        name2 = fresh(name.hint)
        mapping[name] = Var(name2)
        out.append((name2, ty2))
    return out, mapping


def motive_type(decl: DatatypeDecl, params: Sequence[Term]) -> Term:
    """Π over the indices, then over a target at those indices, to Type."""
    pm = {n: p for (n, _), p in zip(decl.params, params)}
    idx, mapping = _instantiate(decl.indices, pm)
    target_ty = app(Const(decl.name), *params, *(Var(n) for n, _ in idx))
    return _pis(idx + [(fresh("t"), target_ty)], Universe())


def method_type(
    decl: DatatypeDecl, ctor: Ctor, params: Sequence[Term], motive: Term
) -> Term:
    """Expected type of the eliminator method for `ctor`.

    Binds the constructor's arguments, then one induction-hypothesis
    argument per recursive position, ending in the motive applied to the
    constructor's result indices and the rebuilt constructor value.
    """
    pm = {n: p for (n, _), p in zip(decl.params, params)}
    args, mapping = _instantiate(ctor.args, pm)
    tele: List[Tuple[Name, Term]] = list(args)
    for pos in ctor.rec_positions:
        arg_name, arg_ty = args[pos]
        _, targs = unspine(arg_ty)
        rec_idxs = targs[len(decl.params) :]
        tele.append((fresh("ih"), app(motive, *rec_idxs, Var(arg_name))))
    built = app(Const(ctor.name), *params, *(Var(n) for n, _ in args))
    result_idxs = [subst_many(ix, mapping) for ix in ctor.result_indices]
    return _pis(tele, app(motive, *result_idxs, built))


def eliminator_type(decl: DatatypeDecl) -> Term:
    """The full Π-type of elim-T, binding parameters and target indices."""
    params, mapping = _instantiate(decl.params, {})
    param_terms = [Var(n) for n, _ in params]
    idx, mapping = _instantiate(decl.indices, mapping)
    idx_terms = [Var(n) for n, _ in idx]
    v = fresh("v")
    v_ty = app(Const(decl.name), *param_terms, *idx_terms)
    p = fresh("P")
    tele = params + idx + [(v, v_ty), (p, motive_type(decl, param_terms))]
    for ctor in decl.ctors:
        tele.append((fresh(f"m-{ctor.name}"), method_type(decl, ctor, param_terms, Var(p))))
    return _pis(tele, app(Var(p), *idx_terms, Var(v)))


def iota_rules(decl: DatatypeDecl) -> List[ReductionRule]:
    """One rule per constructor: eliminating a built value picks its method
    and appends one recursive eliminator call per recursive argument."""
    rules = []
    n_params = len(decl.params)
    n_ctors = len(decl.ctors)
    for ci, ctor in enumerate(decl.ctors):
        arg_pats: Tuple[Pattern, ...] = tuple(
            PVar(f"a{j}") for j in range(len(ctor.args))
        )
        pattern: Tuple[Pattern, ...] = (
            PCtor(ctor.name, (PAny(),) * n_params + arg_pats),
            PVar("P"),
        ) + tuple(PVar(f"m{k}") for k in range(n_ctors))

        def build(
            b: Dict[str, object], ctor: Ctor = ctor, ci: int = ci
        ) -> Term:
            methods = tuple(b[f"m{k}"] for k in range(n_ctors))  # type: ignore[misc]
            args = [b[f"a{j}"] for j in range(len(ctor.args))]
            recs = [
                Elim(decl.name, args[p], b["P"], methods)  # type: ignore[arg-type]
                for p in ctor.rec_positions
            ]
            return app(methods[ci], *args, *recs)  # type: ignore[arg-type]

        rules.append(
            ReductionRule(decl.elim_name, pattern, build, f"iota-{decl.name}-{ctor.name}")
        )
    return rules


# --- generic type methods ----------------------------------------------------


def generic_lookup(env: Env, datatype: str, method: str):
    fn = env.methods.get((datatype, method))
    if fn is None:
        raise ElabError(f"no generic method {method!r} for type {datatype!r}")
    return fn


def default_pat_to_ctxt(env: Env, decl: DatatypeDecl):
    """Binder texts and types for a single-level constructor pattern."""

    def pat_to_ctxt(
        pat: SurfaceTerm, scrut_ty: Term
    ) -> List[Tuple[str, Name, Term]]:
        ctor_name, binder_texts, span = split_pattern(pat)
        ctor = next((c for c in decl.ctors if c.name == ctor_name), None)
        if ctor is None:
            raise ElabError(
                f"unknown constructor {ctor_name!r} for type {decl.name}", span
            )
        if len(binder_texts) != len(ctor.args):
            raise ElabError(
                f"pattern for {ctor_name} binds {len(binder_texts)} names, "
                f"constructor takes {len(ctor.args)}",
                span,
            )
        _, targs = unspine(scrut_ty)
        params = targs[: len(decl.params)]
        pm = {n: p for (n, _), p in zip(decl.params, params)}
        out: List[Tuple[str, Name, Term]] = []
        mapping = dict(pm)
        for text, (arg_name, arg_ty) in zip(binder_texts, ctor.args):
            ty = env.normalize(subst_many(arg_ty, mapping))
            name = fresh(text)
            mapping[arg_name] = Var(name)
            out.append((text, name, ty))
        return out

    return pat_to_ctxt


def split_pattern(pat: SurfaceTerm) -> Tuple[str, List[str], Optional[Span]]:
    """A single-level pattern: `C` or `(C x ...)` with distinct binder names."""
    if isinstance(pat, SAtom):
        return pat.text, [], pat.span
    if (
        isinstance(pat, SList)
        and pat.items
        and isinstance(pat.items[0], SAtom)
        and all(isinstance(i, SAtom) for i in pat.items)
    ):
        names = [i.text for i in pat.items[1:]]  # type: ignore[union-attr]
        if len(set(names)) != len(names):
            raise ElabError("duplicate binder in pattern", pat.span)
        return pat.items[0].text, names, pat.span
    raise ElabError("patterns are single-level: C or (C x ...)", pat.span)


# --- the declaration form -----------------------------------------------------


def define_datatype(env: Env, form: SList) -> Tuple[Env, List[str]]:
    env = env.copy()
    items = form.items
    if len(items) < 3 or not isinstance(items[1], SAtom):
        raise ElabError(
            "expected (define-datatype T [A : τ] ... : kind [C ... : τ] ...)",
            form.span,
        )
    t_name = items[1].text
    if env.lookup(t_name) is not None:
        raise ElabError(f"name {t_name!r} is already defined", items[1].span)

    colon = next(
        (i for i in range(2, len(items)) if isinstance(items[i], SAtom) and items[i].text == ":"),
        None,
    )
    if colon is None or colon + 1 >= len(items):
        raise ElabError("missing result sort in datatype declaration", form.span)
    param_forms = items[2:colon]
    kind_s = items[colon + 1]
    ctor_forms = items[colon + 2 :]

    from .check import parse_binder

    ctx_p, params = check_telescope(
        env, EMPTY_CTX, [parse_binder(b) for b in param_forms], Universe()
    )

    kind_core = env.normalize(check(env, ctx_p, kind_s, Universe()))
    indices: List[Tuple[Name, Term]] = []
    walk = kind_core
    while isinstance(walk, Pi):
        indices.append((walk.binder, walk.domain))
        walk = walk.codomain
    if not isinstance(walk, Universe):
        raise ElabError("datatype result sort must end in Type", kind_s.span)

    t_type = env.normalize(_pis(list(params) + indices, Universe()))
    env.add_global(GlobalInfo(t_name, t_type, "type"))

    ctors: List[Ctor] = []
    printed = [f"{t_name} : {print_term(kind_core, reserved=env.globals.keys())}"]
    for cf in ctor_forms:
        ctor, c_type = _elab_ctor(env, ctx_p, t_name, params, len(indices), cf)
        if any(c.name == ctor.name for c in ctors):
            raise ElabError(f"duplicate constructor {ctor.name!r}", cf.span)
        _positivity(env, t_name, ctor, cf.span)
        ctors.append(ctor)
        env.add_global(
            GlobalInfo(
                ctor.name,
                env.normalize(c_type),
                "ctor",
                datatype=t_name,
                ctor_index=len(ctors) - 1,
            )
        )
        printed.append(
            f"{ctor.name} : {print_term(env.normalize(c_type), reserved=env.globals.keys())}"
        )

    decl = DatatypeDecl(t_name, params, tuple(indices), tuple(ctors))
    env.globals[t_name] = GlobalInfo(t_name, t_type, "type", datatype=t_name, decl=decl)
    env.add_global(
        GlobalInfo(
            decl.elim_name,
            env.normalize(eliminator_type(decl)),
            "elim",
            datatype=t_name,
            decl=decl,
        )
    )
    for rule in iota_rules(decl):
        env.register_rule(rule)
    env.register_method(t_name, "getDatatypeDef", lambda decl=decl: decl)
    env.register_method(t_name, "patToCtxt", default_pat_to_ctxt(env, decl))
    return env, printed


def _elab_ctor(
    env: Env,
    ctx_p: Context,
    t_name: str,
    params: Telescope,
    n_indices: int,
    cf: SurfaceTerm,
) -> Tuple[Ctor, Term]:
    from .check import parse_binder

    if not (isinstance(cf, SList) and cf.items and isinstance(cf.items[0], SAtom)):
        raise ElabError("expected a constructor clause [C [x : τ] ... : τ]", cf.span)
    c_name = cf.items[0].text
    if env.lookup(c_name) is not None:
        raise ElabError(f"name {c_name!r} is already defined", cf.span)
    colon = next(
        (
            i
            for i in range(1, len(cf.items))
            if isinstance(cf.items[i], SAtom) and cf.items[i].text == ":"
        ),
        None,
    )
    if colon is None or colon != len(cf.items) - 2:
        raise ElabError(f"constructor {c_name} needs a result type after ':'", cf.span)
    arg_forms = cf.items[1:colon]
    result_s = cf.items[colon + 1]

    ctx_c, args = check_telescope(
        env, ctx_p, [parse_binder(b) for b in arg_forms], Universe()
    )
    result_core = env.normalize(check(env, ctx_c, result_s, Universe()))
    head, rargs = unspine(result_core)
    if not (isinstance(head, Const) and head.name == t_name):
        raise ElabError(
            f"constructor {c_name}'s result must be headed by {t_name}", result_s.span
        )
    n_params = len(params)
    if len(rargs) != n_params + n_indices:
        raise ElabError(
            f"constructor {c_name}'s result applies {t_name} to {len(rargs)} "
            f"arguments, expected {n_params + n_indices}",
            result_s.span,
        )
    for (p_name, _), actual in zip(params, rargs[:n_params]):
        if not alpha_eq(actual, Var(p_name)):
            raise ElabError(
                f"constructor {c_name} must repeat the declared parameters "
                f"verbatim in its result",
                result_s.span,
            )
    result_indices = tuple(rargs[n_params:])

    rec_positions = []
    for pos, (_, arg_ty) in enumerate(args):
        h, _ = unspine(arg_ty)
        if isinstance(h, Const) and h.name == t_name:
            rec_positions.append(pos)

    ctor = Ctor(c_name, args, result_indices, tuple(rec_positions))
    c_type = _pis(list(params) + list(args), result_core)
    return ctor, c_type


def _occurs_const(t: Term, name: str) -> bool:
    if isinstance(t, Const):
        return t.name == name
    if isinstance(t, Pi):
        return _occurs_const(t.domain, name) or _occurs_const(t.codomain, name)
    from .core import App, Lam

    if isinstance(t, Lam):
        return (
            t.annotation is not None
            and _occurs_const(t.annotation, name)
            or _occurs_const(t.body, name)
        )
    if isinstance(t, App):
        return _occurs_const(t.fn, name) or _occurs_const(t.arg, name)
    if isinstance(t, Elim):
        return (
            _occurs_const(t.target, name)
            or _occurs_const(t.motive, name)
            or any(_occurs_const(m, name) for m in t.methods)
        )
    return False


def _strictly_positive(ty: Term, name: str) -> bool:
    """`name` may head the type or the codomain of Pis whose domains avoid it."""
    if not _occurs_const(ty, name):
        return True
    if isinstance(ty, Pi):
        return not _occurs_const(ty.domain, name) and _strictly_positive(
            ty.codomain, name
        )
    head, targs = unspine(ty)
    if isinstance(head, Const) and head.name == name:
        return not any(_occurs_const(a, name) for a in targs)
    return False


def _positivity(env: Env, t_name: str, ctor: Ctor, span: Optional[Span]) -> None:
    if env.positivity == "off":
        return
    for _, arg_ty in ctor.args:
        if not _strictly_positive(arg_ty, t_name):
            msg = (
                f"constructor {ctor.name} uses {t_name} in a non-strictly-"
                f"positive position"
            )
            if env.positivity == "error":
                raise ElabError(msg, span)
            env.warnings.append(msg)


# --- eliminator applications ---------------------------------------------------


def elab_elim_spine(
    env: Env,
    ctx: Context,
    s: SurfaceTerm,
    head: SAtom,
    arg_forms: Tuple[SurfaceTerm, ...],
) -> Tuple[Term, Term]:
    """Elaborate (elim-T target motive method ...), parameters and target
    indices recovered from the target's inferred type."""
    info = env.require(head.text)
    decl: DatatypeDecl = info.decl  # type: ignore[assignment]
    need = 2 + len(decl.ctors)
    if len(arg_forms) < need:
        raise ElabError(
            f"{decl.elim_name} expects a target, a motive, and "
            f"{len(decl.ctors)} method(s)",
            s.span,
        )
    target_s, motive_s = arg_forms[0], arg_forms[1]
    method_ss = arg_forms[2:need]
    extra = arg_forms[need:]

    v, v_ty = infer(env, ctx, target_s)
    v_ty = env.whnf(v_ty)
    t_head, targs = unspine(v_ty)
    if not (isinstance(t_head, Const) and t_head.name == decl.name):
        from .check import _got

        raise ElabError(
            f"target of {decl.elim_name} must be a {decl.name}, "
            f"got {_got(env, ctx, v_ty)}",
            target_s.span,
        )
    params = list(targs[: len(decl.params)])
    idxs = list(targs[len(decl.params) :])

    motive = check(env, ctx, motive_s, motive_type(decl, params))
    methods = [
        check(env, ctx, m_s, method_type(decl, ctor, params, motive))
        for m_s, ctor in zip(method_ss, decl.ctors)
    ]
    core: Term = Elim(decl.name, v, motive, tuple(methods))
    ty = env.normalize(app(motive, *idxs, v))

    for e_s in extra:
        ty_w = env.whnf(ty)
        if not isinstance(ty_w, Pi):
            raise ElabError("applying a non-Π", e_s.span)
        a = check(env, ctx, e_s, ty_w.domain)
        from .core import subst

        core = app(core, a)
        ty = env.normalize(subst(ty_w.codomain, ty_w.binder, a))
    return core, ty
