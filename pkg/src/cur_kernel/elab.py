"""Surface-level elaboration.

Currying sugar, numeral lifting, match-to-eliminator compilation,
recursive definitions with mark-based termination checking, axiom
tracking, and the top-level declaration processor.
"""

from __future__ import annotations

import itertools
import os
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .check import (
    DATUM_HANDLER,
    SPECIAL_FORMS,
    check,
    check_telescope,
    infer,
    parse_binder,
    rec_check_mode,
)
from .core import (
    EMPTY_CTX,
    App,
    Const,
    Context,
    Elim,
    Lam,
    Name,
    Pi,
    Telescope,
    Term,
    Universe,
    Var,
    app,
    free_vars,
    fresh,
    meta_get,
    print_term,
    subst,
    subst_many,
    unspine,
    with_meta,
)
from .datatypes import (
    DatatypeDecl,
    define_datatype,
    generic_lookup,
    split_pattern,
)
from .environment import Env, GlobalInfo
from .errors import ElabError, Span
from .reader import SAtom, SList, SurfaceTerm, parse
from .reduce import PAny, PAs, PCtor, PVar, Pattern, ReductionRule

_LAM_HEADS = {"λ", "lambda"}
_PI_HEADS = {"Π", "Pi", "→", "->", "∀", "forall"}
_FORM_HEADS = {
    "define",
    "define-datatype",
    "define-implicit",
    "define-axiom",
    "define/rec/match",
    "define/rec/match-sz",
    "lift-datatype",
    "print-assumptions",
    "check",
    "import",
    "match",
    "ntac",
}

_gensym = itertools.count()


def _fresh_text() -> str:
    return f"_g{next(_gensym)}"


# --- currying sugar ----------------------------------------------------------


def desugar(s: SurfaceTerm) -> SurfaceTerm:
    """Unroll multi-binder Π/λ and multi-argument applications into
    univariate forms; aliases →/∀ become Π (a fresh binder is minted when
    none is given).  Idempotent, and never shrinks a term."""
    if isinstance(s, SAtom):
        return s
    items = s.items
    if not items:
        return s
    head = items[0]
    if isinstance(head, SAtom):
        t = head.text
        if t in _LAM_HEADS:
            return _desugar_binders(s, "λ", allow_bare_type=False)
        if t in _PI_HEADS:
            return _desugar_binders(s, "Π", allow_bare_type=True)
        if t == "match":
            return _desugar_match(s)
        if t == "ntac":
            return SList((head, desugar(items[1])) + items[2:], s.span)
        if t == "define":
            return _desugar_define(s)
        if t == "define-datatype":
            return _desugar_datatype(s)
        if t in ("define/rec/match", "define/rec/match-sz"):
            return _desugar_recmatch(s)
        if t == "define-axiom" and len(items) == 3:
            return SList((items[0], items[1], desugar(items[2])), s.span)
        if t in ("print-assumptions", "check"):
            return SList((items[0],) + tuple(desugar(i) for i in items[1:]), s.span)
        if t in ("define-implicit", "lift-datatype", "import"):
            return s
    done = tuple(desugar(i) for i in items)
    if len(done) == 1:
        return done[0]
    cur = done[0]
    for a in done[1:]:
        cur = SList((cur, a), s.span)
    return cur


def _binder_like(b: SurfaceTerm) -> bool:
    return (
        isinstance(b, SList)
        and len(b.items) == 3
        and isinstance(b.items[1], SAtom)
        and b.items[1].text == ":"
    )


def _desugar_binders(s: SList, out_head: str, allow_bare_type: bool) -> SurfaceTerm:
    items = s.items
    if len(items) < 2:
        raise ElabError(f"empty {out_head} form", s.span)
    if len(items) == 2:
        return desugar(items[1])
    body = _desugar_binders(SList((items[0],) + items[2:], s.span), out_head, allow_bare_type)
    b = items[1]
    head = SAtom(out_head, s.span)
    if _binder_like(b):
        x, ty = b.items[0], b.items[2]
        binder = SList((x, SAtom(":", b.span), desugar(ty)), b.span)
        return SList((head, binder, body), s.span)
    if isinstance(b, SAtom) and out_head == "λ":
        return SList((head, b, body), s.span)
    if allow_bare_type:
        binder = SList(
            (SAtom(_fresh_text(), b.span), SAtom(":", b.span), desugar(b)), b.span
        )
        return SList((head, binder, body), s.span)
    raise ElabError("expected a binder of shape [x : τ]", b.span)


def _desugar_match(s: SList) -> SurfaceTerm:
    items = list(s.items)
    out = [items[0], desugar(items[1])]
    i = 2
    while i < len(items):
        it = items[i]
        if isinstance(it, SAtom) and it.text in ("#:in", "#:return"):
            if i + 1 >= len(items):
                raise ElabError(f"{it.text} needs an argument", it.span)
            out += [it, desugar(items[i + 1])]
            i += 2
        elif isinstance(it, SAtom) and it.text in ("#:as", "#:with-indx"):
            out.append(it)
            i += 1
            while i < len(items) and isinstance(items[i], SAtom) and not items[i].text.startswith("#:"):
                out.append(items[i])
                i += 1
        else:
            # a case clause [pat body]
            if not (isinstance(it, SList) and len(it.items) == 2):
                raise ElabError("expected a match case [pat body]", getattr(it, "span", s.span))
            out.append(SList((it.items[0], desugar(it.items[1])), it.span))
            i += 1
    return SList(tuple(out), s.span)


def _desugar_define(s: SList) -> SurfaceTerm:
    items = s.items
    if len(items) == 3:
        return SList((items[0], items[1], desugar(items[2])), s.span)
    # (define f [x : τ] ... : τ2 body)
    out = [items[0], items[1]]
    for it in items[2:-1]:
        if _binder_like(it):
            out.append(
                SList((it.items[0], SAtom(":", it.span), desugar(it.items[2])), it.span)
            )
        else:
            out.append(it)  # the ':' separator or τ2
    # τ2 position: the item right after ':'
    for i in range(2, len(out)):
        if isinstance(out[i], SAtom) and out[i].text == ":" and i + 1 < len(out):
            out[i + 1] = desugar(out[i + 1])
    out.append(desugar(items[-1]))
    return SList(tuple(out), s.span)


def _desugar_datatype(s: SList) -> SurfaceTerm:
    items = list(s.items)
    colon = next(
        (
            i
            for i in range(2, len(items))
            if isinstance(items[i], SAtom) and items[i].text == ":"
        ),
        None,
    )
    if colon is None or colon + 1 >= len(items):
        raise ElabError("missing result sort in datatype declaration", s.span)
    out = list(items[: colon + 1])
    for i in range(2, colon):
        it = items[i]
        if _binder_like(it):
            out[i] = SList(
                (it.items[0], SAtom(":", it.span), desugar(it.items[2])), it.span
            )
    out.append(desugar(items[colon + 1]))
    for it in items[colon + 2 :]:
        if not isinstance(it, SList) or not it.items:
            raise ElabError("expected a constructor clause", getattr(it, "span", s.span))
        clause: List[SurfaceTerm] = [it.items[0]]
        for c in it.items[1:]:
            if _binder_like(c):
                clause.append(
                    SList((c.items[0], SAtom(":", c.span), desugar(c.items[2])), c.span)
                )
            elif isinstance(c, SAtom) and c.text == ":":
                clause.append(c)
            else:
                clause.append(desugar(c))
        out.append(SList(tuple(clause), it.span))
    return SList(tuple(out), s.span)


def _desugar_recmatch(s: SList) -> SurfaceTerm:
    out = []
    for it in s.items:
        if _binder_like(it) or (
            isinstance(it, SList)
            and len(it.items) == 5
            and isinstance(it.items[1], SAtom)
            and it.items[1].text == ":"
            and isinstance(it.items[3], SAtom)
            and it.items[3].text == "#:sz"
        ):
            fixed = list(it.items)
            fixed[2] = desugar(fixed[2])
            out.append(SList(tuple(fixed), it.span))
        elif isinstance(it, SList) and any(
            isinstance(x, SAtom) and x.text == "=>" for x in it.items
        ):
            row = list(it.items)
            k = next(i for i, x in enumerate(row) if isinstance(x, SAtom) and x.text == "=>")
            row[k + 1 :] = [desugar(x) for x in row[k + 1 :]]
            out.append(SList(tuple(row), it.span))
        elif isinstance(it, SAtom):
            out.append(it)
        else:
            out.append(desugar(it))
    return SList(tuple(out), s.span)


# --- numeral lifting ----------------------------------------------------------


def lift_literal(n: int, span: Optional[Span] = None) -> SurfaceTerm:
    """0 becomes Z; a positive n becomes n successors around Z."""
    if not isinstance(n, int) or n < 0:
        raise ElabError(f"unsupported literal {n!r}", span)
    sp = span or Span("<lit>", 1, 1, 1)
    out: SurfaceTerm = SAtom("Z", sp)
    for _ in range(n):
        out = SList((SAtom("S", sp), out), sp)
    return out


DATUM_HANDLER.append(lambda env, n, span: lift_literal(n, span))


# --- pattern utilities ---------------------------------------------------------


def _resolve_pattern_head(env: Env, pat: SurfaceTerm) -> SurfaceTerm:
    """Rewrite sized wrappers and implicit abbreviations in pattern heads to
    their underlying constructors (inserting fresh binders for omitted
    non-parameter arguments of an implicit abbreviation)."""
    name, binders, span = split_pattern(pat)
    if name == "_":
        return pat
    info = env.lookup(name)
    if info is None:
        return pat
    if info.role == "sized-ctor":
        new = [SAtom(info.sized_ctor or "", span)] + [SAtom(b, span) for b in binders]
        return SList(tuple(new), span) if binders else new[0]
    if info.role == "implicit":
        target = env.require(info.implicit_target or "")
        if target.role != "ctor":
            raise ElabError(
                f"{name} does not abbreviate a constructor; it cannot appear "
                f"in a pattern",
                span,
            )
        decl: DatatypeDecl = env.require(target.datatype or "").decl  # type: ignore[assignment]
        hidden = max(0, info.implicit_omit - len(decl.params))
        new = (
            [SAtom(target.name, span)]
            + [SAtom(_fresh_text(), span) for _ in range(hidden)]
            + [SAtom(b, span) for b in binders]
        )
        return SList(tuple(new), span)
    return pat


def _pattern_datatype_ctor(env: Env, pat: SurfaceTerm) -> Optional[str]:
    name, _, _ = split_pattern(pat)
    if name == "_":
        return None
    info = env.lookup(name)
    if info is not None and info.role == "ctor":
        return name
    return None


# --- match → eliminator ---------------------------------------------------------


def elab_match(
    env: Env, ctx: Context, s: SList, expected: Optional[Term] = None
) -> Tuple[Term, Term]:
    """Compile (match e #:as x #:with-indx i ... #:in τ #:return τ′ [pat body] ...)
    into the datatype's eliminator."""
    items = list(s.items)
    if len(items) < 2:
        raise ElabError("match needs a target", s.span)
    target_s = items[1]
    as_name: Optional[str] = None
    idx_names: List[str] = []
    in_s: Optional[SurfaceTerm] = None
    ret_s: Optional[SurfaceTerm] = None
    cases: List[SList] = []
    i = 2
    while i < len(items):
        it = items[i]
        if isinstance(it, SAtom) and it.text == "#:as":
            as_name = items[i + 1].text  # type: ignore[union-attr]
            i += 2
        elif isinstance(it, SAtom) and it.text == "#:with-indx":
            i += 1
            while i < len(items) and isinstance(items[i], SAtom) and not items[i].text.startswith("#:"):
                idx_names.append(items[i].text)
                i += 1
        elif isinstance(it, SAtom) and it.text == "#:in":
            in_s = items[i + 1]
            i += 2
        elif isinstance(it, SAtom) and it.text == "#:return":
            ret_s = items[i + 1]
            i += 2
        elif isinstance(it, SList) and len(it.items) == 2:
            cases.append(it)
            i += 1
        else:
            raise ElabError("malformed match form", getattr(it, "span", s.span))
    if ret_s is None:
        raise ElabError("match needs a #:return type", s.span)

    if in_s is not None:
        scrut_ty = env.normalize(check(env, ctx, in_s, Universe()))
        target = check(env, ctx, target_s, scrut_ty)
    else:
        target, scrut_ty = infer(env, ctx, target_s)
    scrut_ty = env.whnf(scrut_ty)
    t_head, targs = unspine(scrut_ty)
    if not (isinstance(t_head, Const) and env.lookup(t_head.name) and env.lookup(t_head.name).role == "type"):
        raise ElabError("match target's type is not a registered datatype", target_s.span)
    decl: DatatypeDecl = generic_lookup(env, t_head.name, "getDatatypeDef")()
    params = list(targs[: len(decl.params)])
    idx_terms = list(targs[len(decl.params) :])

    by_ctor = _complete_cases(env, decl, cases, s.span)

    from .datatypes import _instantiate

    pm = {n: p for (n, _), p in zip(decl.params, params)}
    idx_tele, _ = _instantiate(decl.indices, pm)
    ctxm = ctx
    for k, (n, ty) in enumerate(idx_tele):
        # Name equality is id-based, so re-hinting keeps references intact
        text = idx_names[k] if k < len(idx_names) else n.hint
        n2 = Name(n.id, text)
        idx_tele[k] = (n2, ty)
        ctxm = ctxm.bind(text, n2, env.normalize(ty))
    x_name = fresh(as_name or "t")
    self_ty = env.normalize(app(Const(decl.name), *params, *(Var(n) for n, _ in idx_tele)))
    ctxm = ctxm.bind(as_name or x_name.hint, x_name, self_ty)
    ret_core = check(env, ctxm, ret_s, Universe())
    motive: Term = Lam(x_name, self_ty, ret_core)
    for n, ty in reversed(idx_tele):
        motive = Lam(n, env.normalize(ty), motive)

    methods = []
    for ctor in decl.ctors:
        pat, body_s = by_ctor[ctor.name]
        _, binder_texts, pspan = split_pattern(pat)
        binders = generic_lookup(env, decl.name, "patToCtxt")(pat, scrut_ty)
        ctx_case = ctx
        arg_vars: List[Term] = []
        mapping_c = dict(pm)
        for (text, nm, ty), (decl_name, _) in zip(binders, ctor.args):
            ctx_case = ctx_case.bind(text, nm, env.normalize(ty))
            arg_vars.append(Var(nm))
            mapping_c[decl_name] = Var(nm)
        ihs: List[Tuple[Name, Term]] = []
        for pos in ctor.rec_positions:
            nm, ty = binders[pos][1], binders[pos][2]
            _, rargs = unspine(ty)
            rec_idxs = rargs[len(decl.params) :]
            ihs.append((fresh("ih"), env.normalize(app(motive, *rec_idxs, Var(nm)))))
        built = app(Const(ctor.name), *params, *arg_vars)
        res_idxs = [subst_many(ix, mapping_c) for ix in ctor.result_indices]
        body_expected = env.normalize(app(motive, *res_idxs, built))
        body_core = check(env, ctx_case, body_s, body_expected)
        method = body_core
        for nm, ty in reversed(ihs):
            method = Lam(nm, ty, method)
        for (text, nm, ty) in reversed(binders):
            method = Lam(nm, env.normalize(ty), method)
        methods.append(method)

    core: Term = Elim(decl.name, target, motive, tuple(methods))
    out_ty = env.normalize(app(motive, *idx_terms, target))
    return core, out_ty


def _complete_cases(
    env: Env, decl: DatatypeDecl, cases: Sequence[SList], span: Optional[Span]
) -> Dict[str, Tuple[SurfaceTerm, SurfaceTerm]]:
    """Check coverage, expanding a `_` case to the remaining constructors."""
    by_ctor: Dict[str, Tuple[SurfaceTerm, SurfaceTerm]] = {}
    wildcard: Optional[SList] = None
    for case in cases:
        pat = _resolve_pattern_head(env, case.items[0])
        name, binder_texts, pspan = split_pattern(pat)
        if name == "_":
            if binder_texts:
                raise ElabError("a wildcard pattern binds nothing", pspan)
            if wildcard is not None:
                raise ElabError("duplicate wildcard case", pspan)
            wildcard = case
            continue
        ctor = next((c for c in decl.ctors if c.name == name), None)
        if ctor is None:
            raise ElabError(f"unknown constructor {name!r} in match", pspan)
        if name in by_ctor:
            raise ElabError(f"duplicate case for constructor {name}", pspan)
        if len(binder_texts) != len(ctor.args):
            raise ElabError(
                f"constructor {name} takes {len(ctor.args)} argument(s), "
                f"pattern binds {len(binder_texts)}",
                pspan,
            )
        by_ctor[name] = (pat, case.items[1])
    for ctor in decl.ctors:
        if ctor.name not in by_ctor:
            if wildcard is not None:
                names = [SAtom(_fresh_text(), wildcard.span) for _ in ctor.args]
                pat = (
                    SList(tuple([SAtom(ctor.name, wildcard.span)] + names), wildcard.span)
                    if names
                    else SAtom(ctor.name, wildcard.span)
                )
                by_ctor[ctor.name] = (pat, wildcard.items[1])
            else:
                raise ElabError(f"missing case for constructor {ctor.name}", span)
    return by_ctor


SPECIAL_FORMS["match"] = lambda env, ctx, s, expected: elab_match(env, ctx, s, expected)


# --- recursive definitions -------------------------------------------------------


def _parse_plain_binder(env: Env, b: SurfaceTerm) -> Tuple[str, SurfaceTerm]:
    return parse_binder(b)


def _build_fn_type(
    tele: Sequence[Tuple[Name, Term]], out: Term, mark_first: bool = False
) -> Term:
    from .datatypes import _instantiate

    inst, mapping = _instantiate(tuple(tele), {})
    body = subst_many(out, mapping)
    result = body
    for i, (n, ty) in enumerate(reversed(inst)):
        if mark_first and len(inst) - 1 - i == 0:
            ty = with_meta(ty, "rec-arg", True)
        result = Pi(n, ty, result)
    return result


def def_rec_match(env: Env, form: SList) -> Tuple[Env, List[str]]:
    """(define/rec/match f [x : τ] ... : τ₂ [pat ... => body] ...)

    The first argument is the structural one: its domain is tagged as the
    recursion argument while checking bodies, and pattern binders of
    recursive type are tagged as acceptable call targets, so a recursive
    call on anything not structurally smaller fails with "nonterminate".
    """
    env = env.copy()
    items = list(form.items)
    if len(items) < 3 or not isinstance(items[1], SAtom):
        raise ElabError("expected (define/rec/match f [x : τ] ... : τ₂ rows...)", form.span)
    f_text = items[1].text
    if env.lookup(f_text) is not None:
        raise ElabError(f"name {f_text!r} is already defined", items[1].span)
    colon = next(
        (
            i
            for i in range(2, len(items))
            if isinstance(items[i], SAtom) and items[i].text == ":"
        ),
        None,
    )
    if colon is None or colon + 1 >= len(items):
        raise ElabError("missing return type", form.span)
    binder_forms = items[2:colon]
    ret_s = items[colon + 1]
    rows = items[colon + 2 :]
    if not binder_forms:
        raise ElabError("recursive definitions need at least one argument", form.span)

    ctx_args, tele = check_telescope(
        env, EMPTY_CTX, [parse_binder(b) for b in binder_forms], Universe()
    )
    arg_names = [n for n, _ in tele]
    ret_core = env.normalize(check(env, ctx_args, ret_s, Universe()))
    if free_vars(ret_core) & set(arg_names):
        raise ElabError(
            "dependent return types are not supported in recursive definitions",
            ret_s.span,
        )

    first_head, _ = unspine(tele[0][1])
    if not (
        isinstance(first_head, Const)
        and (info := env.lookup(first_head.name)) is not None
        and info.role == "type"
    ):
        raise ElabError(
            "the first argument of a recursive definition must be a datatype",
            binder_forms[0].span,
        )

    parsed_rows = [_parse_row(r, len(tele)) for r in rows]
    _check_row_coverage(env, tele, parsed_rows, form.span)

    f_local = fresh(f_text)
    f_marked_ty = _build_fn_type(tele, ret_core, mark_first=True)
    rules: List[ReductionRule] = []
    for ri, (pats, body_s) in enumerate(parsed_rows):
        ctx_row = ctx_args
        binds_map: Dict[Name, str] = {}
        rule_pats: List[Pattern] = []
        col_subst: Dict[Name, Term] = {}
        for j, pat in enumerate(pats):
            scrut_ty = env.normalize(subst_many(tele[j][1], col_subst))
            rp, ctx_row, pat_term, keymap = _elab_column(
                env, ctx_row, pat, scrut_ty, j
            )
            rule_pats.append(rp)
            binds_map.update(keymap)
            binds_map[arg_names[j]] = f"c{j}"
            col_subst[arg_names[j]] = pat_term if pat_term is not None else Var(arg_names[j])
        ctx_row = ctx_row.bind(f_text, f_local, f_marked_ty)
        with env.mode(rec_check_mode()):
            body_core = check(env, ctx_row, body_s, ret_core)
        body_core = subst(body_core, f_local, Const(f_text))

        def build(b: Dict[str, object], body=body_core, keymap=dict(binds_map)) -> Term:
            sub = {nm: b[key] for nm, key in keymap.items() if key in b}
            return subst_many(body, sub)  # type: ignore[arg-type]

        rules.append(
            ReductionRule(f_text, tuple(rule_pats), build, f"{f_text}#case{ri}")
        )

    f_type = env.normalize(_build_fn_type(tele, ret_core))
    env.add_global(GlobalInfo(f_text, f_type, "def"))
    for rule in rules:
        env.register_rule(rule)
    return env, [f"{f_text} : {print_term(f_type, reserved=env.globals.keys())}"]


def _parse_row(r: SurfaceTerm, n_cols: int) -> Tuple[List[SurfaceTerm], SurfaceTerm]:
    if not isinstance(r, SList):
        raise ElabError("expected a case row [pat ... => body]", getattr(r, "span", None))
    arrow = next(
        (i for i, x in enumerate(r.items) if isinstance(x, SAtom) and x.text == "=>"),
        None,
    )
    if arrow is None:
        if len(r.items) == 2 and n_cols == 1:
            return [r.items[0]], r.items[1]
        raise ElabError("case rows are written [pat ... => body]", r.span)
    pats = list(r.items[:arrow])
    if len(pats) != n_cols:
        raise ElabError(
            f"row has {len(pats)} pattern(s) for {n_cols} argument(s)", r.span
        )
    if arrow + 2 != len(r.items):
        raise ElabError("a case row has exactly one body", r.span)
    return pats, r.items[arrow + 1]


def _elab_column(
    env: Env, ctx: Context, pat: SurfaceTerm, scrut_ty: Term, col: int
) -> Tuple[Pattern, Context, Optional[Term], Dict[Name, str]]:
    """One column of a row: reduce-pattern, extended context, the pattern
    as a term (for dependent later columns), and binder -> rule-key map."""
    pat = _resolve_pattern_head(env, pat)
    name, binder_texts, pspan = split_pattern(pat)
    whole_key = f"c{col}"
    if name == "_":
        if binder_texts:
            raise ElabError("a wildcard pattern binds nothing", pspan)
        return PAs(whole_key, PAny()), ctx, None, {}
    ctor = _pattern_datatype_ctor(env, pat)
    if ctor is None:
        if binder_texts:
            raise ElabError(f"unknown constructor {name!r} in pattern", pspan)
        # a bare variable: binds the whole argument, not smaller
        nm = fresh(name)
        ctx = ctx.bind(name, nm, scrut_ty)
        return PAs(whole_key, PAny()), ctx, Var(nm), {nm: whole_key}
    t_head, _ = unspine(scrut_ty)
    if not isinstance(t_head, Const):
        raise ElabError("constructor pattern against a non-datatype column", pspan)
    binders = generic_lookup(env, t_head.name, "patToCtxt")(pat, scrut_ty)
    keymap: Dict[Name, str] = {}
    sub_pats: List[Pattern] = []
    pat_args: List[Term] = []
    decl: DatatypeDecl = generic_lookup(env, t_head.name, "getDatatypeDef")()
    for bi, (text, nm, ty) in enumerate(binders):
        ty_n = env.normalize(ty)
        h, _ = unspine(ty_n)
        if isinstance(h, Const) and h.name == t_head.name:
            ty_n = with_meta(ty_n, "rec-ok", True)
        ctx = ctx.bind(text, nm, ty_n)
        keymap[nm] = f"c{col}b{bi}"
        sub_pats.append(PVar(f"c{col}b{bi}"))
        pat_args.append(Var(nm))
    _, targs = unspine(scrut_ty)
    params = targs[: len(decl.params)]
    pat_term = app(Const(ctor), *params, *pat_args)
    inner = PCtor(ctor, (PAny(),) * len(decl.params) + tuple(sub_pats))
    return PAs(whole_key, inner), ctx, pat_term, keymap


def _check_row_coverage(
    env: Env,
    tele: Telescope,
    rows: Sequence[Tuple[List[SurfaceTerm], SurfaceTerm]],
    span: Optional[Span],
) -> None:
    """Every combination of first-level constructors must match some row."""
    col_ctors: List[List[str]] = []
    for _, ty in tele:
        h, _ = unspine(ty)
        if isinstance(h, Const) and (info := env.lookup(h.name)) and info.role == "type" and info.decl:
            col_ctors.append([c.name for c in info.decl.ctors])  # type: ignore[union-attr]
        else:
            col_ctors.append([])

    row_pats: List[List[Optional[str]]] = []
    for pats, _ in rows:
        cols: List[Optional[str]] = []
        for j, pat in enumerate(pats):
            pat = _resolve_pattern_head(env, pat)
            name, binder_texts, pspan = split_pattern(pat)
            if name == "_" or (not binder_texts and _pattern_datatype_ctor(env, pat) is None):
                cols.append(None)  # matches anything
            else:
                c = _pattern_datatype_ctor(env, pat)
                if c is None:
                    raise ElabError(f"unknown constructor {name!r} in pattern", pspan)
                if c not in col_ctors[j]:
                    raise ElabError(
                        f"constructor {c} does not belong to this column's type", pspan
                    )
                cols.append(c)
        row_pats.append(cols)

    spaces = [cs if cs else [None] for cs in col_ctors]
    total = 1
    for sp in spaces:
        total *= max(1, len(sp))
    if total > 20000:
        raise ElabError("pattern coverage space too large", span)
    for combo in itertools.product(*spaces):
        covered = any(
            all(p is None or p == c for p, c in zip(row, combo)) for row in row_pats
        )
        if not covered:
            missing = " ".join(str(c) for c in combo if c is not None) or "_"
            raise ElabError(f"missing case for constructor {missing}", span)


# --- axioms ---------------------------------------------------------------------


def define_axiom(env: Env, form: SList) -> Tuple[Env, List[str]]:
    items = form.items
    if len(items) != 3 or not isinstance(items[1], SAtom):
        raise ElabError("expected (define-axiom name τ)", form.span)
    name = items[1].text
    env = env.copy()
    if env.lookup(name) is not None:
        raise ElabError(f"name {name!r} is already defined", items[1].span)
    ty = env.normalize(check(env, EMPTY_CTX, items[2], Universe()))
    env.add_global(GlobalInfo(name, ty, "axiom"))
    return env, [f"{name} : {print_term(ty, reserved=env.globals.keys())}"]


def find_axioms(env: Env, term: Term) -> List[Tuple[str, Term]]:
    """Distinct axioms used by a fully elaborated term, in first-use order."""
    out: List[Tuple[str, Term]] = []
    seen: Set[str] = set()

    def go(t: Term) -> None:
        tag = meta_get(t, "axiom")
        if isinstance(tag, str) and tag not in seen:
            seen.add(tag)
            out.append((tag, env.require(tag).type_))
        if isinstance(t, Pi):
            go(t.domain)
            go(t.codomain)
        elif isinstance(t, Lam):
            if t.annotation is not None:
                go(t.annotation)
            go(t.body)
        elif isinstance(t, App):
            go(t.fn)
            go(t.arg)
        elif isinstance(t, Elim):
            go(t.target)
            go(t.motive)
            for m in t.methods:
                go(m)

    go(term)
    return out


def print_assumptions(env: Env, term: Term) -> str:
    found = find_axioms(env, term)
    if not found:
        return "Axioms used: (none)"
    rendered = ", ".join(
        f"{name} : {print_term(ty, reserved=env.globals.keys())}" for name, ty in found
    )
    return f"Axioms used: {rendered}"


# --- top-level processing ---------------------------------------------------------


def process_toplevel(
    env: Env,
    form: SurfaceTerm,
    base_dir: Optional[str] = None,
    _importing: Optional[Set[str]] = None,
) -> Tuple[Env, List[str]]:
    """Elaborate one top-level form, returning the extended environment and
    any lines to print.  The input environment is never modified."""
    form = desugar(form)
    if isinstance(form, SList) and form.items and isinstance(form.items[0], SAtom):
        head = form.items[0].text
        if head == "define-datatype":
            return define_datatype(env, form)
        if head == "define":
            return _process_define(env, form)
        if head == "define/rec/match":
            return def_rec_match(env, form)
        if head == "define/rec/match-sz":
            from .sized import def_rec_match_sized

            return def_rec_match_sized(env, form)
        if head == "lift-datatype":
            from .sized import lift_datatype

            return lift_datatype(env, form)
        if head == "define-implicit":
            from .unify import define_implicit

            return define_implicit(env, form)
        if head == "define-axiom":
            return define_axiom(env, form)
        if head == "print-assumptions":
            if len(form.items) != 2:
                raise ElabError("expected (print-assumptions e)", form.span)
            core, _ = infer(env, EMPTY_CTX, form.items[1])
            return env, [print_assumptions(env, core)]
        if head == "check":
            if len(form.items) != 3:
                raise ElabError("expected (check e τ)", form.span)
            ty = env.normalize(check(env, EMPTY_CTX, form.items[2], Universe()))
            check(env, EMPTY_CTX, form.items[1], ty)
            return env, []
        if head == "import":
            return _process_import(env, form, base_dir, _importing)
    core, ty = infer(env, EMPTY_CTX, form)
    printed = print_term(env.normalize(core), reserved=env.globals.keys())
    ty_printed = print_term(ty, reserved=env.globals.keys())
    return env, [f"{printed} : {ty_printed}"]


def _process_define(env: Env, form: SList) -> Tuple[Env, List[str]]:
    items = form.items
    if len(items) < 3 or not isinstance(items[1], SAtom):
        raise ElabError("expected (define name e)", form.span)
    if len(items) > 3:
        # (define f [x : τ] ... : τ₂ body): a recursive definition whose
        # rows are all-variable patterns reusing the argument names
        colon = next(
            (
                i
                for i in range(2, len(items))
                if isinstance(items[i], SAtom) and items[i].text == ":"
            ),
            None,
        )
        if colon is None or colon + 3 != len(items):
            raise ElabError("expected (define f [x : τ] ... : τ₂ body)", form.span)
        binders = items[2:colon]
        pats = tuple(SAtom(parse_binder(b)[0], b.span) for b in binders)
        row = SList(pats + (SAtom("=>", form.span), items[colon + 2]), form.span)
        rec = SList(
            (SAtom("define/rec/match", form.span), items[1])
            + tuple(binders)
            + (items[colon], items[colon + 1], row),
            form.span,
        )
        return def_rec_match(env, rec)
    name = items[1].text
    env = env.copy()
    if env.lookup(name) is not None:
        raise ElabError(f"name {name!r} is already defined", items[1].span)
    core, ty = infer(env, EMPTY_CTX, items[2])
    env.add_global(GlobalInfo(name, ty, "def", value=core))
    env.register_rule(ReductionRule(name, (), lambda b, core=core: core, f"delta-{name}"))
    return env, [f"{name} : {print_term(ty, reserved=env.globals.keys())}"]


def _process_import(
    env: Env,
    form: SList,
    base_dir: Optional[str],
    _importing: Optional[Set[str]],
) -> Tuple[Env, List[str]]:
    if len(form.items) != 2 or not isinstance(form.items[1], SAtom):
        raise ElabError("expected (import <path>)", form.span)
    rel = form.items[1].text
    path = os.path.normpath(os.path.join(base_dir or ".", rel))
    importing = _importing or set()
    if path in importing:
        raise ElabError(f"import cycle through {path}", form.span)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ElabError(f"cannot import {rel}: {e}", form.span) from None
    lines: List[str] = []
    for sub in parse(text, path):
        env, out = process_toplevel(
            env, sub, os.path.dirname(path), importing | {path}
        )
        lines.extend(out)
    return env, lines


def process_program(
    env: Env, text: str, file: str = "<input>", base_dir: Optional[str] = None
) -> Tuple[Env, List[str]]:
    lines: List[str] = []
    for form in parse(text, file):
        env, out = process_toplevel(env, form, base_dir)
        lines.extend(out)
    return env, lines
