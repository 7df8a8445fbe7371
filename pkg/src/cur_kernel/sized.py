"""Sized-types termination analysis, running in parallel to the checker.

Sizes are metadata on types: a size variable, a strictly-smaller wrapper
around another size, or infinity (the size of anything unlifted).
Lifting a datatype mints sized constructor wrappers whose result size
increments the decreasing argument's size, and a pattern-context
override that hands pattern binders decremented sizes.  The sized
recursive-definition form then conjoins baseline equality with the size
order for the duration of body checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .check import EqMode, check, check_telescope, infer, parse_binder
from .core import (
    EMPTY_CTX,
    Const,
    Context,
    Name,
    Pi,
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
from .datatypes import DatatypeDecl, generic_lookup, split_pattern
from .environment import Env, GlobalInfo
from .errors import ElabError, SizeError, Span
from .reader import SAtom, SList, SurfaceTerm
from .reduce import ReductionRule


class _Inf:
    def __repr__(self) -> str:
        return "INF"


INF = _Inf()


@dataclass(frozen=True)
class SVar:
    name: Name

    def __repr__(self) -> str:
        return self.name.hint or f"sz{self.name.id}"


@dataclass(frozen=True)
class Lt:
    inner: "Size"

    def __repr__(self) -> str:
        return f"(< {self.inner!r})"


Size = Union[SVar, Lt, _Inf]


def sz_ok(s1: Size, s2: Size) -> bool:
    """True when s1 <= s2 in the size order; INF absorbs on the right."""
    if s2 is INF:
        return True
    if isinstance(s1, SVar) and isinstance(s2, SVar):
        return s1.name == s2.name
    if isinstance(s1, Lt):
        if sz_ok(s1.inner, s2):
            return True
        if isinstance(s2, Lt) and sz_ok(s1.inner, s2.inner):
            return True
    return False


def get_sz(ty: Term) -> Size:
    got = meta_get(ty, "size")
    return got if got is not None else INF  # type: ignore[return-value]


def add_sz(ty: Term, sz: Size) -> Term:
    return with_meta(ty, "size", sz)


def inc_sz(sz: Size) -> Size:
    """Strip one strictly-smaller wrapper, or mint a fresh size variable."""
    if isinstance(sz, Lt):
        return sz.inner
    return SVar(fresh("sz"))


def dec_sz(sz: Size) -> Size:
    return Lt(sz)


def subst_size(sz: Size, var: Name, value: Size) -> Size:
    if isinstance(sz, SVar):
        return value if sz.name == var else sz
    if isinstance(sz, Lt):
        return Lt(subst_size(sz.inner, var, value))
    return sz


def sized_check_mode() -> EqMode:
    def extension(actual: Term, expected: Term) -> bool:
        a, e = get_sz(actual), get_sz(expected)
        if not sz_ok(a, e):
            raise SizeError(f"size {a!r} is not <= size {e!r}")
        return True

    return EqMode("sized-check", extension)


def sized_view(datatype: str) -> str:
    return f"{datatype}-sized-view"


# --- lifting a datatype --------------------------------------------------------


def lift_datatype(env: Env, form: SList) -> Tuple[Env, List[str]]:
    """(lift-datatype T): sized wrappers C_sz for each constructor, plus a
    pattern-context override giving recursive pattern binders sizes
    strictly below the scrutinee's."""
    if len(form.items) != 2 or not isinstance(form.items[1], SAtom):
        raise ElabError("expected (lift-datatype T)", form.span)
    t_name = form.items[1].text
    env = env.copy()
    info = env.lookup(t_name)
    if info is None or info.role != "type" or info.decl is None:
        raise ElabError(f"{t_name!r} is not a registered datatype", form.span)
    decl: DatatypeDecl = info.decl  # type: ignore[assignment]

    lines = []
    for ctor in decl.ctors:
        wrapper = f"{ctor.name}_sz"
        if env.lookup(wrapper) is not None:
            raise ElabError(f"name {wrapper!r} is already defined", form.span)
        cinfo = env.require(ctor.name)
        env.add_global(
            GlobalInfo(
                wrapper,
                cinfo.type_,
                "sized-ctor",
                datatype=t_name,
                sized_ctor=ctor.name,
            )
        )
        lines.append(f"{wrapper} : sized view of {ctor.name}")

    base = generic_lookup(env, t_name, "patToCtxt")

    def pat_to_ctxt_sized(pat: SurfaceTerm, scrut_ty: Term):
        name, binder_texts, pspan = split_pattern(pat)
        winfo = env.lookup(name)
        if winfo is not None and winfo.role == "sized-ctor":
            under = SAtom(winfo.sized_ctor or "", pspan)
            pat = (
                SList((under,) + tuple(SAtom(b, pspan) for b in binder_texts), pspan)
                if binder_texts
                else under
            )
        binders = base(pat, scrut_ty)
        scrut_sz = get_sz(scrut_ty)
        out = []
        for text, nm, ty in binders:
            h, _ = unspine(ty)
            if isinstance(h, Const) and h.name == t_name:
                ty = add_sz(ty, dec_sz(scrut_sz))
            out.append((text, nm, ty))
        return out

    env.register_method(sized_view(t_name), "patToCtxt", pat_to_ctxt_sized)
    return env, lines


def elab_sized_ctor(
    env: Env,
    ctx: Context,
    info: GlobalInfo,
    arg_forms: List[SurfaceTerm],
    span: Optional[Span],
) -> Tuple[Term, Term]:
    """A sized constructor elaborates as the underlying constructor; its
    result type carries the incremented size of the decreasing argument
    (the last recursive one), or a fresh size variable if there is none."""
    under = env.require(info.sized_ctor or "")
    decl: DatatypeDecl = env.require(under.datatype or "").decl  # type: ignore[assignment]
    ctor = next(c for c in decl.ctors if c.name == under.name)
    n_params = len(decl.params)

    walk = under.type_
    cores: List[Term] = []
    arg_types: List[Term] = []
    for i, a_s in enumerate(arg_forms):
        if not isinstance(walk, Pi):
            raise ElabError(f"{info.name} applied to too many arguments", span)
        core, a_ty = infer(env, ctx, a_s)
        from .check import _ensure

        _ensure(env, ctx, a_ty, walk.domain, getattr(a_s, "span", span))
        cores.append(core)
        arg_types.append(a_ty)
        walk = subst(walk.codomain, walk.binder, core)
    if isinstance(walk, Pi):
        raise ElabError(
            f"{info.name} must be fully applied ({under.name} takes more arguments)",
            span,
        )
    rec_slots = [n_params + p for p in ctor.rec_positions]
    if rec_slots and rec_slots[-1] < len(arg_types):
        sz = inc_sz(get_sz(arg_types[rec_slots[-1]]))
    else:
        sz = SVar(fresh("sz"))
    term = app(Const(under.name), *cores)
    return term, add_sz(env.normalize(walk), sz)


# --- sized recursive definitions -------------------------------------------------


@dataclass(frozen=True)
class SizedSig:
    """How applications of a size-checked function propagate sizes: the
    declared input size variable is instantiated with the actual first
    argument's size inside the declared output size."""

    in_var: Name
    out_size: Size


def _parse_sized_binder(b: SurfaceTerm) -> Tuple[str, SurfaceTerm, Optional[str]]:
    if (
        isinstance(b, SList)
        and len(b.items) == 5
        and isinstance(b.items[0], SAtom)
        and isinstance(b.items[1], SAtom)
        and b.items[1].text == ":"
        and isinstance(b.items[3], SAtom)
        and b.items[3].text == "#:sz"
        and isinstance(b.items[4], SAtom)
    ):
        return b.items[0].text, b.items[2], b.items[4].text
    text, ty = parse_binder(b)
    return text, ty, None


def def_rec_match_sized(env: Env, form: SList) -> Tuple[Env, List[str]]:
    """(define/rec/match-sz f [x : τ #:sz i] ... : τ′ #:sz j rows...)

    Bodies are checked with the first argument at size i, pattern binders
    below i, and f itself requiring an argument below i and producing a
    result below j; every equality during that checking also requires the
    actual side's size to be <= the expected side's.
    """
    env = env.copy()
    items = list(form.items)
    if len(items) < 3 or not isinstance(items[1], SAtom):
        raise ElabError(
            "expected (define/rec/match-sz f [x : τ #:sz i] ... : τ′ #:sz j rows...)",
            form.span,
        )
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
    rest = items[colon + 2 :]
    out_sz_text: Optional[str] = None
    if rest and isinstance(rest[0], SAtom) and rest[0].text == "#:sz":
        if len(rest) < 2 or not isinstance(rest[1], SAtom):
            raise ElabError("#:sz needs a size variable", form.span)
        out_sz_text = rest[1].text
        rest = rest[2:]
    rows = rest

    parsed_binders = [_parse_sized_binder(b) for b in binder_forms]
    if not parsed_binders or parsed_binders[0][2] is None:
        raise ElabError(
            "the first argument needs a size annotation [x : τ #:sz i]", form.span
        )
    if any(sz is not None for _, _, sz in parsed_binders[1:]):
        raise ElabError("only the first argument may carry a size", form.span)

    in_sz_text = parsed_binders[0][2]
    size_vars: Dict[str, Name] = {in_sz_text: fresh(in_sz_text)}
    i_var = SVar(size_vars[in_sz_text])
    j_var: Size = INF
    if out_sz_text is not None:
        if out_sz_text not in size_vars:
            size_vars[out_sz_text] = fresh(out_sz_text)
        j_var = SVar(size_vars[out_sz_text])

    ctx_args, tele = check_telescope(
        env, EMPTY_CTX, [(t, ty) for t, ty, _ in parsed_binders], Universe()
    )
    arg_names = [n for n, _ in tele]
    ret_core = env.normalize(check(env, ctx_args, ret_s, Universe()))
    if free_vars(ret_core) & set(arg_names):
        raise ElabError(
            "dependent return types are not supported in recursive definitions",
            ret_s.span,
        )

    first_ty = tele[0][1]
    t_head, _ = unspine(first_ty)
    if not (
        isinstance(t_head, Const)
        and (tinfo := env.lookup(t_head.name)) is not None
        and tinfo.role == "type"
    ):
        raise ElabError(
            "the first argument of a sized recursive definition must be a datatype",
            binder_forms[0].span,
        )
    if (sized_view(t_head.name), "patToCtxt") not in env.methods:
        raise ElabError(
            f"datatype {t_head.name} has no sized view; lift it first "
            f"with (lift-datatype {t_head.name})",
            form.span,
        )

    # context for bodies: x at size i, f needing something below i
    sized_first = add_sz(first_ty, i_var)
    ctx_sized = EMPTY_CTX
    for (text, _, _), (n, ty) in zip(parsed_binders, tele):
        ctx_sized = ctx_sized.bind(text, n, sized_first if n == arg_names[0] else ty)

    from .datatypes import _instantiate
    from .elab import _check_row_coverage, _parse_row

    inst, mapping = _instantiate(tele, {})
    f_dom = add_sz(subst_many(first_ty, {}), dec_sz(i_var))
    f_out = subst_many(ret_core, mapping)
    f_body_ty: Term = add_sz(f_out, dec_sz(j_var)) if j_var is not INF else f_out
    for k, (n, ty) in enumerate(reversed(inst)):
        if len(inst) - 1 - k == 0:
            ty = f_dom
        f_body_ty = Pi(n, ty, f_body_ty)
    f_local = fresh(f_text)

    parsed_rows = [_parse_row(r, len(tele)) for r in rows]
    _check_row_coverage(env, tele, parsed_rows, form.span)

    rules: List[ReductionRule] = []
    expected_body = add_sz(ret_core, j_var) if j_var is not INF else ret_core
    for ri, (pats, body_s) in enumerate(parsed_rows):
        ctx_row = ctx_sized
        binds_map: Dict[Name, str] = {}
        rule_pats = []
        col_subst: Dict[Name, Term] = {}
        for j, pat in enumerate(pats):
            base_ty = env.normalize(subst_many(tele[j][1], col_subst))
            scrut_ty = add_sz(base_ty, i_var) if j == 0 else base_ty
            rp, ctx_row, pat_term, keymap = _elab_sized_column(
                env, ctx_row, pat, scrut_ty, j, t_head.name if j == 0 else None
            )
            rule_pats.append(rp)
            binds_map.update(keymap)
            binds_map[arg_names[j]] = f"c{j}"
            col_subst[arg_names[j]] = pat_term if pat_term is not None else Var(arg_names[j])
        ctx_row = ctx_row.bind(f_text, f_local, f_body_ty)
        with env.mode(sized_check_mode()):
            body_core = check(env, ctx_row, body_s, expected_body)
        body_core = subst(body_core, f_local, Const(f_text))

        def build(b: Dict[str, object], body=body_core, keymap=dict(binds_map)) -> Term:
            sub = {nm: b[key] for nm, key in keymap.items() if key in b}
            return subst_many(body, sub)  # type: ignore[arg-type]

        rules.append(ReductionRule(f_text, tuple(rule_pats), build, f"{f_text}#case{ri}"))

    from .elab import _build_fn_type

    f_type = env.normalize(_build_fn_type(tele, ret_core))
    sig = None
    if j_var is not INF:
        sig = SizedSig(size_vars[in_sz_text], j_var)
        f_type = with_meta(f_type, "sized-sig", sig)
    env.add_global(GlobalInfo(f_text, f_type, "def", sized_sig=sig))
    for rule in rules:
        env.register_rule(rule)
    return env, [f"{f_text} : {print_term(f_type, reserved=env.globals.keys())}"]


def _elab_sized_column(
    env: Env,
    ctx: Context,
    pat: SurfaceTerm,
    scrut_ty: Term,
    col: int,
    sized_datatype: Optional[str],
) -> Tuple[object, Context, Optional[Term], Dict[Name, str]]:
    """Like the plain column elaboration, but constructor patterns on the
    sized column resolve their binder types through the sized view."""
    from .elab import _elab_column, _resolve_pattern_head

    name, binder_texts, pspan = split_pattern(pat)
    winfo = env.lookup(name) if name != "_" else None
    if sized_datatype is not None and winfo is not None and winfo.role in ("sized-ctor", "ctor"):
        binders = generic_lookup(env, sized_view(sized_datatype), "patToCtxt")(
            pat, scrut_ty
        )
        resolved = _resolve_pattern_head(env, pat)
        ctor_name, _, _ = split_pattern(resolved)
        decl: DatatypeDecl = generic_lookup(env, sized_datatype, "getDatatypeDef")()
        keymap: Dict[Name, str] = {}
        sub_pats = []
        pat_args: List[Term] = []
        from .reduce import PAny, PAs, PCtor, PVar

        for bi, (text, nm, ty) in enumerate(binders):
            ctx = ctx.bind(text, nm, env.normalize(ty))
            keymap[nm] = f"c{col}b{bi}"
            sub_pats.append(PVar(f"c{col}b{bi}"))
            pat_args.append(Var(nm))
        _, targs = unspine(scrut_ty)
        params = targs[: len(decl.params)]
        pat_term = app(Const(ctor_name), *params, *pat_args)
        inner = PCtor(ctor_name, (PAny(),) * len(decl.params) + tuple(sub_pats))
        return PAs(f"c{col}", inner), ctx, pat_term, keymap
    return _elab_column(env, ctx, pat, scrut_ty, col)
