"""Tactic engine: hole-embedded proof trees, a zipper over subgoals,
built-in tactics and tacticals, and proof-term extraction.

A tactic is a host-level function from zipper to zipper registered in
TACTICS; failing tactics raise, and the caller keeps the old zipper, so
every tactic is transactional.  `try` additionally swallows the failure
and hands back the original proof state unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .check import check, def_eq
from .core import (
    EMPTY_CTX,
    App,
    Const,
    Context,
    Elim,
    Hole,
    Lam,
    Name,
    Pi,
    Term,
    Universe,
    Var,
    alpha_eq,
    app,
    free_vars,
    fresh,
    fresh_hole,
    print_term,
    subst,
    subst_many,
    unspine,
)
from .datatypes import DatatypeDecl, method_type, motive_type
from .elab import desugar
from .environment import Env
from .errors import CurError, TacticError
from .reader import SAtom, SList, SurfaceTerm, parse_one


@dataclass(frozen=True)
class Goal:
    ctx: Context
    type_: Term  # kept normalized


@dataclass(frozen=True)
class OpenHole:
    goal: Goal


@dataclass(frozen=True)
class ExactNode:
    goal: Goal
    term: Term


@dataclass(frozen=True)
class Branch:
    """A partially built node: `partial` mentions each child's hole id
    exactly once; children own the subgoals for those holes."""

    goal: Goal
    partial: Term
    children: Tuple[Tuple[int, "ProofTree"], ...]

    def __post_init__(self) -> None:
        found = sorted(_hole_ids(self.partial))
        declared = sorted(h for h, _ in self.children)
        if found != declared:
            raise ValueError(
                f"partial term holes {found} do not match children {declared}"
            )


ProofTree = Union[OpenHole, ExactNode, Branch]


def _hole_ids(t: Term) -> List[int]:
    out: List[int] = []

    def go(u: Term) -> None:
        if isinstance(u, Hole):
            out.append(u.id)
        elif isinstance(u, Pi):
            go(u.domain)
            go(u.codomain)
        elif isinstance(u, Lam):
            if u.annotation is not None:
                go(u.annotation)
            go(u.body)
        elif isinstance(u, App):
            go(u.fn)
            go(u.arg)
        elif isinstance(u, Elim):
            go(u.target)
            go(u.motive)
            for m in u.methods:
                go(m)

    go(t)
    return out


def _fill_holes(t: Term, mapping: Dict[int, Term]) -> Term:
    """Plug hole ids with terms.  Deliberately *not* capture-avoiding: a
    child proof references binders introduced by the partial term."""
    if isinstance(t, Hole):
        return mapping.get(t.id, t)
    if isinstance(t, Pi):
        return replace(
            t, domain=_fill_holes(t.domain, mapping), codomain=_fill_holes(t.codomain, mapping)
        )
    if isinstance(t, Lam):
        ann = _fill_holes(t.annotation, mapping) if t.annotation is not None else None
        return replace(t, annotation=ann, body=_fill_holes(t.body, mapping))
    if isinstance(t, App):
        return replace(t, fn=_fill_holes(t.fn, mapping), arg=_fill_holes(t.arg, mapping))
    if isinstance(t, Elim):
        return replace(
            t,
            target=_fill_holes(t.target, mapping),
            motive=_fill_holes(t.motive, mapping),
            methods=tuple(_fill_holes(m, mapping) for m in t.methods),
        )
    return t


# --- zipper -------------------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    goal: Goal
    partial: Term
    before: Tuple[Tuple[int, ProofTree], ...]
    hole_id: int
    after: Tuple[Tuple[int, ProofTree], ...]


@dataclass(frozen=True)
class Zipper:
    focus: ProofTree
    path: Tuple[Frame, ...] = ()
    steps: int = 0


def rebuild(z: Zipper) -> ProofTree:
    tree = z.focus
    for frame in reversed(z.path):
        tree = Branch(
            frame.goal, frame.partial, frame.before + ((frame.hole_id, tree),) + frame.after
        )
    return tree


def open_goals(tree: ProofTree) -> List[Goal]:
    if isinstance(tree, OpenHole):
        return [tree.goal]
    if isinstance(tree, Branch):
        out: List[Goal] = []
        for _, child in tree.children:
            out.extend(open_goals(child))
        return out
    return []


def _path_to_first_open(tree: ProofTree) -> Optional[List[Frame]]:
    if isinstance(tree, OpenHole):
        return []
    if isinstance(tree, Branch):
        for i, (hid, child) in enumerate(tree.children):
            sub = _path_to_first_open(child)
            if sub is not None:
                frame = Frame(
                    tree.goal,
                    tree.partial,
                    tree.children[:i],
                    hid,
                    tree.children[i + 1 :],
                )
                return [frame] + sub
        return None
    return None


def refocus(z: Zipper) -> Zipper:
    """Focus the leftmost open goal (depth-first), or the root when done."""
    tree = rebuild(z)
    frames = _path_to_first_open(tree)
    if frames is None:
        return Zipper(tree, (), z.steps)
    focus: ProofTree = tree
    for frame in frames:
        assert isinstance(focus, Branch)
        focus = dict(focus.children)[frame.hole_id]
    return Zipper(focus, tuple(frames), z.steps)


# --- driver -------------------------------------------------------------------

Tactic = Callable[[Env, Zipper, Tuple[SurfaceTerm, ...]], Zipper]
TACTICS: Dict[str, Tactic] = {}

_ALIASES = {
    "by-intro": "intro",
    "by-intros": "intros",
    "by-assumption": "assumption",
    "by-exact": "exact",
}


def start_proof(
    env: Env, goal: Union[str, SurfaceTerm], ctx: Context = EMPTY_CTX
) -> Zipper:
    if isinstance(goal, str):
        goal = parse_one(goal)
    goal = desugar(goal)
    core = check(env, ctx, goal, Universe())
    return Zipper(OpenHole(Goal(ctx, env.normalize(core))), (), 0)


def _invocation(form: SurfaceTerm) -> Tuple[str, Tuple[SurfaceTerm, ...]]:
    if isinstance(form, SAtom):
        return form.text, ()
    if isinstance(form, SList) and form.items and isinstance(form.items[0], SAtom):
        return form.items[0].text, tuple(form.items[1:])
    raise TacticError("malformed tactic invocation", getattr(form, "span", None))


def run_tactic(env: Env, z: Zipper, form: SurfaceTerm) -> Zipper:
    """Apply one tactic without step accounting (tactical-internal use)."""
    name, args = _invocation(form)
    name = _ALIASES.get(name, name)
    fn = TACTICS.get(name)
    if fn is None:
        raise TacticError(f"unknown tactic {name!r}", getattr(form, "span", None))
    z2 = fn(env, z, args)
    if z2 is z:
        return z
    return refocus(z2)


def apply_tactic(env: Env, z: Zipper, form: Union[str, SurfaceTerm]) -> Zipper:
    """Apply one tactic; on success the focus advances to the next open
    goal and the step counter increments.  Errors leave `z` untouched."""
    if isinstance(form, str):
        form = parse_one(form)
    z2 = run_tactic(env, z, form)
    if z2 is z:
        return z
    return replace(z2, steps=z.steps + 1)


def _focused_goal(z: Zipper) -> Goal:
    if not isinstance(z.focus, OpenHole):
        raise TacticError("no open goal is focused")
    return z.focus.goal


# --- built-in tactics ------------------------------------------------------------


def _intro_once(env: Env, z: Zipper, name_text: Optional[str]) -> Zipper:
    goal = _focused_goal(z)
    w = env.whnf(goal.type_)
    if not isinstance(w, Pi):
        raise TacticError("goal is not a Π")
    text = name_text or w.binder.hint
    nm = fresh(text)
    dom = env.normalize(w.domain)
    child = Goal(
        goal.ctx.bind(text, nm, dom),
        env.normalize(subst(w.codomain, w.binder, Var(nm))),
    )
    h = fresh_hole()
    branch = Branch(goal, Lam(nm, dom, h), ((h.id, OpenHole(child)),))
    return replace(z, focus=branch)


def t_intro(env: Env, z: Zipper, args: Tuple[SurfaceTerm, ...]) -> Zipper:
    if len(args) > 1:
        raise TacticError("intro takes at most one name")
    name = args[0].text if args and isinstance(args[0], SAtom) else None
    return _intro_once(env, z, name)


def t_intros(env: Env, z: Zipper, args: Tuple[SurfaceTerm, ...]) -> Zipper:
    if args:
        for a in args:
            if not isinstance(a, SAtom):
                raise TacticError("intros takes names")
            z = refocus(_intro_once(env, z, a.text))
        return z
    introduced = 0
    while isinstance(env.whnf(_goal_or_none(z) or Universe()), Pi):
        z = refocus(_intro_once(env, z, None))
        introduced += 1
    if introduced == 0:
        raise TacticError("goal is not a Π")
    return z


def _goal_or_none(z: Zipper) -> Optional[Term]:
    return z.focus.goal.type_ if isinstance(z.focus, OpenHole) else None


def t_assumption(env: Env, z: Zipper, args: Tuple[SurfaceTerm, ...]) -> Zipper:
    goal = _focused_goal(z)
    for entry in reversed(goal.ctx.entries):
        if def_eq(env, entry.type_, goal.type_):
            return replace(z, focus=ExactNode(goal, Var(entry.name)))
    raise TacticError("no assumption matches the goal")


def t_exact(env: Env, z: Zipper, args: Tuple[SurfaceTerm, ...]) -> Zipper:
    if len(args) != 1:
        raise TacticError("exact takes one term")
    goal = _focused_goal(z)
    core = check(env, goal.ctx, desugar(args[0]), goal.type_)
    return replace(z, focus=ExactNode(goal, core))


def t_try(env: Env, z: Zipper, args: Tuple[SurfaceTerm, ...]) -> Zipper:
    try:
        z2 = z
        for form in args:
            z2 = run_tactic(env, z2, form)
        return z2
    except CurError:
        return z


def t_seq(env: Env, z: Zipper, args: Tuple[SurfaceTerm, ...]) -> Zipper:
    for form in args:
        z = run_tactic(env, z, form)
    return z


def _datatype_of(env: Env, ctx: Context, name: Name) -> Tuple[DatatypeDecl, List[Term], List[Term], Term]:
    ty = env.whnf(ctx.type_of(name))
    head, targs = unspine(ty)
    if not isinstance(head, Const):
        raise TacticError("hypothesis is not of datatype type")
    info = env.lookup(head.name)
    if info is None or info.role != "type" or info.decl is None:
        raise TacticError("hypothesis is not of datatype type")
    decl: DatatypeDecl = info.decl  # type: ignore[assignment]
    params = list(targs[: len(decl.params)])
    idxs = list(targs[len(decl.params) :])
    return decl, params, idxs, ty


def _recheck_core(env: Env, ctx: Context, core: Term, expected: Term) -> None:
    """Validate a constructed core term by printing and re-checking it."""
    scope = {e.name: e.text for e in ctx.entries}
    text = print_term(core, scope=dict(scope), reserved=env.globals.keys())
    check(env, ctx, desugar(parse_one(text)), expected)


def t_induction(env: Env, z: Zipper, args: Tuple[SurfaceTerm, ...]) -> Zipper:
    if not args or not isinstance(args[0], SAtom):
        raise TacticError("induction takes a hypothesis name")
    goal = _focused_goal(z)
    h_text = args[0].text
    nm = goal.ctx.resolve(h_text)
    if nm is None:
        raise TacticError(f"no hypothesis {h_text!r}")
    if args[1:] and isinstance(args[1], SList) and any(
        isinstance(i, SAtom) and i.text == "#:subgoal-is" for i in args[1].items
    ):
        return _induction_declarative(env, z, nm, args[1:])
    case_names = _parse_as_names(args[1:])
    decl, params, idxs, _ = _datatype_of(env, goal.ctx, nm)

    from .datatypes import _instantiate

    pm = {n: p for (n, _), p in zip(decl.params, params)}
    idx_tele, _ = _instantiate(decl.indices, pm)
    g = goal.type_
    for (iname, _), idx_term in zip(idx_tele, idxs):
        if isinstance(idx_term, Var):
            g = subst(g, idx_term.name, Var(iname))
    h_self = fresh(h_text)
    self_ty = app(Const(decl.name), *params, *(Var(n) for n, _ in idx_tele))
    g = subst(g, nm, Var(h_self))
    motive: Term = Lam(h_self, self_ty, g)
    for n, ty in reversed(idx_tele):
        motive = Lam(n, ty, motive)
    try:
        _recheck_core(env, goal.ctx, motive, motive_type(decl, params))
    except CurError as e:
        raise TacticError(f"cannot build motive: {e.message}") from None

    children: List[Tuple[int, ProofTree]] = []
    holes: List[Term] = []
    for ci, ctor in enumerate(decl.ctors):
        sub_ty = env.normalize(method_type(decl, ctor, params, motive))
        if ci < len(case_names):
            sub_ty = _rehint_pis(sub_ty, case_names[ci])
        h = fresh_hole()
        holes.append(h)
        children.append((h.id, OpenHole(Goal(goal.ctx, sub_ty))))
    partial = Elim(decl.name, Var(nm), motive, tuple(holes))
    return replace(z, focus=Branch(goal, partial, tuple(children)))


def _induction_declarative(
    env: Env, z: Zipper, nm: Name, groups: Sequence[SurfaceTerm]
) -> Zipper:
    """(induction H [(C x ...) #:subgoal-is subg tactic ...] ...)

    Case groups name their constructor, state the expected subgoal
    (checked against the generated one), and carry the tactics for that
    case.  Groups may appear in any order; they run in declaration order.
    """
    goal = _focused_goal(z)
    decl, _, _, _ = _datatype_of(env, goal.ctx, nm)
    parsed: Dict[str, Tuple[List[str], SurfaceTerm, Tuple[SurfaceTerm, ...]]] = {}
    for g in groups:
        if not isinstance(g, SList) or len(g.items) < 3:
            raise TacticError("expected [(C x ...) #:subgoal-is subg tactic ...]")
        pat = g.items[0]
        if isinstance(pat, SAtom):
            ctor, binders = pat.text, []
        elif isinstance(pat, SList) and all(isinstance(i, SAtom) for i in pat.items):
            ctor = pat.items[0].text  # type: ignore[union-attr]
            binders = [i.text for i in pat.items[1:]]  # type: ignore[union-attr]
        else:
            raise TacticError("malformed constructor pattern in induction case")
        kw = g.items[1]
        if not (isinstance(kw, SAtom) and kw.text == "#:subgoal-is"):
            raise TacticError("induction cases state #:subgoal-is")
        if ctor in parsed:
            raise TacticError(f"duplicate induction case for {ctor}")
        parsed[ctor] = (binders, g.items[2], tuple(g.items[3:]))
    unknown = set(parsed) - {c.name for c in decl.ctors}
    if unknown:
        raise TacticError(f"unknown constructor(s) in induction: {sorted(unknown)}")
    missing = [c.name for c in decl.ctors if c.name not in parsed]
    if missing:
        raise TacticError(f"missing induction case(s): {missing}")

    z = refocus(t_induction(env, z, (SAtom(_text_of(goal.ctx, nm), None),)))
    from .elab import desugar as _desugar

    for ctor in decl.ctors:
        _binders, subg_s, tactics = parsed[ctor.name]
        sub = _focused_goal(z)
        stated = env.normalize(
            check(env, goal.ctx, _desugar(subg_s), Universe())
        )
        if not def_eq(env, stated, sub.type_):
            raise TacticError(
                f"stated subgoal for {ctor.name} does not match the generated one"
            )
        for t in tactics:
            z = run_tactic(env, z, t)
    return z


def _text_of(ctx: Context, nm: Name) -> str:
    entry = ctx.lookup(nm)
    return entry.text if entry is not None else nm.hint


def _parse_as_names(rest: Sequence[SurfaceTerm]) -> List[List[str]]:
    if not rest:
        return []
    if not (
        len(rest) == 2
        and isinstance(rest[0], SAtom)
        and rest[0].text == "#:as"
        and isinstance(rest[1], SList)
    ):
        raise TacticError("induction options are #:as ((names ...) ...)")
    out = []
    for group in rest[1].items:
        if isinstance(group, SList) and all(isinstance(i, SAtom) for i in group.items):
            out.append([i.text for i in group.items])  # type: ignore[union-attr]
        else:
            raise TacticError("#:as takes one name group per constructor")
    return out


def _rehint_pis(ty: Term, names: List[str]) -> Term:
    if not names or not isinstance(ty, Pi):
        return ty
    nm = Name(ty.binder.id, names[0])
    return Pi(nm, ty.domain, _rehint_pis(ty.codomain, names[1:]))


# --- inversion --------------------------------------------------------------------


class _Conflict(Exception):
    def __init__(self, proj, component_ty: Term, left: Term, right: Term):
        self.proj = proj
        self.component_ty = component_ty
        self.left = left
        self.right = right


def _lam_of_pi(ty: Term, body_fn: Callable[[List[Var]], Term]) -> Term:
    """A lambda chain matching a Pi chain's binders, body built from them."""
    binders: List[Tuple[Name, Term]] = []
    walk = ty
    while isinstance(walk, Pi):
        binders.append((walk.binder, walk.domain))
        walk = walk.codomain
    body = body_fn([Var(n) for n, _ in binders])
    for n, dom in reversed(binders):
        body = Lam(n, dom, body)
    return body


def _projection(
    env: Env, decl: DatatypeDecl, params: List[Term], ctor_name: str, argpos: int, default: Term
) -> Callable[[Term], Term]:
    """Extract a constructor argument, with a default for other heads."""
    if decl.indices:
        raise TacticError("cannot invert: components of an indexed family")
    ctor = next(c for c in decl.ctors if c.name == ctor_name)
    pm = {n: p for (n, _), p in zip(decl.params, params)}
    arg_ty = subst_many(ctor.args[argpos][1], pm)
    if free_vars(arg_ty) & {n for n, _ in ctor.args}:
        raise TacticError("cannot invert: dependent constructor argument")
    self_ty = app(Const(decl.name), *params)
    d = fresh("d")
    motive = Lam(d, self_ty, arg_ty)

    def proj(value: Term) -> Term:
        methods = []
        for c2 in decl.ctors:
            mt = method_type(decl, c2, params, motive)

            def body(vars_: List[Var], c2=c2) -> Term:
                if c2.name == ctor_name:
                    return vars_[argpos]
                return default

            methods.append(_lam_of_pi(mt, body))
        return Elim(decl.name, value, motive, tuple(methods))

    return proj


def _component_walk(
    env: Env,
    ty: Term,
    left: Term,
    right: Term,
    proj: Callable[[Term], Term],
) -> List[Tuple[Term, Term, Term, Callable[[Term], Term]]]:
    """Compare two index instantiations; equal parts vanish, same-headed
    constructors recurse into their arguments, a head clash aborts with a
    conflict, and any other disagreement becomes a derived equality."""
    l_n = env.normalize(left)
    r_n = env.normalize(right)
    if alpha_eq(l_n, r_n):
        return []
    lh, largs = unspine(l_n)
    rh, rargs = unspine(r_n)
    l_ctor = (
        env.lookup(lh.name) if isinstance(lh, Const) else None
    )
    r_ctor = (
        env.lookup(rh.name) if isinstance(rh, Const) else None
    )
    if (
        l_ctor is not None
        and r_ctor is not None
        and l_ctor.role == "ctor"
        and r_ctor.role == "ctor"
        and l_ctor.datatype == r_ctor.datatype
    ):
        if lh.name != rh.name:  # type: ignore[union-attr]
            raise _Conflict(proj, ty, l_n, r_n)
        dinfo = env.require(l_ctor.datatype or "")
        decl: DatatypeDecl = dinfo.decl  # type: ignore[assignment]
        n_params = len(decl.params)
        params = list(largs[:n_params])
        out = []
        ctor = next(c for c in decl.ctors if c.name == lh.name)  # type: ignore[union-attr]
        pm = {n: p for (n, _), p in zip(decl.params, params)}
        for j in range(len(ctor.args)):
            la, ra = largs[n_params + j], rargs[n_params + j]
            if alpha_eq(env.normalize(la), env.normalize(ra)):
                continue
            sub_proj_one = _projection(env, decl, params, ctor.name, j, la)
            sub_ty = env.normalize(subst_many(ctor.args[j][1], pm))
            out.extend(
                _component_walk(
                    env, sub_ty, la, ra, lambda b, p=proj, q=sub_proj_one: q(p(b))
                )
            )
        return out
    return [(ty, l_n, r_n, proj)]


def t_inversion(env: Env, z: Zipper, args: Tuple[SurfaceTerm, ...]) -> Zipper:
    if not args or not isinstance(args[0], SAtom):
        raise TacticError("inversion takes a hypothesis name")
    goal = _focused_goal(z)
    h_text = args[0].text
    nm = goal.ctx.resolve(h_text)
    if nm is None:
        raise TacticError(f"no hypothesis {h_text!r}")
    with_names = _parse_with_names(args[1:])
    decl, params, idxs, h_ty = _datatype_of(env, goal.ctx, nm)

    if not decl.ctors:  # an impossible hypothesis closes the goal outright
        motive = _constant_motive(env, decl, params, goal.type_)
        term = Elim(decl.name, Var(nm), motive, ())
        return replace(z, focus=ExactNode(goal, term))

    if decl.name != "=":
        raise TacticError(
            "cannot invert: only equality and empty hypotheses are supported"
        )
    eq_a, eq_lhs = params
    eq_rhs = idxs[0]
    try:
        equalities = _component_walk(env, eq_a, eq_lhs, eq_rhs, lambda b: b)
    except _Conflict as c:
        pf_false = _discriminate(env, goal.ctx, nm, params, c)
        motive = Lam(fresh("contra"), Const("False"), goal.type_)
        term = Elim("False", pf_false, motive, ())
        return replace(z, focus=ExactNode(goal, term))

    ctx2 = goal.ctx
    lam_chain: List[Tuple[Name, Term]] = []
    proofs: List[Term] = []
    for k, (comp_ty, l_c, r_c, proj) in enumerate(equalities):
        eq_ty = env.normalize(app(Const("="), comp_ty, l_c, r_c))
        text = with_names[k] if k < len(with_names) else f"H{k}"
        hn = fresh(text)
        ctx2 = ctx2.bind(text, hn, eq_ty)
        lam_chain.append((hn, eq_ty))
        proofs.append(_injectivity_proof(env, nm, params, idxs, comp_ty, l_c, proj))
    h = fresh_hole()
    body: Term = h
    for hn, eq_ty in reversed(lam_chain):
        body = Lam(hn, eq_ty, body)
    partial = app(body, *proofs)
    child = OpenHole(Goal(ctx2, goal.type_))
    return replace(z, focus=Branch(goal, partial, ((h.id, child),)))


def _parse_with_names(rest: Sequence[SurfaceTerm]) -> List[str]:
    if not rest:
        return []
    if not (isinstance(rest[0], SAtom) and rest[0].text == "#:with-names"):
        raise TacticError("inversion options are #:with-names H0 ...")
    names = []
    for a in rest[1:]:
        if not isinstance(a, SAtom):
            raise TacticError("#:with-names takes names")
        names.append(a.text)
    return names


def _constant_motive(env: Env, decl: DatatypeDecl, params: List[Term], result: Term) -> Term:
    from .datatypes import _instantiate

    pm = {n: p for (n, _), p in zip(decl.params, params)}
    idx_tele, _ = _instantiate(decl.indices, pm)
    self_ty = app(Const(decl.name), *params, *(Var(n) for n, _ in idx_tele))
    motive: Term = Lam(fresh("t"), self_ty, result)
    for n, ty in reversed(idx_tele):
        motive = Lam(n, ty, motive)
    return motive


def _eq_motive(env: Env, params: List[Term], body_fn: Callable[[Term], Term]) -> Term:
    """λ (b : A) (e : (= A lhs b)) . body(b) — the equality eliminator's motive."""
    eq_a, eq_lhs = params
    b = fresh("b")
    e = fresh("e")
    eq_ty = app(Const("="), eq_a, eq_lhs, Var(b))
    return Lam(b, eq_a, Lam(e, eq_ty, body_fn(Var(b))))


def _inhabited_anchor() -> Tuple[Term, Term]:
    """A closed inhabited type and its inhabitant: the polymorphic identity."""
    x_ty = fresh("X")
    x = fresh("x")
    anchor_ty = Pi(x_ty, Universe(), Pi(x, Var(x_ty), Var(x_ty)))
    x_ty2 = fresh("X")
    x2 = fresh("x")
    anchor = Lam(x_ty2, Universe(), Lam(x2, Var(x_ty2), Var(x2)))
    return anchor_ty, anchor


def _discriminate(
    env: Env, ctx: Context, h_name: Name, params: List[Term], c: _Conflict
) -> Term:
    """From H : (= A lhs rhs) whose sides disagree at constructor heads,
    produce a term of type False by transporting an inhabitant of a
    constructor-discriminating type family along H."""
    lh, _ = unspine(c.left)
    l_info = env.require(lh.name)  # type: ignore[union-attr]
    dinfo = env.require(l_info.datatype or "")
    decl: DatatypeDecl = dinfo.decl  # type: ignore[assignment]
    if decl.indices:
        raise TacticError("cannot invert: conflict inside an indexed family")
    _, comp_args = unspine(env.normalize(c.component_ty))
    d_params = list(comp_args[: len(decl.params)])
    anchor_ty, anchor = _inhabited_anchor()
    d = fresh("d")
    self_ty = app(Const(decl.name), *d_params)
    discr_motive = Lam(d, self_ty, Universe())

    def discr(value: Term) -> Term:
        methods = []
        for c2 in decl.ctors:
            mt = method_type(decl, c2, d_params, discr_motive)
            picked = anchor_ty if c2.name == lh.name else Const("False")  # type: ignore[union-attr]
            methods.append(_lam_of_pi(mt, lambda vs, picked=picked: picked))
        return Elim(decl.name, value, discr_motive, tuple(methods))

    # transporting the anchor inhabitant along H lands in the False branch
    motive = _eq_motive(env, params, lambda b: discr(c.proj(b)))
    return Elim("=", Var(h_name), motive, (anchor,))


def _injectivity_proof(
    env: Env,
    h_name: Name,
    params: List[Term],
    idxs: List[Term],
    comp_ty: Term,
    l_component: Term,
    proj: Callable[[Term], Term],
) -> Term:
    """From H : (= A lhs rhs), a proof of (= τ lhs_k rhs_k) for one
    projected component: transport reflexivity along H under a motive
    that projects the component out of the right-hand side."""
    motive = _eq_motive(
        env, params, lambda b: app(Const("="), comp_ty, l_component, proj(b))
    )
    method = app(Const("refl"), comp_ty, l_component)
    return Elim("=", Var(h_name), motive, (method,))


TACTICS.update(
    {
        "intro": t_intro,
        "intros": t_intros,
        "assumption": t_assumption,
        "exact": t_exact,
        "try": t_try,
        "seq": t_seq,
        "induction": t_induction,
        "inversion": t_inversion,
    }
)


# --- extraction and rendering -------------------------------------------------------


def extract_proof(tree: ProofTree) -> Term:
    remaining = open_goals(tree)
    if remaining:
        n = len(remaining)
        raise TacticError(f"{n} open goal" + ("s" if n != 1 else ""))

    def go(t: ProofTree) -> Term:
        if isinstance(t, ExactNode):
            return t.term
        assert isinstance(t, Branch)
        return _fill_holes(t.partial, {hid: go(child) for hid, child in t.children})

    return go(tree)


@dataclass(frozen=True)
class StateRecord:
    goals_total: int
    focused_index: int  # 1-based; 0 when complete
    hypotheses: Tuple[Tuple[str, str], ...]
    goal: str
    steps: int
    complete: bool

    def to_json(self) -> dict:
        return {
            "goals_total": self.goals_total,
            "focused_index": self.focused_index,
            "hypotheses": [{"name": n, "type": t} for n, t in self.hypotheses],
            "goal": self.goal,
            "steps": self.steps,
            "complete": self.complete,
        }

    def lines(self) -> List[str]:
        if self.complete:
            return [f"Proof complete ({self.steps} steps)"]
        if not self.hypotheses:
            return [f"goal {self.focused_index} of {self.goals_total}: {self.goal}"]
        hyp = "  ".join(f"{n} : {t}" for n, t in self.hypotheses)
        return [
            f"ctx:  {hyp}  (step #{self.steps})",
            "---------------",
            f"curr goal: {self.goal}",
        ]

    def text(self) -> str:
        return "\n".join(self.lines())


def render_state(env: Env, z: Zipper) -> StateRecord:
    tree = rebuild(z)
    opens = open_goals(tree)
    total = len(opens)
    if total == 0:
        return StateRecord(0, 0, (), "", z.steps, True)
    if isinstance(z.focus, OpenHole):
        focused = z.focus.goal
    else:
        focused = opens[0]
    index = 1
    for g in opens:
        if g is focused:
            break
        index += 1
    scope: Dict[Name, str] = {}
    taken = set(env.globals.keys())
    hyps: List[Tuple[str, str]] = []
    for entry in focused.ctx.entries:
        ty_str = print_term(entry.type_, scope=dict(scope), reserved=taken)
        shown = entry.text
        k = 1
        while shown in (h for h, _ in hyps):
            shown = f"{entry.text}{k}"
            k += 1
        scope[entry.name] = shown
        hyps.append((shown, ty_str))
    goal_str = print_term(
        focused.type_, scope=dict(scope), reserved=taken, style="display"
    )
    return StateRecord(total, index, tuple(hyps), goal_str, z.steps, False)


# --- the (ntac goal tactic ...) expression form ---------------------------------------


def ntac_form(env: Env, ctx: Context, s: SList, expected) -> Tuple[Term, Term]:
    if len(s.items) < 2:
        raise TacticError("ntac needs a goal", s.span)
    z = start_proof(env, s.items[1], ctx)
    goal_ty = z.focus.goal.type_  # type: ignore[union-attr]
    for form in s.items[2:]:
        z = apply_tactic(env, z, form)
    term = extract_proof(rebuild(z))
    _recheck_core(env, ctx, term, goal_ty)
    return term, goal_ty


from .check import SPECIAL_FORMS  # placed late to avoid import-time cycles

SPECIAL_FORMS["ntac"] = ntac_form
