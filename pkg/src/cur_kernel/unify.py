"""First-order unification with a binder case, driving implicit arguments.

The solver processes constraints in order through eight cases: empty,
swap, already-solved conflict, eliminate (with occurs check), delete on
definitional equality, decompose same-head applications, the binder
case, and failure.  Only designated solvable variables are eliminable;
everything else is rigid.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .check import DEFAULT_MODE, check, def_eq, infer
from .core import (
    Const,
    Context,
    Elim,
    Lam,
    Name,
    Pi,
    Term,
    Var,
    app,
    free_vars,
    print_term,
    rename,
    subst,
    subst_many,
    unspine,
)
from .environment import Env, GlobalInfo
from .errors import ElabError, Span, UnifyError
from .reader import SAtom, SList, SurfaceTerm

Constraint = Tuple[Term, Term]
MetaSubst = Dict[Name, Term]


def _apply(sigma: MetaSubst, t: Term) -> Term:
    return subst_many(t, sigma) if sigma else t


def _is_solvable(t: Term, solvables: Set[Name]) -> bool:
    return isinstance(t, Var) and t.name in solvables


def unify(
    env: Env,
    constraints: Sequence[Constraint],
    solvables: Iterable[Name],
    seed: Optional[MetaSubst] = None,
) -> MetaSubst:
    """Solve the constraints, returning an idempotent substitution whose
    domain is drawn from `solvables`."""
    solv = set(solvables)
    sigma: MetaSubst = dict(seed or {})
    work: List[Constraint] = [( _apply(sigma, l), _apply(sigma, r)) for l, r in constraints]

    while work:  # (1) base case: empty -> sigma
        left, right = work.pop(0)

        if not _is_solvable(left, solv) and _is_solvable(right, solv):
            work.insert(0, (right, left))  # (2) swap solvable to the left
            continue

        if _is_solvable(left, solv):
            x = left.name  # type: ignore[union-attr]
            if x in sigma:  # (3) conflict: re-unify against the stored solution
                work.insert(0, (sigma[x], right))
                continue
            rhs = _apply(sigma, right)
            if x not in free_vars(rhs):  # (4) eliminate
                sigma = {y: subst(t, x, rhs) for y, t in sigma.items()}
                sigma[x] = rhs
                work = [(subst(l, x, rhs), subst(r, x, rhs)) for l, r in work]
                continue
            # occurs-check failure falls through toward (8)

        if def_eq(env, left, right, DEFAULT_MODE):  # (5) delete
            continue

        lh, largs = unspine(left)
        rh, rargs = unspine(right)
        if (  # (6) decompose constant applications
            isinstance(lh, Const)
            and isinstance(rh, Const)
            and lh.name == rh.name
            and len(largs) == len(rargs)
            and largs
        ):
            work[:0] = list(zip(largs, rargs))
            continue
        if (
            isinstance(left, Elim)
            and isinstance(right, Elim)
            and left.datatype == right.datatype
            and len(left.methods) == len(right.methods)
        ):
            work[:0] = [(left.target, right.target), (left.motive, right.motive)] + list(
                zip(left.methods, right.methods)
            )
            continue

        if isinstance(left, Lam) and isinstance(right, Lam):  # (7) binder case
            pairs: List[Constraint] = []
            if left.annotation is not None and right.annotation is not None:
                pairs.append((left.annotation, right.annotation))
            pairs.append((left.body, rename(right.body, right.binder, left.binder)))
            work[:0] = pairs
            continue
        if isinstance(left, Pi) and isinstance(right, Pi):
            work[:0] = [
                (left.domain, right.domain),
                (left.codomain, rename(right.codomain, right.binder, left.binder)),
            ]
            continue

        raise UnifyError(  # (8) no case applies
            f"could not unify {print_term(left)} and {print_term(right)}"
        )
    return sigma


# --- implicit arguments -------------------------------------------------------


def _peel_pis(ty: Term, count: int) -> Tuple[List[Tuple[Name, Term]], Term]:
    binders: List[Tuple[Name, Term]] = []
    walk = ty
    for _ in range(count):
        if not isinstance(walk, Pi):
            break
        binders.append((walk.binder, walk.domain))
        walk = walk.codomain
    return binders, walk


def define_implicit(env: Env, form: SList) -> Tuple[Env, List[str]]:
    """(define-implicit f′ = f #:omit n): f′ behaves like f with its first
    n arguments inferred by unification."""
    items = form.items
    if (
        len(items) != 6
        or not isinstance(items[1], SAtom)
        or not (isinstance(items[2], SAtom) and items[2].text == "=")
        or not isinstance(items[3], SAtom)
        or not (isinstance(items[4], SAtom) and items[4].text == "#:omit")
        or not isinstance(items[5], SAtom)
    ):
        raise ElabError("expected (define-implicit f′ = f #:omit n)", form.span)
    abbrev, target = items[1].text, items[3].text
    try:
        omit = int(items[5].text)
    except ValueError:
        raise ElabError("#:omit takes an integer", items[5].span) from None
    if omit < 0:
        raise ElabError("#:omit takes a nonnegative integer", items[5].span)
    env = env.copy()
    tinfo = env.require(target)
    binders, _ = _peel_pis(tinfo.type_, omit)
    if len(binders) < omit:
        raise ElabError(
            f"{target} has fewer than {omit} leading Π binders", form.span
        )
    env.add_global(
        GlobalInfo(
            abbrev,
            tinfo.type_,
            "implicit",
            datatype=tinfo.datatype,
            implicit_target=target,
            implicit_omit=omit,
        )
    )
    return env, [f"{abbrev} = {target} omitting {omit} argument(s)"]


def elab_implicit_app(
    env: Env,
    ctx: Context,
    info: GlobalInfo,
    arg_forms: List[SurfaceTerm],
    expected: Optional[Term],
    span: Optional[Span],
) -> Tuple[Term, Term]:
    """Elaborate an application of an implicit abbreviation.

    Constraints pair the expected type of the whole term with the
    declared output, and each explicit argument's type with its declared
    type; the omitted leading binders are the solvable variables.  The
    expected-type constraint is solved first so its solution can flow
    into the remaining argument positions as checking types.
    """
    target = env.require(info.implicit_target or "")
    n = info.implicit_omit
    binders, _ = _peel_pis(target.type_, n + len(arg_forms))
    if len(binders) < n + len(arg_forms):
        raise ElabError(
            f"{info.name} applied to too many arguments", span
        )
    implicits = binders[:n]
    explicits = binders[n:]
    _, out_decl = _peel_pis(target.type_, n + len(arg_forms))

    solvables = {b for b, _ in implicits}
    sigma: Dict[Name, Term] = {}
    if expected is not None:
        sigma = unify(env, [(expected, out_decl)], solvables, sigma)

    cores: List[Term] = []
    inst: Dict[Name, Term] = {}
    for j, arg in enumerate(arg_forms):
        b_name, b_ty = explicits[j]
        declared = _apply(sigma, subst_many(b_ty, inst))
        if free_vars(declared) & solvables:
            core, a_ty = infer(env, ctx, arg)
            sigma = unify(env, [(a_ty, declared)], solvables, sigma)
        else:
            core = check(env, ctx, arg, declared)
        cores.append(core)
        inst[b_name] = core

    unsolved = [b.hint for b, _ in implicits if b not in sigma]
    if unsolved:
        raise ElabError(
            "cannot infer implicit argument(s): " + ", ".join(unsolved), span
        )
    imp_terms = [sigma[b] for b, _ in implicits]
    term = app(Const(target.name), *imp_terms, *cores)
    out = env.normalize(_apply(sigma, subst_many(out_decl, inst)))
    return term, out
