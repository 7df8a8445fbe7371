"""Extensible normalization: a registry of rewrite rules keyed by head.

Rules fire at head position; `whnf` rewrites the head to a fixpoint and
`normalize` additionally recurses into subterms, rescanning until no
rule applies anywhere.  Rules never need to know about each other: a
neutral term left by one rule is re-examined whenever normalization runs
again, so a redex exposed later (for example by substitution) still
fires.  An optional audit trace records every step as
(step index, rule label, path to the redex) and can be replayed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Tuple, Union

from .core import App, Const, Elim, Hole, Lam, Pi, Term, Var, app, unspine
from .errors import DivergenceError, RegistrationError

APP_HEAD = "#%app"  # distinguished head for rules over raw applications


# --- redex patterns ---------------------------------------------------------


@dataclass(frozen=True)
class PVar:
    """Match anything, binding it."""

    name: str


@dataclass(frozen=True)
class PAny:
    """Match anything, binding nothing."""


@dataclass(frozen=True)
class PCtor:
    """Match a constant applied to exactly len(args) arguments."""

    ctor: str
    args: Tuple["Pattern", ...] = ()


@dataclass(frozen=True)
class PLam:
    """Match a lambda, binding its binder Name and body."""

    binder: str
    body: str


@dataclass(frozen=True)
class PAs:
    """Bind the whole matched term while also matching inner structure."""

    name: str
    inner: "Pattern"


Pattern = Union[PVar, PAny, PCtor, PLam, PAs]


@dataclass(frozen=True)
class ReductionRule:
    head: str  # constant name, eliminator name (elim-T), or APP_HEAD
    pattern: Tuple[Pattern, ...]
    build: Callable[[Dict[str, object]], Term]
    label: str


class RuleRegistry:
    """Immutable map head -> rules, tried in registration order."""

    def __init__(self, rules: Optional[Dict[str, Tuple[ReductionRule, ...]]] = None):
        self._rules: Dict[str, Tuple[ReductionRule, ...]] = dict(rules or {})

    def register(self, rule: ReductionRule) -> "RuleRegistry":
        existing = self._rules.get(rule.head, ())
        for r in existing:
            if r.pattern == rule.pattern:
                raise RegistrationError(
                    f"duplicate reduction rule for head {rule.head!r}"
                )
        updated = dict(self._rules)
        updated[rule.head] = existing + (rule,)
        return RuleRegistry(updated)

    def rules_for(self, head: str) -> Tuple[ReductionRule, ...]:
        return self._rules.get(head, ())

    def by_label(self, label: str) -> ReductionRule:
        for rules in self._rules.values():
            for r in rules:
                if r.label == label:
                    return r
        raise KeyError(label)

    def heads(self) -> Tuple[str, ...]:
        return tuple(self._rules)


def register_rule(reg: RuleRegistry, rule: ReductionRule) -> RuleRegistry:
    return reg.register(rule)


def beta_rule() -> ReductionRule:
    from .core import subst

    def build(b: Dict[str, object]) -> Term:
        return subst(b["body"], b["x"], b["e"])  # type: ignore[arg-type]

    return ReductionRule(APP_HEAD, (PLam("x", "body"), PVar("e")), build, "beta")


# --- evaluation -------------------------------------------------------------


DEFAULT_FUEL = 100_000

Path = Tuple[object, ...]


class _Fuel:
    __slots__ = ("left", "last")

    def __init__(self, amount: int):
        self.left = amount
        self.last = "<none>"

    def spend(self, label: str) -> None:
        self.last = label
        self.left -= 1
        if self.left < 0:
            raise DivergenceError(
                label, f"step budget exhausted; last rule applied: {label}"
            )


class _Audit:
    __slots__ = ("steps",)

    def __init__(self) -> None:
        self.steps: List[Tuple[int, str, Path]] = []

    def record(self, label: str, path: Path) -> None:
        self.steps.append((len(self.steps), label, path))


def _match(
    pat: Pattern, term: Term, reg: RuleRegistry, fuel: _Fuel, binds: Dict[str, object]
) -> bool:
    if isinstance(pat, PVar):
        binds[pat.name] = term
        return True
    if isinstance(pat, PAny):
        return True
    if isinstance(pat, PAs):
        w = _whnf(term, reg, fuel)
        if _match(pat.inner, w, reg, fuel, binds):
            binds[pat.name] = w
            return True
        return False
    if isinstance(pat, PLam):
        w = _whnf(term, reg, fuel)
        if isinstance(w, Lam):
            binds[pat.binder] = w.binder
            binds[pat.body] = w.body
            return True
        return False
    if isinstance(pat, PCtor):
        w = _whnf(term, reg, fuel)
        head, args = unspine(w)
        if not (isinstance(head, Const) and head.name == pat.ctor):
            return False
        if len(args) != len(pat.args):
            return False
        return all(_match(p, a, reg, fuel, binds) for p, a in zip(pat.args, args))
    raise TypeError(f"unknown pattern {pat!r}")


def _try_rules(
    head_name: str, args: Tuple[Term, ...], reg: RuleRegistry, fuel: _Fuel
) -> Optional[Tuple[Term, int, str]]:
    """First matching rule for head_name: (contractum, args consumed, label)."""
    for rule in reg.rules_for(head_name):
        k = len(rule.pattern)
        if k > len(args):
            continue
        binds: Dict[str, object] = {}
        if all(_match(p, a, reg, fuel, binds) for p, a in zip(rule.pattern, args[:k])):
            fuel.spend(rule.label)
            return rule.build(binds), k, rule.label
    return None


def _whnf(
    t: Term,
    reg: RuleRegistry,
    fuel: _Fuel,
    audit: Optional[_Audit] = None,
    path: Path = (),
) -> Term:
    while True:
        if isinstance(t, App):
            head, args = unspine(t)
            hw = _whnf(head, reg, fuel, audit, path + ("fn",) * len(args))
            if isinstance(hw, Lam) and args:
                fired = _try_rules(APP_HEAD, (hw, args[0]), reg, fuel)
                if fired is not None:
                    contractum, _, label = fired
                    if audit is not None:
                        audit.record(label, path + ("fn",) * (len(args) - 1))
                    t = app(contractum, *args[1:])
                    continue
            if isinstance(hw, Const):
                fired = _try_rules(hw.name, args, reg, fuel)
                if fired is not None:
                    contractum, k, label = fired
                    if audit is not None:
                        audit.record(label, path + ("fn",) * (len(args) - k))
                    t = app(contractum, *args[k:])
                    continue
            if hw is head:
                return t
            out = app(hw, *args)
            return replace(out, meta=t.meta) if t.meta else out
        if isinstance(t, Const):
            fired = _try_rules(t.name, (), reg, fuel)
            if fired is not None:
                contractum, _, label = fired
                if audit is not None:
                    audit.record(label, path)
                t = contractum
                continue
            return t
        if isinstance(t, Elim):
            elim_head = f"elim-{t.datatype}"
            args = (t.target, t.motive) + t.methods
            fired = _try_rules(elim_head, args, reg, fuel)
            if fired is not None:
                contractum, _, label = fired
                if audit is not None:
                    audit.record(label, path)
                t = contractum
                continue
            return t
        return t


def whnf(t: Term, reg: RuleRegistry, fuel: int = DEFAULT_FUEL) -> Term:
    """Rewrite at head position until no registered rule applies there."""
    return _whnf(t, reg, _Fuel(fuel))


def _normalize(
    t: Term, reg: RuleRegistry, fuel: _Fuel, audit: Optional[_Audit], path: Path
) -> Term:
    while True:
        t = _whnf(t, reg, fuel, audit, path)
        if isinstance(t, App):
            head, args = unspine(t)
            base = path + ("fn",) * len(args)
            if isinstance(head, (Var, Const, Hole)):
                head2 = head
            else:  # stuck Elim, annotation-bearing Lam with no beta rule, ...
                head2 = _normalize(head, reg, fuel, audit, base)
            nargs = []
            for i, a in enumerate(args):
                p = path + ("fn",) * (len(args) - 1 - i) + ("arg",)
                nargs.append(_normalize(a, reg, fuel, audit, p))
            out = app(head2, *nargs)
            if t.meta:
                out = replace(out, meta=t.meta)
            re = _whnf(out, reg, fuel, audit, path)
            if re is out:
                return out
            t = re
            continue
        if isinstance(t, Elim):
            out = _norm_elim(t, reg, fuel, audit, path)
            re = _whnf(out, reg, fuel, audit, path)
            if re is out:
                return out
            t = re
            continue
        if isinstance(t, Lam):
            return _norm_lam(t, reg, fuel, audit, path)
        if isinstance(t, Pi):
            return replace(
                t,
                domain=_normalize(t.domain, reg, fuel, audit, path + ("domain",)),
                codomain=_normalize(t.codomain, reg, fuel, audit, path + ("codomain",)),
            )
        return t


def _norm_lam(
    t: Lam, reg: RuleRegistry, fuel: _Fuel, audit: Optional[_Audit], path: Path
) -> Term:
    ann = (
        _normalize(t.annotation, reg, fuel, audit, path + ("annotation",))
        if t.annotation is not None
        else None
    )
    return replace(t, annotation=ann, body=_normalize(t.body, reg, fuel, audit, path + ("body",)))


def _norm_elim(
    t: Elim, reg: RuleRegistry, fuel: _Fuel, audit: Optional[_Audit], path: Path
) -> Term:
    return replace(
        t,
        target=_normalize(t.target, reg, fuel, audit, path + ("target",)),
        motive=_normalize(t.motive, reg, fuel, audit, path + ("motive",)),
        methods=tuple(
            _normalize(m, reg, fuel, audit, path + (("method", i),))
            for i, m in enumerate(t.methods)
        ),
    )


def normalize(
    t: Term,
    reg: RuleRegistry,
    fuel: int = DEFAULT_FUEL,
    audit: Optional[List[Tuple[int, str, Path]]] = None,
) -> Term:
    """Full normal form: no registered rule applies anywhere in the result."""
    tracker = _Audit() if audit is not None else None
    out = _normalize(t, reg, _Fuel(fuel), tracker, ())
    if audit is not None and tracker is not None:
        audit.extend(tracker.steps)
    return out


def format_trace(steps: List[Tuple[int, str, Path]]) -> str:
    """One line per step: rule head/label, redex path, step index."""
    lines = []
    for idx, label, path in steps:
        spot = ".".join(
            f"{p[0]}{p[1]}" if isinstance(p, tuple) else str(p) for p in path
        ) or "<root>"
        lines.append(f"step={idx} rule={label} redex={spot}")
    return "\n".join(lines)


# --- trace replay -----------------------------------------------------------


def _get_child(t: Term, step: object) -> Term:
    if step == "fn" and isinstance(t, App):
        return t.fn
    if step == "arg" and isinstance(t, App):
        return t.arg
    if step == "domain":
        return t.domain  # type: ignore[attr-defined]
    if step == "codomain":
        return t.codomain  # type: ignore[attr-defined]
    if step == "annotation":
        return t.annotation  # type: ignore[attr-defined]
    if step == "body":
        return t.body  # type: ignore[attr-defined]
    if step == "target":
        return t.target  # type: ignore[attr-defined]
    if step == "motive":
        return t.motive  # type: ignore[attr-defined]
    if isinstance(step, tuple) and step[0] == "method":
        return t.methods[step[1]]  # type: ignore[attr-defined]
    raise KeyError(f"no child {step!r} in {t!r}")


def _put_child(t: Term, step: object, new: Term) -> Term:
    if step == "fn":
        return replace(t, fn=new)
    if step == "arg":
        return replace(t, arg=new)
    if step in ("domain", "codomain", "annotation", "body", "target", "motive"):
        return replace(t, **{step: new})  # type: ignore[arg-type]
    if isinstance(step, tuple) and step[0] == "method":
        ms = list(t.methods)  # type: ignore[attr-defined]
        ms[step[1]] = new
        return replace(t, methods=tuple(ms))
    raise KeyError(f"no child {step!r} in {t!r}")


def apply_step_at(t: Term, path: Path, label: str, reg: RuleRegistry) -> Term:
    """Apply the named rule once at the addressed position (trace replay)."""
    if path:
        child = _get_child(t, path[0])
        return _put_child(t, path[0], apply_step_at(child, path[1:], label, reg))
    rule = reg.by_label(label)
    fuel = _Fuel(DEFAULT_FUEL)
    if isinstance(t, Elim):
        args: Tuple[Term, ...] = (t.target, t.motive) + t.methods
        head_ok = rule.head == f"elim-{t.datatype}"
    else:
        head, args = unspine(t)
        if rule.head == APP_HEAD:
            hw = _whnf(head, reg, fuel)
            args = (hw,) + args
            head_ok = isinstance(hw, Lam)
        else:
            hw = _whnf(head, reg, fuel) if not isinstance(head, Const) else head
            head_ok = isinstance(hw, Const) and hw.name == rule.head
    if not head_ok:
        raise KeyError(f"rule {label!r} does not apply at {path!r}")
    binds: Dict[str, object] = {}
    k = len(rule.pattern)
    if k > len(args) or not all(
        _match(p, a, reg, fuel, binds) for p, a in zip(rule.pattern, args[:k])
    ):
        raise KeyError(f"rule {label!r} does not match at {path!r}")
    return app(rule.build(binds), *args[k:])
