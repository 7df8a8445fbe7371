"""Global elaboration environment.

Holds the global constants, the reduction-rule registry, the per-type
method table, and tunables (step budget, positivity mode).  Declaration
processing works on a copy and returns it, so a failed declaration never
leaves a half-updated environment behind.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

from . import reduce as red
from .core import Term
from .errors import ElabError


@dataclass(frozen=True)
class GlobalInfo:
    """One global constant: a type/data constructor, definition, or axiom."""

    name: str
    type_: Term  # stored in normal form
    role: str  # 'type' | 'ctor' | 'def' | 'axiom' | 'elim' | 'implicit' | 'sized-ctor'
    datatype: Optional[str] = None
    ctor_index: Optional[int] = None
    decl: Optional[object] = None  # DatatypeDecl for 'type'/'elim'
    implicit_target: Optional[str] = None
    implicit_omit: int = 0
    sized_ctor: Optional[str] = None  # underlying constructor for 'sized-ctor'
    sized_sig: Optional[object] = None  # SizedSig for size-propagating functions
    value: Optional[Term] = None  # definition body, when one exists


class Env:
    """Globals + rule registry + generic method table + settings."""

    def __init__(self, fuel: int = red.DEFAULT_FUEL, positivity: str = "warn"):
        self.globals: Dict[str, GlobalInfo] = {}
        self.registry = red.RuleRegistry()
        self.methods: Dict[Tuple[str, str], Callable[..., Any]] = {}
        self.fuel = fuel
        self.positivity = positivity
        self._eq_modes: List[object] = []
        self.warnings: List[str] = []

    def copy(self) -> "Env":
        env = Env(self.fuel, self.positivity)
        env.globals = dict(self.globals)
        env.registry = self.registry
        env.methods = dict(self.methods)
        env._eq_modes = list(self._eq_modes)
        env.warnings = list(self.warnings)
        return env

    # -- globals --

    def lookup(self, name: str) -> Optional[GlobalInfo]:
        return self.globals.get(name)

    def require(self, name: str) -> GlobalInfo:
        info = self.globals.get(name)
        if info is None:
            raise ElabError(f"unbound name {name!r}")
        return info

    def add_global(self, info: GlobalInfo) -> None:
        if info.name in self.globals:
            raise ElabError(f"name {info.name!r} is already defined")
        self.globals[info.name] = info

    # -- reduction rules --

    def register_rule(self, rule: red.ReductionRule) -> None:
        self.registry = self.registry.register(rule)

    def whnf(self, t: Term) -> Term:
        return red.whnf(t, self.registry, self.fuel)

    def normalize(self, t: Term, audit: Optional[list] = None) -> Term:
        return red.normalize(t, self.registry, self.fuel, audit)

    # -- generic type methods --

    def register_method(self, datatype: str, method: str, fn: Callable[..., Any]) -> None:
        self.methods[(datatype, method)] = fn

    # -- equality-mode stack (dynamic scoping for judgment extensions) --

    @property
    def eq_mode(self) -> Optional[object]:
        return self._eq_modes[-1] if self._eq_modes else None

    @contextmanager
    def mode(self, m: object) -> Iterator[None]:
        self._eq_modes.append(m)
        try:
            yield
        finally:
            self._eq_modes.pop()
