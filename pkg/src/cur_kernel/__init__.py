"""cur-kernel: a dependently typed proof-assistant kernel.

A bidirectional checker over a CC-style core, extensible normalization
by rewrite rules, indexed inductive families with generated eliminators,
unification-driven implicit arguments, pattern matching with termination
checking (syntactic guards and sized types), a tactic engine with an
interactive loop, and a proof-session server for the browser UI.
"""

from . import elab as _elab  # registers match/literal handling
from . import ntac as _ntac  # registers the ntac expression form
from .check import EqMode, check, check_telescope, def_eq, infer
from .core import (
    Context,
    Name,
    Term,
    alpha_eq,
    fresh,
    free_vars,
    print_term,
    subst,
)
from .datatypes import DatatypeDecl, eliminator_type, generic_lookup, iota_rules
from .elab import desugar, lift_literal, process_program, process_toplevel
from .environment import Env
from .prelude import base_env
from .reader import parse, parse_one, print_surface
from .reduce import RuleRegistry, normalize, register_rule, whnf
from .sized import INF, Lt, SVar, sz_ok
from .unify import unify

__all__ = [
    "EqMode",
    "check",
    "check_telescope",
    "def_eq",
    "infer",
    "Context",
    "Name",
    "Term",
    "alpha_eq",
    "fresh",
    "free_vars",
    "print_term",
    "subst",
    "DatatypeDecl",
    "eliminator_type",
    "generic_lookup",
    "iota_rules",
    "desugar",
    "lift_literal",
    "process_program",
    "process_toplevel",
    "Env",
    "base_env",
    "parse",
    "parse_one",
    "print_surface",
    "RuleRegistry",
    "normalize",
    "register_rule",
    "whnf",
    "INF",
    "Lt",
    "SVar",
    "sz_ok",
    "unify",
]
