#!/usr/bin/env python3
"""Print the audit trace of normalizing an expression, then replay it.

Example:
    python scripts/reduction_trace.py "(plus 2 2)"
"""

import sys

from cur_kernel.check import infer
from cur_kernel.core import EMPTY_CTX, alpha_eq, print_term
from cur_kernel.elab import desugar
from cur_kernel.prelude import base_env
from cur_kernel.reader import parse_one
from cur_kernel.reduce import apply_step_at, format_trace, normalize


def main() -> int:
    expr = sys.argv[1] if len(sys.argv) > 1 else "(plus 2 3)"
    env = base_env()
    core, _ = infer(env, EMPTY_CTX, desugar(parse_one(expr)))
    audit = []
    out = normalize(core, env.registry, env.fuel, audit)
    print(format_trace(audit))
    print(f"normal form: {print_term(out, reserved=env.globals.keys())}")
    replayed = core
    for _, label, path in audit:
        replayed = apply_step_at(replayed, path, label, env.registry)
    print(f"replay matches: {alpha_eq(replayed, out)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
