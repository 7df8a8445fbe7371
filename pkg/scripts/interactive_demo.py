#!/usr/bin/env python3
"""Drive the identity-theorem proof through a session and print the
transcript, then show the extracted proof term and its axioms (none)."""

from cur_kernel.elab import find_axioms
from cur_kernel.check import infer
from cur_kernel.core import EMPTY_CTX
from cur_kernel.elab import desugar
from cur_kernel.reader import parse_one
from cur_kernel.session import SessionState

GOAL = "(∀ (A : Type) (a : A) A)"
SCRIPT = ["(intros A a)", "assumption"]


def main() -> None:
    session = SessionState()
    session.start_proof(GOAL)
    print("\n".join(session.state_lines()))
    for tactic in SCRIPT:
        print(f"> {tactic}")
        session.apply(tactic)
        print("\n".join(session.state_lines()))
    print(f"> (quit)  ; script: {' '.join(session.script)}")
    term_text = session.extract()
    print(f"proof term: {term_text}")
    core, _ = infer(session.env, EMPTY_CTX, desugar(parse_one(term_text)))
    axioms = find_axioms(session.env, core)
    print(f"axioms used: {[name for name, _ in axioms] or 'none'}")


if __name__ == "__main__":
    main()
