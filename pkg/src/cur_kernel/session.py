"""Proof sessions: the engine shared by the terminal prover and the server.

A session owns a loaded environment, the active proof zipper, an undo
stack of zipper snapshots (zippers are immutable values), and the log of
successfully applied tactic text.  Replaying the log on a fresh session
reproduces the current state.
"""

from __future__ import annotations

import itertools
from typing import List, Optional

from .core import print_term
from .elab import process_program
from .environment import Env
from .errors import CurError
from .ntac import (
    Zipper,
    apply_tactic,
    extract_proof,
    open_goals,
    rebuild,
    render_state,
    start_proof,
)
from .prelude import base_env

_session_ids = itertools.count(1)


class SessionState:
    def __init__(self, fuel: int = 100_000, positivity: str = "warn", prelude: bool = True):
        self.id = next(_session_ids)
        self._mk_env = lambda: base_env(fuel=fuel, positivity=positivity, prelude=prelude)
        self.env: Env = self._mk_env()
        self.zipper: Optional[Zipper] = None
        self.undo_stack: List[Zipper] = []
        self.script: List[str] = []

    # -- loading --

    def load_source(self, source: str, file: str = "<input>", base_dir: str = ".") -> List[str]:
        env, lines = process_program(self.env, source, file, base_dir)
        self.env = env
        return lines

    def load_file(self, path: str) -> List[str]:
        import os

        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        return self.load_source(text, path, os.path.dirname(path) or ".")

    # -- proving --

    def start_proof(self, goal_text: str) -> dict:
        self.zipper = start_proof(self.env, goal_text)
        self.undo_stack = []
        self.script = []
        return self.state()

    def _require_proof(self) -> Zipper:
        if self.zipper is None:
            raise CurError("no active proof")
        return self.zipper

    def apply(self, text: str) -> dict:
        z = self._require_proof()
        z2 = apply_tactic(self.env, z, text.strip())
        if z2 is not z:
            self.undo_stack.append(z)
            self.script.append(text.strip())
            self.zipper = z2
        return self.state()

    def undo(self) -> dict:
        self._require_proof()
        if not self.undo_stack:
            raise CurError("nothing to undo")
        self.zipper = self.undo_stack.pop()
        self.script.pop()
        return self.state()

    def extract(self) -> str:
        z = self._require_proof()
        term = extract_proof(rebuild(z))
        return print_term(term, reserved=self.env.globals.keys())

    def open_goal_count(self) -> int:
        z = self._require_proof()
        return len(open_goals(rebuild(z)))

    def state(self) -> dict:
        z = self._require_proof()
        return render_state(self.env, z).to_json()

    def state_lines(self) -> List[str]:
        z = self._require_proof()
        return render_state(self.env, z).lines()
