"""Command-line entry points: batch checking, normalization, the terminal
interactive prover, and the session server."""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from .check import infer
from .core import EMPTY_CTX, print_term
from .elab import desugar
from .errors import CurError
from .reader import parse, parse_one
from .session import SessionState


def _make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cur", description="cur-kernel proof assistant")
    p.add_argument("--fuel", type=int, default=100_000, help="reduction step budget")
    p.add_argument(
        "--positivity",
        choices=["off", "warn", "error"],
        default="warn",
        help="strict-positivity checking of datatype declarations",
    )
    p.add_argument(
        "--no-prelude",
        action="store_true",
        help="start from a bare environment (for checking the prelude itself)",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="elaborate a file, printing each definition")
    c.add_argument("file")

    n = sub.add_parser("norm", help="normalize an expression in a file's scope")
    n.add_argument("file")
    n.add_argument("-e", "--expr", required=True)

    pr = sub.add_parser("prove", help="interactive terminal prover")
    pr.add_argument("file")
    pr.add_argument("--goal", required=True)

    sv = sub.add_parser("serve", help="run the proof-session server")
    sv.add_argument("--port", type=int, required=True)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--ui-dir", default=None, help="directory of browser UI files")
    sv.add_argument("--preload", default=None, help="file loaded into new sessions")
    return p


def _session(args: argparse.Namespace) -> SessionState:
    return SessionState(
        fuel=args.fuel, positivity=args.positivity, prelude=not args.no_prelude
    )


def cmd_check(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    if not os.path.isfile(args.file):
        print(f"error: no such file: {args.file}", file=sys.stderr)
        return 2
    session = _session(args)
    try:
        lines = session.load_file(args.file)
    except CurError as e:
        print(str(e), file=sys.stderr)
        return 1
    for line in lines:
        print(line, file=out)
    for w in session.env.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_norm(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    if not os.path.isfile(args.file):
        print(f"error: no such file: {args.file}", file=sys.stderr)
        return 2
    session = _session(args)
    try:
        session.load_file(args.file)
        form = desugar(parse_one(args.expr))
        core, _ = infer(session.env, EMPTY_CTX, form)
        normal = session.env.normalize(core)
        print(print_term(normal, reserved=session.env.globals.keys()), file=out)
    except CurError as e:
        print(str(e), file=sys.stderr)
        return 1
    return 0


def cmd_prove(args: argparse.Namespace, inp=None, out=None) -> int:
    inp = inp or sys.stdin
    out = out or sys.stdout
    if not os.path.isfile(args.file):
        print(f"error: no such file: {args.file}", file=sys.stderr)
        return 2
    session = _session(args)
    try:
        session.load_file(args.file)
        session.start_proof(args.goal)
    except CurError as e:
        print(str(e), file=sys.stderr)
        return 1
    for line in session.state_lines():
        print(line, file=out)
    while True:
        print("> ", end="", file=out, flush=True)
        raw = inp.readline()
        if not raw:
            break
        text = raw.strip()
        if not text:
            continue
        if text == "(quit)" or text == "quit":
            print("script:", " ".join(session.script), file=out)
            return 0
        try:
            session.apply(text)
        except CurError as e:
            print(str(e), file=out)
            continue
        for line in session.state_lines():
            print(line, file=out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    print(f"listening on {args.host}:{args.port}", file=sys.stderr)
    serve(
        args.port,
        host=args.host,
        fuel=args.fuel,
        positivity=args.positivity,
        ui_dir=args.ui_dir,
        preload=args.preload,
    )
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = _make_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args)
    if args.command == "norm":
        return cmd_norm(args)
    if args.command == "prove":
        return cmd_prove(args)
    if args.command == "serve":
        return cmd_serve(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
