"""Command-line interface: check, norm, and the interactive prover."""

import io
import subprocess
import sys

from cur_kernel.cli import cmd_check, cmd_norm, cmd_prove, _make_parser

from .conftest import corpus_files


def _args(argv):
    return _make_parser().parse_args(argv)


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


PRELUDE_FILE_SOURCE = """
(define-datatype Nat2 : Type [Z2 : Nat2] [S2 [k : Nat2] : Nat2])
(define plus2
  (λ [m : Nat2] [n : Nat2]
    (elim-Nat2 m (λ [o : Nat2] Nat2) n (λ [k : Nat2] [ih : Nat2] (S2 ih)))))
"""


def test_check_prints_definitions(tmp_path, capsys):
    path = _write(tmp_path, "defs.cur", PRELUDE_FILE_SOURCE)
    code = cmd_check(_args(["check", path]))
    out = capsys.readouterr().out
    assert code == 0
    assert "Nat2 : Type" in out
    assert "plus2 : (Π [m : Nat2] (Π [n : Nat2] Nat2))" in out


def test_check_deterministic_output(tmp_path, capsys):
    path = _write(tmp_path, "defs.cur", PRELUDE_FILE_SOURCE)
    cmd_check(_args(["check", path]))
    first = capsys.readouterr().out
    cmd_check(_args(["check", path]))
    second = capsys.readouterr().out
    assert first == second


def test_check_type_error_exit_1(tmp_path, capsys):
    path = _write(tmp_path, "bad.cur", "(check Z Bool)")
    code = cmd_check(_args(["check", path]))
    err = capsys.readouterr().err
    assert code == 1
    assert "ty mismatch" in err


def test_check_missing_file_exit_2(capsys):
    code = cmd_check(_args(["check", "/nonexistent/nope.cur"]))
    assert code == 2


def test_check_corpus_files():
    for path in corpus_files():
        assert cmd_check(_args(["check", path])) == 0, path


def test_norm_peano(tmp_path, capsys):
    path = _write(tmp_path, "p.cur", "; uses the preloaded prelude\n")
    code = cmd_norm(_args(["norm", path, "-e", "(plus 2 3)"]))
    out = capsys.readouterr().out.strip()
    assert code == 0
    assert out == "(S (S (S (S (S Z)))))"


def test_norm_with_fuel_flag(tmp_path, capsys):
    path = _write(tmp_path, "p.cur", "")
    code = cmd_norm(_args(["--fuel", "10", "norm", path, "-e", "(mult 9 9)"]))
    assert code == 1  # budget exhausted reports an error
    assert "divergence" in capsys.readouterr().err


def test_no_prelude_flag(tmp_path, capsys):
    path = _write(tmp_path, "own.cur", "(define-datatype Nat : Type [Z : Nat])")
    code = cmd_check(_args(["--no-prelude", "check", path]))
    assert code == 0
    assert "Nat : Type" in capsys.readouterr().out


def test_import_inclusion(tmp_path, capsys):
    lib = _write(tmp_path, "lib.cur", "(define three (plus 1 2))")
    main = _write(tmp_path, "main.cur", "(import lib.cur)\n(check three Nat)")
    code = cmd_check(_args(["check", main]))
    assert code == 0
    assert "three : Nat" in capsys.readouterr().out


def test_prove_repl_transcript(tmp_path, capsys):
    path = _write(tmp_path, "p.cur", "")
    stdin = io.StringIO("(intros A a)\nassumption\n(quit)\n")
    code = cmd_prove(
        _args(["prove", path, "--goal", "(∀ (A : Type) (a : A) A)"]), inp=stdin
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "goal 1 of 1: (∀ (A : Type) (a : A) A)" in out
    assert "curr goal: A" in out
    assert "Proof complete (2 steps)" in out
    assert "script: (intros A a) assumption" in out


def test_prove_unknown_tactic_keeps_state(tmp_path, capsys):
    path = _write(tmp_path, "p.cur", "")
    stdin = io.StringIO("bogus\n(quit)\n")
    code = cmd_prove(_args(["prove", path, "--goal", "Nat"]), inp=stdin)
    out = capsys.readouterr().out
    assert code == 0
    assert "unknown tactic" in out
    assert "script: " in out  # empty script printed on quit


def test_console_entry_point(tmp_path):
    path = _write(tmp_path, "p.cur", "")
    proc = subprocess.run(
        [sys.executable, "-m", "cur_kernel.cli", "norm", str(path), "-e", "(plus 1 1)"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "(S (S Z))"
