"""Surface elaboration: sugar, literals, match compilation, recursive
definitions with termination marks, and axiom tracking."""

import pytest

from cur_kernel.check import DEFAULT_MODE, def_eq
from cur_kernel.core import print_term
from cur_kernel.elab import (
    desugar,
    find_axioms,
    lift_literal,
    process_program,
)
from cur_kernel.errors import CurError, ElabError, NonTerminating
from cur_kernel.reader import (
    SList,
    iter_atoms,
    parse_one,
    print_surface,
    surface_equal,
)

from .util import ex, nv, to_int

# --- desugar -----------------------------------------------------------------


def test_desugar_multi_binder_lambda():
    out = desugar(parse_one("(λ [x : A] [y : B] e)"))
    want = parse_one("(λ [x : A] (λ [y : B] e))")
    assert surface_equal(out, want)


def test_desugar_arrow_inserts_fresh_binder():
    out = desugar(parse_one("(→ Nat Nat)"))
    assert isinstance(out, SList)
    head, binder, body = out.items
    assert head.text == "Π"
    x, colon, ty = binder.items
    assert colon.text == ":" and ty.text == "Nat"
    assert body.text == "Nat"
    # the minted binder is fresh: it appears nowhere else
    assert x.text not in ("Nat",)


def test_desugar_app_currying():
    out = desugar(parse_one("(f a b c)"))
    want = parse_one("(((f a) b) c)")
    assert surface_equal(out, want)


def test_desugar_forall_multi():
    out = desugar(parse_one("(∀ (A : Type) (a : A) A)"))
    want = parse_one("(Π [A : Type] (Π [a : A] A))")
    assert surface_equal(out, want)


_SRC = [
    "(λ [x : A] [y : B] (f x y z))",
    "(→ Nat Nat Bool)",
    "(∀ (A : Type) (a : A) A)",
    "(match n #:as m #:in Nat #:return Nat [Z Z] [(S k) (plus k k)])",
    "(f (g a b) (λ x x))",
]


@pytest.mark.parametrize("src", _SRC)
def test_desugar_idempotent(src):
    once = desugar(parse_one(src))
    twice = desugar(once)
    assert surface_equal(once, twice)


@pytest.mark.parametrize("src", _SRC)
def test_desugar_size_monotone(src):
    before = parse_one(src)
    after = desugar(before)
    assert _size(after) >= _size(before)


def _size(s):
    return len(list(iter_atoms(s)))


# --- literals -----------------------------------------------------------------


def test_lift_literal_zero():
    assert print_surface(lift_literal(0)) == "Z"


def test_lift_literal_two():
    assert print_surface(lift_literal(2)) == "(S (S Z))"


def test_lift_literal_negative_rejected():
    with pytest.raises(ElabError) as e:
        lift_literal(-1)
    assert "unsupported literal" in str(e.value)


def test_negative_literal_in_term_rejected(env):
    with pytest.raises(ElabError) as e:
        ex(env, "(plus -1 2)")
    assert "unsupported literal" in str(e.value)


# --- match ---------------------------------------------------------------------


def test_match_elaborates_to_eliminator(env):
    core, ty = ex(
        env, "(λ [n : Nat] (match n #:as m #:in Nat #:return Nat [Z Z] [(S k) k]))"
    )
    hand, _ = ex(
        env,
        "(λ [n : Nat] (elim-Nat n (λ [m : Nat] Nat) Z (λ [k : Nat] (λ [ih : Nat] k))))",
    )
    assert def_eq(env, core, hand, DEFAULT_MODE)
    out = nv(env, "(match 3 #:as m #:in Nat #:return Nat [Z Z] [(S k) k])")
    assert to_int(out) == 2


def test_match_cases_ordered_by_declaration(env):
    # case order in the source does not matter
    a = nv(env, "(match 0 #:as m #:in Nat #:return Bool [(S k) false] [Z true])")
    assert print_term(a) == "true"


def test_match_missing_case_names_constructor(env):
    with pytest.raises(ElabError) as e:
        ex(env, "(match 0 #:as m #:in Nat #:return Nat [Z Z])")
    assert "missing case for constructor S" in str(e.value)


def test_match_duplicate_case(env):
    with pytest.raises(ElabError) as e:
        ex(env, "(match 0 #:as m #:in Nat #:return Nat [Z Z] [Z Z] [(S k) k])")
    assert "duplicate" in str(e.value)


def test_match_unknown_constructor(env):
    with pytest.raises(ElabError) as e:
        ex(env, "(match 0 #:as m #:in Nat #:return Nat [Q Z] [(S k) k] [Z Z])")
    assert "unknown constructor" in str(e.value)


def test_match_arity_mismatch(env):
    with pytest.raises(ElabError) as e:
        ex(env, "(match 0 #:as m #:in Nat #:return Nat [Z Z] [(S k j) k])")
    assert "argument" in str(e.value)


def test_match_wildcard_expansion(env):
    out = nv(
        env,
        "(match 3 #:as m #:in Nat #:return Bool [Z true] [_ false])",
    )
    assert print_term(out) == "false"


def test_match_vec_case_binds_ih(env):
    # the cons method receives k, x, xs plus one induction-hypothesis binder
    src = """
    (λ [n : Nat] [v : (Vec Nat n)]
      (match v #:as w #:with-indx i #:in (Vec Nat n) #:return Nat
        [nil Z]
        [(cons k x xs) (S k)]))
    """
    core, _ = ex(env, src)
    from cur_kernel.core import Elim, Lam, unspine

    lam_body = core.body.body
    assert isinstance(lam_body, Elim)
    method = lam_body.methods[1]
    binders = []
    while isinstance(method, Lam):
        binders.append(method.binder.hint)
        method = method.body
    assert binders[:3] == ["k", "x", "xs"] and len(binders) == 4  # + one ih


def test_match_requires_return(env):
    with pytest.raises(ElabError) as e:
        ex(env, "(match 0 #:as m #:in Nat [Z Z] [(S k) k])")
    assert "#:return" in str(e.value)


# --- recursive definitions -------------------------------------------------------


def test_loop_rejected(env):
    with pytest.raises(NonTerminating):
        process_program(env, "(define loop [n : Nat] : Nat (loop n))")


def test_minus_accepted_and_computes(env):
    env2, _ = process_program(
        env,
        """
        (define/rec/match minus [n : Nat] [m : Nat] : Nat
          [Z _ => n] [_ Z => n] [(S n-1) (S m-1) => (minus n-1 m-1)])
        """,
    )
    assert to_int(nv(env2, "(minus 3 1)")) == 2
    assert to_int(nv(env2, "(minus 5 5)")) == 0
    assert to_int(nv(env2, "(minus 2 7)")) == 0


def test_div_rejected_nonterminate(env):
    env2, _ = process_program(
        env,
        """
        (define/rec/match minus [n : Nat] [m : Nat] : Nat
          [Z _ => n] [_ Z => n] [(S n-1) (S m-1) => (minus n-1 m-1)])
        """,
    )
    with pytest.raises(NonTerminating) as e:
        process_program(
            env2,
            """
            (define/rec/match div [n : Nat] [m : Nat] : Nat
              [Z _ => Z]
              [(S n-1) m => (S (div (minus n-1 m) m))])
            """,
        )
    assert e.value.kind == "nonterminate"


def test_rec_rules_constructor_guarded(env):
    """Rules from constructor rows never have a variable redex pattern in
    the structural position; all-variable rows never mention the function
    in their contractum, so normalization cannot loop."""
    from cur_kernel.reduce import PAs, PCtor

    env2, _ = process_program(
        env,
        """
        (define/rec/match evenb [n : Nat] : Bool
          [Z => true] [(S k) => (not (evenb k))])
        (define twice [n : Nat] : Nat (plus n n))
        """,
    )
    for fname in ("evenb", "twice"):
        for rule in env2.registry.rules_for(fname):
            first = rule.pattern[0]
            assert isinstance(first, PAs)
            if not isinstance(first.inner, PCtor):
                # variable-pattern row: contractum may not reference fname
                probe = rule.build(
                    {k: v for k, v in _fake_binds(rule).items()}
                )
                assert fname not in print_term(probe, reserved=env2.globals.keys())
    assert to_int(nv(env2, "(twice 4)")) == 8
    assert print_term(nv(env2, "(evenb 6)")) == "true"


def _fake_binds(rule):
    from cur_kernel.core import Const
    from cur_kernel.reduce import PAs, PCtor, PVar

    binds = {}

    def walk(p):
        if isinstance(p, PVar):
            binds[p.name] = Const("Z")
        elif isinstance(p, PAs):
            binds[p.name] = Const("Z")
            walk(p.inner)
        elif isinstance(p, PCtor):
            for q in p.args:
                walk(q)

    for p in rule.pattern:
        walk(p)
    return binds


def test_accepted_functions_terminate_exhaustively(env):
    """Every accepted recursive function halts on all inputs of size <= 8
    (checked against a direct Python evaluation)."""
    env2, _ = process_program(
        env,
        """
        (define/rec/match minus [n : Nat] [m : Nat] : Nat
          [Z _ => n] [_ Z => n] [(S n-1) (S m-1) => (minus n-1 m-1)])
        (define/rec/match evenb [n : Nat] : Bool
          [Z => true] [(S k) => (not (evenb k))])
        """,
    )
    for n in range(9):
        assert print_term(nv(env2, f"(evenb {n})")) == ("true" if n % 2 == 0 else "false")
        for m in range(9):
            assert to_int(nv(env2, f"(minus {n} {m})")) == max(0, n - m)


def test_rec_coverage_error(env):
    with pytest.raises(ElabError) as e:
        process_program(
            env,
            "(define/rec/match f [n : Nat] : Nat [Z => Z])",
        )
    assert "missing case" in str(e.value)


def test_dependent_return_rejected(env):
    with pytest.raises(ElabError) as e:
        process_program(
            env,
            "(define/rec/match g [n : Nat] : (Vec Nat n) [Z => (nil Nat)] [(S k) => (nil Nat)])",
        )
    assert "dependent return" in str(e.value)


def test_non_datatype_first_argument_rejected(env):
    with pytest.raises(ElabError) as e:
        process_program(
            env,
            "(define/rec/match h [f : (→ Nat Nat)] : Nat [_ => Z])",
        )
    assert "datatype" in str(e.value)


# --- axioms --------------------------------------------------------------------


def test_axiom_tracking_bad_dep_prog(env):
    env2, lines = process_program(
        env,
        """
        (define-axiom false=true (= Bool false true))
        (print-assumptions
          (λ [x : Bool]
            (elim-Bool x (λ [y : Bool] (= Bool (not y) y))
              false=true
              (sym Bool false true false=true))))
        """,
    )
    assert "Axioms used: false=true : (= Bool false true)" in lines


def test_axiom_used_twice_listed_once(env):
    env2, _ = process_program(env, "(define-axiom ax (= Nat 0 0))")
    core, _ = ex(env2, "(transport Nat 0 (λ [k : Nat] (= Nat 0 0)) ax 0 ax)")
    found = find_axioms(env2, core)
    assert [name for name, _ in found] == ["ax"]


def test_no_axioms_reports_empty(env):
    core, _ = ex(env, "(λ [A : Type] (λ [a : A] a))")
    assert find_axioms(env, core) == []


def test_ill_typed_axiom_rejected(env):
    with pytest.raises(CurError):
        process_program(env, "(define-axiom bad (S Z))")
