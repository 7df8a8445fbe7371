"""Core terms: substitution, alpha-equivalence, free variables, printing."""

from hypothesis import given, settings

from cur_kernel.core import (
    App,
    Const,
    Lam,
    Pi,
    Term,
    Var,
    alpha_eq,
    app,
    free_vars,
    fresh,
    print_term,
    subst,
)

from .util import free_var_names, terms

U, V, W = free_var_names()


def brute_subst(t: Term, x, v: Term) -> Term:
    """Substitution oracle: freshen every binder first, then replace."""
    t2 = _freshen(t)
    return _naive(t2, x, v)


def _freshen(t: Term) -> Term:
    if isinstance(t, Lam):
        b2 = fresh(t.binder.hint)
        body = _naive(t.body, t.binder, Var(b2))
        ann = _freshen(t.annotation) if t.annotation is not None else None
        return Lam(b2, ann, _freshen(body))
    if isinstance(t, Pi):
        b2 = fresh(t.binder.hint)
        cod = _naive(t.codomain, t.binder, Var(b2))
        return Pi(b2, _freshen(t.domain), _freshen(cod))
    if isinstance(t, App):
        return App(_freshen(t.fn), _freshen(t.arg))
    return t


def _naive(t: Term, x, v: Term) -> Term:
    if isinstance(t, Var):
        return v if t.name == x else t
    if isinstance(t, Lam):
        ann = _naive(t.annotation, x, v) if t.annotation is not None else None
        return Lam(t.binder, ann, t.body if t.binder == x else _naive(t.body, x, v))
    if isinstance(t, Pi):
        return Pi(
            t.binder,
            _naive(t.domain, x, v),
            t.codomain if t.binder == x else _naive(t.codomain, x, v),
        )
    if isinstance(t, App):
        return App(_naive(t.fn, x, v), _naive(t.arg, x, v))
    return t


def test_fresh_unique():
    a, b = fresh("x"), fresh("x")
    assert a != b and a.id != b.id
    assert fresh("").hint == ""


def test_fresh_concurrent_ids_disjoint():
    import threading

    results = [[] for _ in range(4)]

    def mint(bucket):
        bucket.extend(fresh("t").id for _ in range(500))

    threads = [threading.Thread(target=mint, args=(r,)) for r in results]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    all_ids = [i for r in results for i in r]
    assert len(all_ids) == len(set(all_ids))


def test_subst_direct_hit():
    assert alpha_eq(subst(Var(U), U, Const("Z")), Const("Z"))


def test_subst_capture_avoidance():
    y = fresh("y")
    t = Lam(y, None, Var(U))  # λ y. u
    out = subst(t, U, Var(y))  # substitute u := y
    assert isinstance(out, Lam)
    assert out.binder != y  # binder renamed
    assert alpha_eq(out.body, Var(y))  # body is the free y


def test_subst_under_shadowing_vs_oracle():
    x = fresh("x")
    t = App(Lam(x, None, Var(x)), Var(U))  # (λ x. x) u  with u free
    got = subst(t, U, Const("Z"))
    want = brute_subst(t, U, Const("Z"))
    assert alpha_eq(got, want)
    assert alpha_eq(got, App(Lam(x, None, Var(x)), Const("Z")))


def test_alpha_eq_basic():
    x, y = fresh("x"), fresh("y")
    assert alpha_eq(Lam(x, None, Var(x)), Lam(y, None, Var(y)))
    a, b = fresh("a"), fresh("b")
    assert not alpha_eq(
        Lam(x, None, Lam(y, None, Var(x))), Lam(a, None, Lam(b, None, Var(b)))
    )


def test_alpha_eq_pi_indexed():
    x, n = fresh("x"), fresh("n")
    vec = lambda i: app(Const("Vec"), Var(U), Var(i))
    assert alpha_eq(Pi(x, Const("Nat"), vec(x)), Pi(n, Const("Nat"), vec(n)))


def test_free_vars():
    x = fresh("x")
    assert free_vars(Lam(x, None, Var(x))) == set()
    assert free_vars(Lam(x, None, Var(U))) == {U}
    assert free_vars(App(Var(U), Var(V))) == {U, V}


@settings(max_examples=60)
@given(terms())
def test_alpha_eq_reflexive(t):
    assert alpha_eq(t, t)


@settings(max_examples=60)
@given(terms(), terms())
def test_alpha_eq_symmetric(a, b):
    assert alpha_eq(a, b) == alpha_eq(b, a)


@settings(max_examples=40)
@given(terms(), terms(), terms())
def test_alpha_eq_transitive(a, b, c):
    if alpha_eq(a, b) and alpha_eq(b, c):
        assert alpha_eq(a, c)


@settings(max_examples=60)
@given(terms())
def test_subst_identity(t):
    assert alpha_eq(subst(t, U, Var(U)), t)


@settings(max_examples=60)
@given(terms(), terms())
def test_subst_removes_free_occurrence(t, v):
    if U not in free_vars(v):
        assert U not in free_vars(subst(t, U, v))


@settings(max_examples=60)
@given(terms(), terms())
def test_subst_matches_oracle(t, v):
    assert alpha_eq(subst(t, U, v), brute_subst(t, U, v))


@settings(max_examples=40)
@given(terms(), terms(), terms())
def test_substitution_lemma(t, u, v):
    # subst(subst(t,x,u),y,v) == subst(subst(t,y,v),x,subst(u,y,v))
    # provided x != y and x not free in v
    if U in free_vars(v):
        return
    lhs = subst(subst(t, U, u), V, v)
    rhs = subst(subst(t, V, v), U, subst(u, V, v))
    assert alpha_eq(lhs, rhs)


def test_print_disambiguates_hints():
    x1, x2 = fresh("x"), fresh("x")
    t = Lam(x1, None, Lam(x2, None, App(Var(x1), Var(x2))))
    printed = print_term(t)
    assert printed == "(λ x (λ x1 (x x1)))"


def test_print_reserved_names_avoided():
    x = fresh("plus")
    t = Lam(x, Const("Nat"), Var(x))
    printed = print_term(t, reserved={"plus"})
    assert "plus1" in printed
