"""The standard prelude: base datatypes and helpers, written in the
surface language so it exercises the general datatype machinery."""

from __future__ import annotations

from .elab import process_program
from .environment import Env

PRELUDE = """
; natural numbers
(define-datatype Nat : Type
  [Z : Nat]
  [S [k : Nat] : Nat])

; booleans
(define-datatype Bool : Type
  [true : Bool]
  [false : Bool])

; the empty type
(define-datatype False : Type)

; propositional equality: (= A a b)
(define-datatype = [A : Type] [a : A] : (Π [b : A] Type)
  [refl : (= A a a)])

; length-indexed lists
(define-datatype Vec [A : Type] : (→ [i : Nat] Type)
  [nil : (Vec A 0)]
  [cons [k : Nat] [x : A] [xs : (Vec A k)] : (Vec A (S k))])

(define plus
  (λ [m : Nat] [n : Nat]
    (elim-Nat m (λ [o : Nat] Nat) n (λ [k : Nat] [ih : Nat] (S ih)))))

(define mult
  (λ [m : Nat] [n : Nat]
    (elim-Nat m (λ [o : Nat] Nat) 0 (λ [k : Nat] [ih : Nat] (plus n ih)))))

(define not
  (λ [b : Bool] (elim-Bool b (λ [o : Bool] Bool) false true)))

; rewriting along an equality: from (P t) and (= A t w) conclude (P w)
(define transport
  (λ [A : Type] [t : A] [P : (→ A Type)] [p : (P t)] [w : A] [e : (= A t w)]
    (elim-= e (λ [b : A] [o : (= A t b)] (P b)) p)))

(define sym
  (λ [A : Type] [a : A] [b : A] [e : (= A a b)]
    (elim-= e (λ [x : A] [o : (= A a x)] (= A x a)) (refl A a))))
"""


def base_env(fuel: int = 100_000, positivity: str = "warn", prelude: bool = True) -> Env:
    """A fresh environment, with the prelude loaded unless told otherwise."""
    from .reduce import beta_rule

    env = Env(fuel=fuel, positivity=positivity)
    env.register_rule(beta_rule())
    if prelude:
        env, _ = process_program(env, PRELUDE, "<prelude>")
    return env
