"""Axiom schema instance generators over extended signatures.

Each generator takes concrete source formulas and returns the schema
instance as a desugared Formula over the base language extended with the
fresh predicate the schema introduces:

    T (unary)      sentential truth biconditionals
    S (binary)     uniform satisfaction biconditionals
    D (binary)     definability axioms
    H (function)   Skolem witness functions
    T1, T2         the disjunctive two-predicate truth variant
    R (ternary)    recursive-saturation realizers (optimality/nonemptiness)

Internal quantification over codes (schemata stated with a quantifier over
all terms or all sentences inside the object language) is not emitted as
object syntax; generators produce one concrete instance per source object
and the evaluation module checks the compositional clauses semantically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coding import encode, numeral
from .evaluate import eval_term
from .syntax import (
    And,
    App,
    Equal,
    Exists,
    Forall,
    Formula,
    LogicError,
    Not,
    Or,
    Rel,
    Signature,
    Term,
    Var,
    all_vars,
    fresh_var,
    free_vars,
    iff,
    implies,
    substitute,
    substitute_many,
    term_vars,
)


class SchemaError(LogicError):
    pass


@dataclass
class SchemaInstanceSet:
    """A batch of generated instances plus the signature they live over."""

    schema: str
    signature: Signature
    instances: list[tuple[tuple, Formula]] = field(default_factory=list)

    def formulas(self) -> list[Formula]:
        return [inst for _, inst in self.instances]


def _require_sentence(phi: Formula, what: str = "schema input"):
    fv = free_vars(phi)
    if fv:
        raise SchemaError(f"{what} must be a sentence; free variables {sorted(fv)}")


def _single_free_var(phi: Formula) -> str:
    fv = free_vars(phi)
    if len(fv) != 1:
        raise SchemaError(f"expected exactly one free variable, found {sorted(fv)}")
    return next(iter(fv))


def _check_fresh(phi: Formula, names: tuple[str, ...]):
    from .syntax import subformulas

    for g in subformulas(phi):
        if isinstance(g, Rel) and g.name in names:
            raise SchemaError(f"input already mentions the fresh predicate {g.name!r}")


def code_numeral(x: Formula | Term) -> Term:
    """The numeral naming the Godel code of x."""
    return numeral(encode(x))


def tb_axiom(phi: Formula) -> Formula:
    """T(num(code(phi))) <-> phi, for a sentence phi."""
    _require_sentence(phi)
    _check_fresh(phi, ("T",))
    return iff(Rel("T", (code_numeral(phi),)), phi)


def usb_axiom(phi: Formula) -> Formula:
    """forall x (S(num(code(phi)), x) <-> phi(x)), x fresh."""
    v = _single_free_var(phi)
    _check_fresh(phi, ("S",))
    x = fresh_var(all_vars(phi))
    body = iff(Rel("S", (code_numeral(phi), Var(x))), substitute(phi, v, Var(x)))
    return Forall(x, body)


def exists_unique(v: str, phi: Formula) -> Formula:
    """exists v (phi and forall z (phi(z) -> z = v)), z fresh, desugared."""
    z = fresh_var(all_vars(phi) | {v})
    phi_z = substitute(phi, v, Var(z))
    return Exists(v, And(phi, Forall(z, Or(Not(phi_z), Equal(Var(z), Var(v))))))


def def_axiom(phi: Formula) -> Formula:
    """forall y (D(num(code(phi)), y) <-> (exists! x phi(x) and phi(y)))."""
    v = _single_free_var(phi)
    _check_fresh(phi, ("D",))
    y = fresh_var(all_vars(phi))
    unique = exists_unique(v, phi)
    body = iff(
        Rel("D", (code_numeral(phi), Var(y))),
        And(unique, substitute(phi, v, Var(y))),
    )
    return Forall(y, body)


def utb_term_instance(phi: Formula, t: Term) -> Formula:
    """T(num(code(phi(t)))) <-> phi(num(val t)), for a closed term t.

    The valuation of t happens outside the object language; the right-hand
    side names the value by its binary numeral.
    """
    v = _single_free_var(phi)
    _check_fresh(phi, ("T",))
    if term_vars(t):
        raise SchemaError(f"term must be closed; variables {sorted(term_vars(t))}")
    substituted = substitute(phi, v, t)
    value = eval_term(t, {})
    return iff(Rel("T", (code_numeral(substituted),)), substitute(phi, v, numeral(value)))


def skolem_axiom(phi: Formula) -> Formula:
    """exists x phi(x) -> phi(H(num(code(phi)))), desugared."""
    v = _single_free_var(phi)
    witness = App("H", (code_numeral(phi),))
    return implies(Exists(v, phi), substitute(phi, v, witness))


def us_axiom(phi: Formula, x: str, y: str) -> Formula:
    """Uniform variant: forall y (exists x phi(x,y) -> phi(H(num(code(phi)), y), y))."""
    fv = free_vars(phi)
    if not fv <= {x, y}:
        raise SchemaError(f"free variables must be within {{{x}, {y}}}, found {sorted(fv)}")
    witness = App("H", (code_numeral(phi), Var(y)))
    body = implies(Exists(x, phi), substitute(phi, x, witness))
    return Forall(y, body)


def twotb_axiom(phi: Formula, psi: Formula) -> Formula:
    """(T1(num(code(phi))) <-> phi) or (T2(num(code(psi))) <-> psi)."""
    _require_sentence(phi, "first sentence")
    _require_sentence(psi, "second sentence")
    _check_fresh(phi, ("T1", "T2"))
    _check_fresh(psi, ("T1", "T2"))
    return Or(
        iff(Rel("T1", (code_numeral(phi),)), phi),
        iff(Rel("T2", (code_numeral(psi),)), psi),
    )


def pairing_formula(a: str, b: str, z: str) -> Formula:
    """Graph of the Cantor pairing: 2z = (a+b)(a+b+1) + 2b.

    Used to reduce realizer tuples to a single parameter; nest for wider
    tuples.
    """
    two_z = App("+", (Var(z), Var(z)))
    s = App("+", (Var(a), Var(b)))
    s1 = App("+", (s, numeral(1)))
    rhs = App("+", (App("*", (s, s1)), App("+", (Var(b), Var(b)))))
    return Equal(two_z, rhs)


def conjoin(fs: list[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is 0 = 0."""
    if not fs:
        return Equal(numeral(0), numeral(0))
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def rsat_instances(ptype: list[Formula], p: int, n: int, y: str = "y", x: str = "x") -> SchemaInstanceSet:
    """Optimality and nonemptiness axioms for an explicit finite type.

    ``ptype`` lists the formulas phi_i(y, x); ``p`` is the code naming the
    type.  Emits one optimality instance per cutoff 1..n plus the
    nonemptiness instance, each universally closed in the parameter y:

        OP_k: exists x /\\_{i<k} phi_i -> forall x (R(num p, x, y) -> /\\_{i<k} phi_i)
        NE:   exists x R(num p, x, y)
    """
    if n > len(ptype):
        raise SchemaError(f"cutoff {n} exceeds the listed type ({len(ptype)} formulas)")
    for i, phi in enumerate(ptype):
        stray = free_vars(phi) - {x, y}
        if stray:
            raise SchemaError(f"formula {i} has stray free variables {sorted(stray)}")
    sig = arith_with(("R", 3))
    out = SchemaInstanceSet("rsat", sig)
    r_atom = Rel("R", (numeral(p), Var(x), Var(y)))
    for k in range(1, n + 1):
        conj = conjoin(ptype[:k])
        op = Forall(y, implies(Exists(x, conj), Forall(x, implies(r_atom, conj))))
        out.instances.append((("OP", k), op))
    ne = Forall(y, Exists(x, r_atom))
    out.instances.append((("NE",), ne))
    return out


def arith_with(*relations: tuple[str, int], functions: tuple[tuple[str, int], ...] = ()) -> Signature:
    """The arithmetic core extended with fresh predicates/functions."""
    from .syntax import arith_signature

    sig = arith_signature()
    for name, arity in relations:
        sig = sig.with_relation(name, arity)
    for name, arity in functions:
        sig = sig.with_function(name, arity)
    return sig


def translate_predicate(Phi: Formula, R: str, defn: Formula, holes: tuple[str, ...]) -> Formula:
    """Replace every R-atom in Phi by defn with its holes filled.

    ``holes`` are defn's distinguished argument variables, one per R slot.
    Argument terms are substituted simultaneously and capture-avoidingly
    into defn; the result mentions no R.
    """
    if len(set(holes)) != len(holes):
        raise SchemaError("distinguished variables must be distinct")

    def go(f: Formula) -> Formula:
        if isinstance(f, Rel):
            if f.name != R:
                return f
            if len(f.args) != len(holes):
                raise SchemaError(
                    f"arity mismatch: {R!r} atom has {len(f.args)} arguments, "
                    f"definition has {len(holes)} holes"
                )
            return substitute_many(defn, dict(zip(holes, f.args)))
        if isinstance(f, Equal):
            return f
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, And):
            return And(go(f.left), go(f.right))
        if isinstance(f, Or):
            return Or(go(f.left), go(f.right))
        if isinstance(f, Exists):
            return Exists(f.var, go(f.body))
        if isinstance(f, Forall):
            return Forall(f.var, go(f.body))
        raise TypeError(f"not a formula: {f!r}")

    return go(Phi)
