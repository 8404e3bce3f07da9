"""Evaluation backends and the compositional/CT clause checkers.

Three layers:

* ``eval_term`` / ``eval_nat``: valuation over the standard naturals.
  Unbounded quantification is undecidable, so ``eval_nat`` is three-valued;
  a definite verdict is only produced when it is logically forced.  The two
  syntactic shapes ``exists x (x < t and psi)`` and
  ``forall x (not(x < t) or psi)`` with a closed bound ``t`` are recognized
  as bounded and evaluated exactly.
* ``eval_finite``: total classical evaluation over an explicit finite model.
* ``check_compositional`` / ``check_ct``: verify a satisfaction oracle
  against the Tarskian clauses, and a sentential truth oracle against the
  compositional truth axioms restricted to a finite depth, reporting every
  violated clause with a witness.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .coding import decode_formula, dot_substitute, encode, numeral
from .complexity import dp
from .syntax import (
    And,
    App,
    Const,
    Equal,
    Exists,
    Forall,
    Formula,
    LogicError,
    Not,
    Or,
    Rel,
    Term,
    Var,
    all_vars,
    free_vars,
    term_vars,
)


class EvalError(LogicError):
    pass


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


def _v_not(v: Verdict) -> Verdict:
    if v is Verdict.TRUE:
        return Verdict.FALSE
    if v is Verdict.FALSE:
        return Verdict.TRUE
    return Verdict.UNKNOWN


def _v_and(a: Verdict, b: Verdict) -> Verdict:
    if a is Verdict.FALSE or b is Verdict.FALSE:
        return Verdict.FALSE
    if a is Verdict.TRUE and b is Verdict.TRUE:
        return Verdict.TRUE
    return Verdict.UNKNOWN


def _v_or(a: Verdict, b: Verdict) -> Verdict:
    if a is Verdict.TRUE or b is Verdict.TRUE:
        return Verdict.TRUE
    if a is Verdict.FALSE and b is Verdict.FALSE:
        return Verdict.FALSE
    return Verdict.UNKNOWN


@dataclass(frozen=True)
class EvalBudget:
    """Search bound for unbounded quantifiers plus a nesting depth cap."""

    search_bound: int = 64
    depth_cap: int = 32

    def __post_init__(self):
        if self.search_bound < 0:
            raise ValueError("search bound must be >= 0")


# ---------------------------------------------------------------------------
# Valuation over the naturals


def eval_term(
    t: Term,
    asn: Mapping[str, int] | None = None,
    funcs: Mapping[str, Callable[..., int]] | None = None,
    consts: Mapping[str, int] | None = None,
) -> int:
    """Standard recursive valuation over N; 0, 1, +, * are builtin."""
    asn = asn or {}
    if isinstance(t, Var):
        if t.name not in asn:
            raise EvalError(f"unbound variable {t.name!r}")
        return asn[t.name]
    if isinstance(t, Const):
        if t.name == "0":
            return 0
        if t.name == "1":
            return 1
        if consts and t.name in consts:
            return consts[t.name]
        raise EvalError(f"constant {t.name!r} has no arithmetic interpretation")
    if isinstance(t, App):
        args = [eval_term(a, asn, funcs, consts) for a in t.args]
        if t.fn == "+":
            return args[0] + args[1]
        if t.fn == "*":
            return args[0] * args[1]
        if funcs and t.fn in funcs:
            return funcs[t.fn](*args)
        raise EvalError(f"function {t.fn!r} has no arithmetic interpretation")
    raise TypeError(f"not a term: {t!r}")


def _bounded_exists(f: Exists) -> tuple[Term, Formula] | None:
    body = f.body
    if isinstance(body, And) and isinstance(body.left, Rel) and body.left.name == "<":
        lo, hi = body.left.args
        if isinstance(lo, Var) and lo.name == f.var and not term_vars(hi):
            return hi, body
    return None


def _bounded_forall(f: Forall) -> tuple[Term, Formula] | None:
    body = f.body
    if (
        isinstance(body, Or)
        and isinstance(body.left, Not)
        and isinstance(body.left.body, Rel)
        and body.left.body.name == "<"
    ):
        lo, hi = body.left.body.args
        if isinstance(lo, Var) and lo.name == f.var and not term_vars(hi):
            return hi, body
    return None


def all_quantifiers_bounded(f: Formula) -> bool:
    """True when every quantifier in f has one of the two bounded shapes."""
    if isinstance(f, (Equal, Rel)):
        return True
    if isinstance(f, Not):
        return all_quantifiers_bounded(f.body)
    if isinstance(f, (And, Or)):
        return all_quantifiers_bounded(f.left) and all_quantifiers_bounded(f.right)
    if isinstance(f, Exists):
        return _bounded_exists(f) is not None and all_quantifiers_bounded(f.body)
    if isinstance(f, Forall):
        return _bounded_forall(f) is not None and all_quantifiers_bounded(f.body)
    raise TypeError(f"not a formula: {f!r}")


def eval_nat(
    f: Formula,
    asn: Mapping[str, int] | None = None,
    budget: EvalBudget = EvalBudget(),
    rels: Mapping[str, Callable[..., bool]] | None = None,
    funcs: Mapping[str, Callable[..., int]] | None = None,
) -> Verdict:
    """Three-valued truth over N.  Definite answers are never wrong.

    ``rels``/``funcs`` interpret declared symbols beyond the arithmetic
    core (fresh predicates such as T, S, D, R and Skolem functions).
    """
    asn = dict(asn or {})

    def go(g: Formula, env: dict[str, int], depth: int) -> Verdict:
        if isinstance(g, Equal):
            return Verdict.TRUE if eval_term(g.left, env, funcs) == eval_term(g.right, env, funcs) else Verdict.FALSE
        if isinstance(g, Rel):
            args = [eval_term(a, env, funcs) for a in g.args]
            if g.name == "<":
                return Verdict.TRUE if args[0] < args[1] else Verdict.FALSE
            if rels and g.name in rels:
                return Verdict.TRUE if rels[g.name](*args) else Verdict.FALSE
            raise EvalError(f"relation {g.name!r} has no arithmetic interpretation")
        if isinstance(g, Not):
            return _v_not(go(g.body, env, depth))
        if isinstance(g, And):
            return _v_and(go(g.left, env, depth), go(g.right, env, depth))
        if isinstance(g, Or):
            return _v_or(go(g.left, env, depth), go(g.right, env, depth))
        if isinstance(g, (Exists, Forall)):
            if depth <= 0:
                return Verdict.UNKNOWN
            pattern = _bounded_exists(g) if isinstance(g, Exists) else _bounded_forall(g)
            if pattern is not None:
                bound_term, body = pattern
                bound = eval_term(bound_term, {}, funcs)
                verdicts = []
                for k in range(bound):
                    env2 = dict(env)
                    env2[g.var] = k
                    verdicts.append(go(body, env2, depth - 1))
                if isinstance(g, Exists):
                    if any(v is Verdict.TRUE for v in verdicts):
                        return Verdict.TRUE
                    if all(v is Verdict.FALSE for v in verdicts):
                        return Verdict.FALSE
                    return Verdict.UNKNOWN
                if any(v is Verdict.FALSE for v in verdicts):
                    return Verdict.FALSE
                if all(v is Verdict.TRUE for v in verdicts):
                    return Verdict.TRUE
                return Verdict.UNKNOWN
            # unbounded: search up to the budget, conclude only from witnesses
            for k in range(budget.search_bound + 1):
                env2 = dict(env)
                env2[g.var] = k
                v = go(g.body, env2, depth - 1)
                if isinstance(g, Exists) and v is Verdict.TRUE:
                    return Verdict.TRUE
                if isinstance(g, Forall) and v is Verdict.FALSE:
                    return Verdict.FALSE
            return Verdict.UNKNOWN
        raise TypeError(f"not a formula: {g!r}")

    missing = free_vars(f) - set(asn)
    if missing:
        raise EvalError(f"unbound variables: {sorted(missing)}")
    return go(f, asn, budget.depth_cap)


# ---------------------------------------------------------------------------
# Finite models


def eval_model_term(t: Term, model, asn: Mapping[str, object]):
    if isinstance(t, Var):
        if t.name not in asn:
            raise EvalError(f"unbound variable {t.name!r}")
        return asn[t.name]
    if isinstance(t, Const):
        if t.name not in model.constants:
            raise EvalError(f"model has no constant {t.name!r}")
        return model.constants[t.name]
    if isinstance(t, App):
        if t.fn not in model.functions:
            raise EvalError(f"model has no function {t.fn!r}")
        args = tuple(eval_model_term(a, model, asn) for a in t.args)
        table = model.functions[t.fn]
        if args not in table:
            raise EvalError(f"function table {t.fn!r} missing entry {args!r}")
        return table[args]
    raise TypeError(f"not a term: {t!r}")


def eval_finite(
    f: Formula,
    model,
    asn: Mapping[str, object] | None = None,
    coded_rels: Mapping[str, set] | None = None,
) -> bool:
    """Total classical evaluation by exhausting the finite universe.

    ``coded_rels`` interprets fresh predicates whose first argument is a
    closed arithmetic term (a Godel-code numeral): that argument is
    evaluated over N and the remaining ones over the model.  This is how
    schema instances such as the satisfaction biconditionals are checked
    against a model's own tables.
    """
    asn = dict(asn or {})

    def go(g: Formula, env: dict) -> bool:
        if isinstance(g, Equal):
            return eval_model_term(g.left, model, env) == eval_model_term(g.right, model, env)
        if isinstance(g, Rel):
            if coded_rels and g.name in coded_rels:
                code = eval_term(g.args[0], {})
                rest = tuple(eval_model_term(a, model, env) for a in g.args[1:])
                return (code,) + rest in coded_rels[g.name]
            if g.name not in model.relations:
                raise EvalError(f"model has no relation {g.name!r}")
            args = tuple(eval_model_term(a, model, env) for a in g.args)
            return args in model.relations[g.name]
        if isinstance(g, Not):
            return not go(g.body, env)
        if isinstance(g, And):
            return go(g.left, env) and go(g.right, env)
        if isinstance(g, Or):
            return go(g.left, env) or go(g.right, env)
        if isinstance(g, Exists):
            return any(go(g.body, {**env, g.var: e}) for e in model.universe)
        if isinstance(g, Forall):
            return all(go(g.body, {**env, g.var: e}) for e in model.universe)
        raise TypeError(f"not a formula: {g!r}")

    return go(f, asn)


# ---------------------------------------------------------------------------
# Compositional satisfaction checking (the CS-minus clauses)


@dataclass(frozen=True)
class Violation:
    clause: str
    code: int
    assignment: tuple
    expected: object
    got: object

    def to_json(self) -> dict:
        return {
            "clause": self.clause,
            "code": str(self.code),
            "assignment": [[v, repr(x)] for v, x in self.assignment],
            "expected": self.expected,
            "got": self.got,
        }


def _clause_label(f: Formula) -> str:
    if isinstance(f, Equal):
        if (
            isinstance(f.left, Var)
            and isinstance(f.right, App)
            and all(isinstance(a, Var) for a in f.right.args)
        ):
            return "function-graph"
        return "atomic"
    if isinstance(f, Rel):
        return "atomic"
    if isinstance(f, Not):
        return "not"
    if isinstance(f, And):
        return "and"
    if isinstance(f, Or):
        return "or"
    if isinstance(f, Exists):
        return "exists"
    if isinstance(f, Forall):
        return "forall"
    raise TypeError(f"not a formula: {f!r}")


def assignment_key(asn: Mapping[str, object]) -> tuple:
    return tuple(sorted(asn.items()))


def build_satisfaction_table(model, fs, variables) -> dict:
    """Exact table {(code, assignment): truth} over the variable support."""
    import itertools

    table = {}
    for f in fs:
        code = encode(f)
        for values in itertools.product(model.universe, repeat=len(variables)):
            asn = dict(zip(variables, values))
            table[(code, assignment_key(asn))] = eval_finite(f, model, asn)
    return table


def check_compositional(S, fs, context, variables=None) -> list[Violation]:
    """Verify the Tarskian clauses of a satisfaction oracle.

    ``S`` is a mapping or callable (code, assignment-key) -> bool.
    ``context`` is a finite model.  Every clause of every formula in ``fs``
    is checked against every assignment of the variable support into the
    universe; violations carry the clause name and the witnessing pair.
    Results are sorted by code then assignment.
    """
    import itertools

    if variables is None:
        vs: set[str] = set()
        for f in fs:
            vs |= all_vars(f)
        variables = tuple(sorted(vs))
    else:
        variables = tuple(variables)

    if callable(S):
        lookup = S
    else:
        def lookup(code, key):
            return S[(code, key)]

    universe = list(context.universe)
    violations: list[Violation] = []
    codes = {id(f): encode(f) for f in fs}
    sub_codes: dict[int, int] = {}

    def sat(g: Formula, key) -> bool:
        c = sub_codes.get(id(g))
        if c is None:
            c = encode(g)
            sub_codes[id(g)] = c
        return lookup(c, key)

    for f in fs:
        code = codes[id(f)]
        label = _clause_label(f)
        for values in itertools.product(universe, repeat=len(variables)):
            asn = dict(zip(variables, values))
            key = assignment_key(asn)
            try:
                got = lookup(code, key)
            except KeyError:
                violations.append(Violation("domain-gap", code, key, None, None))
                continue
            try:
                if isinstance(f, (Equal, Rel)):
                    expected = eval_finite(f, context, asn)
                elif isinstance(f, Not):
                    expected = not sat(f.body, key)
                elif isinstance(f, And):
                    expected = sat(f.left, key) and sat(f.right, key)
                elif isinstance(f, Or):
                    expected = sat(f.left, key) or sat(f.right, key)
                elif isinstance(f, (Exists, Forall)):
                    vals = []
                    for e in universe:
                        beta = dict(asn)
                        beta[f.var] = e
                        vals.append(sat(f.body, assignment_key(beta)))
                    expected = any(vals) if isinstance(f, Exists) else all(vals)
                else:
                    raise TypeError(f"not a formula: {f!r}")
            except KeyError:
                violations.append(Violation("domain-gap", code, key, None, None))
                continue
            if got != expected:
                violations.append(Violation(label, code, key, expected, got))

    violations.sort(key=lambda v: (v.code, v.assignment))
    return violations


# ---------------------------------------------------------------------------
# Compositional truth checking (CT clauses over sentences)


@dataclass
class TruthOracle:
    """Sentential truth oracle: code -> bool, with an explicit domain."""

    values: dict[int, bool]
    dp_bound: int
    numeral_bound: int

    @classmethod
    def exact(cls, sentences, dp_bound: int, numeral_bound: int, budget: EvalBudget = EvalBudget()):
        """Ground truth computed independently by the three-valued evaluator."""
        values = {}
        for s in sentences:
            v = eval_nat(s, {}, budget)
            if v is Verdict.UNKNOWN:
                raise EvalError(f"sentence not decidable within budget: {s!r}")
            values[encode(s)] = v is Verdict.TRUE
        return cls(values, dp_bound, numeral_bound)

    def lookup(self, code: int) -> bool:
        return self.values[code]

    def flipped(self, code: int) -> "TruthOracle":
        values = dict(self.values)
        values[code] = not values[code]
        return TruthOracle(values, self.dp_bound, self.numeral_bound)

    def to_json(self) -> list:
        return [[str(c), v] for c, v in sorted(self.values.items())]

    @classmethod
    def from_json(cls, data, dp_bound: int = 0, numeral_bound: int = 0):
        return cls({int(c): bool(v) for c, v in data}, dp_bound, numeral_bound)


@dataclass(frozen=True)
class CtViolation:
    clause: str
    code: int
    expected: object
    got: object
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "clause": self.clause,
            "code": str(self.code),
            "expected": self.expected,
            "got": self.got,
            "detail": self.detail,
        }


@dataclass
class CtReport:
    violations: list[CtViolation] = field(default_factory=list)
    checked: dict[str, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checked": dict(sorted(self.checked.items())),
            "violations": [v.to_json() for v in self.violations],
            "notes": list(self.notes),
        }


def ct_clause_expected(sentence: Formula, oracle: TruthOracle, b: int):
    """(clause name, expected truth) for the sentence's own CT clause.

    Returns None for shapes no CT clause governs (only closed equalities,
    disjunctions, negations and existentials are covered).
    Raises KeyError when a referenced subsentence is outside the oracle.
    """
    if isinstance(sentence, Equal):
        return "CT1", eval_term(sentence.left, {}) == eval_term(sentence.right, {})
    if isinstance(sentence, Or):
        return "CT2", oracle.lookup(encode(sentence.left)) or oracle.lookup(encode(sentence.right))
    if isinstance(sentence, Not):
        return "CT3", not oracle.lookup(encode(sentence.body))
    if isinstance(sentence, Exists):
        expected = False
        for y in range(b):
            inst = dot_substitute(sentence.body, sentence.var, y)
            if oracle.lookup(encode(inst)):
                expected = True
                break
        return "CT4", expected
    return None


def check_ct(oracle: TruthOracle, x: int, b: int) -> CtReport:
    """Verify CT1-CT4 over the oracle's domain.

    CT4's internal existential is approximated by the numeral bound ``b``
    (the report notes this).  Every sentence in the domain of depth <= x is
    checked against its own clause; violations carry the offending code.
    """
    report = CtReport()
    report.notes.append(f"CT4 existentials checked as a bounded approximation (witnesses < {b})")
    counts: dict[str, int] = {"CT1": 0, "CT2": 0, "CT3": 0, "CT4": 0}
    for code in sorted(oracle.values):
        sentence = decode_formula(code)
        if dp(sentence) > x:
            continue
        try:
            clause = ct_clause_expected(sentence, oracle, b)
        except KeyError:
            report.violations.append(
                CtViolation("domain-gap", code, None, None, "subsentence outside oracle domain")
            )
            continue
        if clause is None:
            continue
        name, expected = clause
        counts[name] += 1
        got = oracle.lookup(code)
        if got != expected:
            report.violations.append(CtViolation(name, code, expected, got))
    report.checked = counts
    report.violations.sort(key=lambda v: (v.code, v.clause))
    return report


def ct_corpus(x: int, b: int) -> list[Formula]:
    """Canonical subformula-closed corpus: all sentences of depth <= x whose
    atoms are equalities over numerals < b, closed under the CT clauses
    (negation, disjunction, and existentials introducing one fresh variable
    per quantifier layer).  Grows steeply in both arguments; (2, 3) is the
    largest pair intended for exhaustive work."""
    memo: dict[tuple[int, int], list[Formula]] = {}

    def formulas(depth: int, nvars: int) -> list[Formula]:
        key = (depth, nvars)
        if key in memo:
            return memo[key]
        args = [numeral(m) for m in range(b)] + [Var(f"v{i}") for i in range(nvars)]
        if depth == 0:
            pool: list[Formula] = [Equal(s, t) for s in args for t in args]
        else:
            prev = formulas(depth - 1, nvars)
            deeper = formulas(depth - 1, nvars + 1)
            pool = list(prev)
            pool.extend(Not(f) for f in prev)
            pool.extend(Or(f, g) for f in prev for g in prev)
            pool.extend(Exists(f"v{nvars}", f) for f in deeper)
            pool = list(dict.fromkeys(pool))
        memo[key] = pool
        return pool

    return [f for f in dict.fromkeys(formulas(x, 0)) if not free_vars(f)]
