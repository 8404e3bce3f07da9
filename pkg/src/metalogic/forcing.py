"""Arithmetized forcing over finite binary conditions, and the staged
generic-set construction with truth-bit decoding.

Set formulas are ordinary formulas over the arithmetic core extended with a
single unary predicate X; the atom X(t) reads "val(t) is a member".  The
forcing relation follows the five defining clauses (first-order atom,
membership atom, negation, disjunction, existential); conjunctions and
universals are first normalized through De Morgan into that fragment.

Exact decisions are restricted to bit-bounded formulas: every membership
argument closed and every quantifier in one of the two bounded shapes.
Such a formula's forcing status depends only on the bits below its bound,
which makes the negation clause's quantifier over all extensions, and the
existential witness search, finitely exhaustible.  Budget mode handles the
rest with sound unknowns.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .evaluate import EvalError, all_quantifiers_bounded, eval_term
from .syntax import (
    And,
    Equal,
    Exists,
    Forall,
    Formula,
    LogicError,
    Not,
    Or,
    Rel,
    Signature,
    Var,
    arith_signature,
    render,
    subformulas,
    term_vars,
)

SET_PREDICATE = "X"

Condition = tuple[int, ...]


class ForcingError(LogicError):
    pass


def set_signature() -> Signature:
    """Arithmetic core plus the unary membership predicate X."""
    return arith_signature().with_relation(SET_PREDICATE, 1)


class Status(enum.Enum):
    FORCED = "forced"
    NOT_FORCED = "not-forced"
    UNKNOWN = "unknown"


def parse_condition(text: str) -> Condition:
    if not all(c in "01" for c in text):
        raise ForcingError(f"condition must be a 0/1 string, got {text!r}")
    return tuple(int(c) for c in text)


def condition_str(s: Condition) -> str:
    return "".join(str(b) for b in s)


def bit_bound(f: Formula) -> int | None:
    """1 + the largest membership index, when that is syntactically finite.

    Requires every X-argument to be a closed term and every quantifier to
    match one of the two bounded shapes; returns None otherwise.
    """
    if not all_quantifiers_bounded(f):
        return None
    bound = 0
    for g in subformulas(f):
        if isinstance(g, Rel) and g.name == SET_PREDICATE:
            (arg,) = g.args
            if term_vars(arg):
                return None
            bound = max(bound, eval_term(arg, {}) + 1)
    return bound


def canonical(f: Formula) -> Formula:
    """Rewrite into the not/or/exists fragment the forcing clauses cover.

    Conjunction and universal quantification are eliminated by De Morgan:
    a and b -> not(not a or not b), forall v b -> not(exists v not b).
    """
    if isinstance(f, (Equal, Rel)):
        return f
    if isinstance(f, Not):
        return Not(canonical(f.body))
    if isinstance(f, Or):
        return Or(canonical(f.left), canonical(f.right))
    if isinstance(f, And):
        return Not(Or(Not(canonical(f.left)), Not(canonical(f.right))))
    if isinstance(f, Exists):
        return Exists(f.var, canonical(f.body))
    if isinstance(f, Forall):
        return Not(Exists(f.var, Not(canonical(f.body))))
    raise TypeError(f"not a formula: {f!r}")


def _exists_cutoff(var: str, body: Formula) -> Formula | None:
    """Bound term of a bounded existential, before or after De Morgan."""
    probe = body
    if isinstance(probe, Not) and isinstance(probe.body, Or) and isinstance(probe.body.left, Not):
        probe = probe.body.left.body
        guard = probe
    elif isinstance(probe, And):
        guard = probe.left
    else:
        return None
    if isinstance(guard, Rel) and guard.name == "<":
        lo, hi = guard.args
        if lo == Var(var) and not term_vars(hi):
            return hi
    return None


def _extensions(s: Condition, max_len: int):
    """All t with s a prefix of t and |t| <= max_len, shortest and
    lexicographically least first; includes s itself."""
    yield s
    if len(s) < max_len:
        for bit in (0, 1):
            yield from _extensions(s + (bit,), max_len)


def _strict_extensions_ordered(s: Condition, max_len: int):
    """Strict extensions ordered by length, then lexicographically."""
    import itertools

    for length in range(len(s) + 1, max_len + 1):
        for tail in itertools.product((0, 1), repeat=length - len(s)):
            yield s + tail


class _Engine:
    """Forcing recursion over canonical formulas, memoized by value."""

    def __init__(self, exact: bool, horizon: int, witness_bound: int):
        self.exact = exact
        self.horizon = horizon  # length cap for extension exhaustion
        self.witness_bound = witness_bound  # witness cap for unbounded exists
        self.memo: dict = {}

    def status(self, s: Condition, f: Formula, env: tuple) -> Status:
        key = (s, f, env)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._compute(s, f, dict(env))
        self.memo[key] = out
        return out

    def _compute(self, s: Condition, f: Formula, env: dict) -> Status:
        if isinstance(f, Rel) and f.name == SET_PREDICATE:
            n = eval_term(f.args[0], env)
            return Status.FORCED if n < len(s) and s[n] == 1 else Status.NOT_FORCED
        if isinstance(f, (Equal, Rel)):
            if isinstance(f, Equal):
                holds = eval_term(f.left, env) == eval_term(f.right, env)
            elif f.name == "<":
                holds = eval_term(f.args[0], env) < eval_term(f.args[1], env)
            else:
                raise ForcingError(f"relation {f.name!r} is not part of a set formula")
            return Status.FORCED if holds else Status.NOT_FORCED
        env_key = tuple(sorted(env.items()))
        if isinstance(f, Not):
            max_len = max(self.horizon, len(s))
            saw_unknown = False
            for t in _extensions(s, max_len):
                sub = self.status(t, f.body, env_key)
                if sub is Status.FORCED:
                    return Status.NOT_FORCED
                if sub is Status.UNKNOWN:
                    saw_unknown = True
            if self.exact and not saw_unknown:
                return Status.FORCED
            return Status.UNKNOWN
        if isinstance(f, Or):
            left = self.status(s, f.left, env_key)
            right = self.status(s, f.right, env_key)
            if Status.FORCED in (left, right):
                return Status.FORCED
            if left is Status.NOT_FORCED and right is Status.NOT_FORCED:
                return Status.NOT_FORCED
            return Status.UNKNOWN
        if isinstance(f, Exists):
            cutoff_term = _exists_cutoff(f.var, f.body)
            if cutoff_term is not None:
                cutoff = eval_term(cutoff_term, {})
            elif self.exact:
                raise ForcingError("existential without a syntactic bound in exact mode")
            else:
                cutoff = self.witness_bound + 1
            saw_unknown = cutoff_term is None
            for n in range(cutoff):
                env2 = dict(env)
                env2[f.var] = n
                sub = self.status(s, f.body, tuple(sorted(env2.items())))
                if sub is Status.FORCED:
                    return Status.FORCED
                if sub is Status.UNKNOWN:
                    saw_unknown = True
            return Status.UNKNOWN if saw_unknown else Status.NOT_FORCED
        raise TypeError(f"not a set formula: {f!r}")


def forces(
    s: Sequence[int],
    f: Formula,
    mode: str = "exact",
    budget: int = 64,
) -> Status:
    """Decide whether the condition forces the formula.

    Exact mode requires a bit-bounded formula and always returns FORCED or
    NOT_FORCED.  Budget mode returns FORCED or UNKNOWN; definite answers
    are always correct relative to the forcing definition.
    """
    s = tuple(s)
    if any(b not in (0, 1) for b in s):
        raise ForcingError("condition bits must be 0 or 1")
    if mode == "exact":
        b = bit_bound(f)
        if b is None:
            raise ForcingError("exact mode requires a bit-bounded formula")
        engine = _Engine(exact=True, horizon=max(b, len(s)), witness_bound=0)
        out = engine.status(s, canonical(f), ())
        if out is Status.UNKNOWN:
            raise ForcingError("internal: exact mode produced unknown")
        return out
    if mode == "budget":
        engine = _Engine(exact=False, horizon=len(s) + budget, witness_bound=budget)
        out = engine.status(s, canonical(f), ())
        return out if out is Status.FORCED else Status.UNKNOWN
    raise ForcingError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Staged generic construction


@dataclass(frozen=True)
class Stage:
    index: int
    parity: str
    k: int
    before: Condition
    after: Condition
    justification: str
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "parity": self.parity,
            "k": self.k,
            "before": condition_str(self.before),
            "after": condition_str(self.after),
            "justification": self.justification,
            "detail": self.detail,
        }


@dataclass
class StageTrace:
    stages: list[Stage] = field(default_factory=list)

    @property
    def final(self) -> Condition:
        return self.stages[-1].after if self.stages else ()

    def to_json(self) -> dict:
        return {"stages": [st.to_json() for st in self.stages], "final": condition_str(self.final)}

    @classmethod
    def from_json(cls, data) -> "StageTrace":
        stages = [
            Stage(
                st["index"],
                st["parity"],
                st["k"],
                parse_condition(st["before"]),
                parse_condition(st["after"]),
                st["justification"],
                st.get("detail", ""),
            )
            for st in data["stages"]
        ]
        return cls(stages)


def least_forcing_extension(s: Condition, f: Formula) -> Condition | None:
    """The length-then-lexicographically least strict extension forcing f,
    or None when no extension forces it.

    If any extension at all forces f, one of length at most
    max(bit_bound(f), |s|+1) does, so the search is complete.
    """
    b = bit_bound(f)
    if b is None:
        raise ForcingError("generic construction requires bit-bounded formulas")
    max_len = max(b, len(s) + 1)
    for t in _strict_extensions_ordered(s, max_len):
        if forces(t, f) is Status.FORCED:
            return t
    return None


def build_generic(
    stages: int,
    phis: Sequence[Formula],
    xis: Sequence[Formula],
    truth: Callable[[Formula], bool],
) -> StageTrace:
    """Run the staged construction.

    Even stage 2k extends the condition to the least strict extension
    forcing phis[k] (recording when no extension forces it); odd stage
    2k+1 appends the truth bit of xis[k].
    """
    trace = StageTrace()
    s: Condition = ()
    for j in range(stages):
        k = j // 2
        if j % 2 == 0:
            if k >= len(phis):
                raise ForcingError(f"phi enumeration exhausted at stage {j}")
            f = phis[k]
            t = least_forcing_extension(s, f)
            if t is None:
                trace.stages.append(
                    Stage(j, "even", k, s, s, "no-extension-forces", render(f))
                )
            else:
                trace.stages.append(Stage(j, "even", k, s, t, "forced", render(f)))
                s = t
        else:
            if k >= len(xis):
                raise ForcingError(f"xi enumeration exhausted at stage {j}")
            bit = 1 if truth(xis[k]) else 0
            t = s + (bit,)
            trace.stages.append(
                Stage(j, "odd", k, s, t, "appended-truth-bit", render(xis[k]))
            )
            s = t
    return trace


def decode_truth(trace: StageTrace) -> list[bool]:
    """Read the truth bits back off the odd stages."""
    out = []
    prev: Condition = ()
    for st in trace.stages:
        if st.before != prev:
            raise ForcingError(f"stage {st.index}: conditions do not chain")
        if st.parity == "odd":
            if len(st.after) != len(st.before) + 1 or st.after[: len(st.before)] != st.before:
                raise ForcingError(f"stage {st.index}: odd stage must append exactly one bit")
            out.append(st.after[-1] == 1)
        else:
            if st.after[: len(st.before)] != st.before:
                raise ForcingError(f"stage {st.index}: even stage must extend the condition")
        prev = st.after
    return out


@dataclass(frozen=True)
class GenericityEntry:
    k: int
    settled: str
    stage: int
    verified: bool

    def to_json(self) -> dict:
        return {"k": self.k, "settled": self.settled, "stage": self.stage, "verified": self.verified}


def audit_genericity(trace: StageTrace, phis: Sequence[Formula]) -> list[GenericityEntry]:
    """Certify that the final condition settles every processed phi.

    A stage that extended forces phi positively; a stage that recorded
    "no extension forces" makes the negation forced, and monotonicity
    carries both to the final condition.  Each entry is re-verified by
    exhaustion against the final condition.
    """
    final = trace.final
    out = []
    for st in trace.stages:
        if st.parity != "even":
            continue
        f = phis[st.k]
        if st.justification == "forced":
            verified = forces(final, f) is Status.FORCED
            out.append(GenericityEntry(st.k, "positive", st.index, verified))
        else:
            verified = forces(final, Not(f)) is Status.FORCED
            out.append(GenericityEntry(st.k, "negative", st.index, verified))
        if not verified:
            raise ForcingError(f"phi {st.k} is unsettled at the final condition")
    return out
