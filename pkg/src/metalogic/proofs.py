"""A minimal Hilbert-style proof checker.

Implication is not a primitive connective, so an arrow below always means
its desugaring not(a) or b.  The axiom schemes (instances must be supplied
with the proof, so checking never searches):

    P1  phi -> (psi -> phi)
    P2  (phi -> (psi -> chi)) -> ((phi -> psi) -> (phi -> chi))
    P3  (not phi -> not psi) -> (psi -> phi)
    Q1  forall x phi -> phi[x := t]          (t substitutable for x)
    Q2  phi -> forall x phi                  (x not free in phi)
    Q3  forall x (phi -> psi) -> (forall x phi -> forall x psi)
    Q4  phi[x := t] -> exists x phi          (t substitutable for x)
    E1  t = t
    E2  s = t -> (phi[x := s] -> phi[x := t])  (both substitutable)

Rules: modus ponens (from a and a -> b infer b) and generalization (from
phi infer forall x phi, provided x is not free in any premise).  A proof
from a premise set may additionally cite any premise verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .syntax import (
    Equal,
    Exists,
    Forall,
    Formula,
    LogicError,
    Not,
    Or,
    Term,
    Var,
    free_vars,
    implies,
    parse,
    parse_term,
    substitute,
    term_vars,
)


class ProofError(LogicError):
    pass


AXIOM_SCHEMES = ("P1", "P2", "P3", "Q1", "Q2", "Q3", "Q4", "E1", "E2")


def substitutable(phi: Formula, v: str, t: Term) -> bool:
    """No free occurrence of v in phi sits under a binder of a variable of t."""
    from .syntax import And as AndF, Or as OrF, Rel

    def go(f: Formula) -> bool:
        if isinstance(f, (Equal, Rel)):
            return True
        if isinstance(f, Not):
            return go(f.body)
        if isinstance(f, (AndF, OrF)):
            return go(f.left) and go(f.right)
        if isinstance(f, (Exists, Forall)):
            if f.var == v:
                return True
            if f.var in term_vars(t) and v in free_vars(f.body):
                return False
            return go(f.body)
        raise TypeError(f"not a formula: {f!r}")

    return go(phi)


def _subst_checked(phi: Formula, v: str, t: Term) -> Formula:
    if not substitutable(phi, v, t):
        raise ProofError(f"term {t!r} is not substitutable for {v!r} (variable capture)")
    return substitute(phi, v, t)


def axiom_instance(scheme: str, args: dict) -> Formula:
    """Build the scheme instance named by the justification data."""

    def formula(key: str) -> Formula:
        if key not in args:
            raise ProofError(f"scheme {scheme} needs argument {key!r}")
        return args[key]

    def term(key: str) -> Term:
        if key not in args:
            raise ProofError(f"scheme {scheme} needs argument {key!r}")
        return args[key]

    def var(key: str) -> str:
        if key not in args:
            raise ProofError(f"scheme {scheme} needs argument {key!r}")
        return args[key]

    if scheme == "P1":
        phi, psi = formula("phi"), formula("psi")
        return implies(phi, implies(psi, phi))
    if scheme == "P2":
        phi, psi, chi = formula("phi"), formula("psi"), formula("chi")
        return implies(
            implies(phi, implies(psi, chi)),
            implies(implies(phi, psi), implies(phi, chi)),
        )
    if scheme == "P3":
        phi, psi = formula("phi"), formula("psi")
        return implies(implies(Not(phi), Not(psi)), implies(psi, phi))
    if scheme == "Q1":
        phi, v, t = formula("phi"), var("var"), term("term")
        return implies(Forall(v, phi), _subst_checked(phi, v, t))
    if scheme == "Q2":
        phi, v = formula("phi"), var("var")
        if v in free_vars(phi):
            raise ProofError(f"Q2 requires {v!r} not free in the formula")
        return implies(phi, Forall(v, phi))
    if scheme == "Q3":
        phi, psi, v = formula("phi"), formula("psi"), var("var")
        return implies(
            Forall(v, implies(phi, psi)),
            implies(Forall(v, phi), Forall(v, psi)),
        )
    if scheme == "Q4":
        phi, v, t = formula("phi"), var("var"), term("term")
        return implies(_subst_checked(phi, v, t), Exists(v, phi))
    if scheme == "E1":
        t = term("term")
        return Equal(t, t)
    if scheme == "E2":
        phi, v = formula("phi"), var("var")
        s, t = term("left"), term("right")
        return implies(
            Equal(s, t),
            implies(_subst_checked(phi, v, s), _subst_checked(phi, v, t)),
        )
    raise ProofError(f"unknown axiom scheme {scheme!r}")


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    rule: str  # axiom | premise | mp | gen
    scheme: str | None = None
    args: dict | None = None
    refs: tuple[int, ...] = ()
    var: str | None = None


@dataclass
class Proof:
    lines: list[ProofLine] = field(default_factory=list)

    @property
    def conclusion(self) -> Formula:
        if not self.lines:
            raise ProofError("empty proof")
        return self.lines[-1].formula

    @classmethod
    def from_json(cls, data, sig) -> "Proof":
        lines = []
        for entry in data["lines"]:
            args = None
            if entry.get("args"):
                args = {}
                for key, value in entry["args"].items():
                    if key in ("term", "left", "right"):
                        args[key] = parse_term(value, sig)
                    elif key == "var":
                        args[key] = value
                    else:
                        args[key] = parse(value, sig)
            lines.append(
                ProofLine(
                    formula=parse(entry["formula"], sig),
                    rule=entry["rule"],
                    scheme=entry.get("scheme"),
                    args=args,
                    refs=tuple(entry.get("refs", ())),
                    var=entry.get("var"),
                )
            )
        return cls(lines)


@dataclass(frozen=True)
class ProofVerdict:
    valid: bool
    line: int | None = None  # 1-based index of the first invalid line
    reason: str | None = None

    def to_json(self) -> dict:
        out = {"valid": self.valid}
        if not self.valid:
            out["line"] = self.line
            out["reason"] = self.reason
        return out


def check_proof(proof: Proof, premises: Sequence[Formula] = ()) -> ProofVerdict:
    """Validate every line; the premises-empty case is pure provability."""
    premises = list(premises)
    premise_free = set()
    for p in premises:
        premise_free |= free_vars(p)

    for number, line in enumerate(proof.lines, start=1):
        def bad(reason: str) -> ProofVerdict:
            return ProofVerdict(False, number, reason)

        if line.rule == "axiom":
            if line.scheme not in AXIOM_SCHEMES:
                return bad(f"unknown scheme {line.scheme!r}")
            try:
                expected = axiom_instance(line.scheme, dict(line.args or {}))
            except ProofError as e:
                return bad(str(e))
            if expected != line.formula:
                return bad(f"formula is not the stated {line.scheme} instance")
        elif line.rule == "premise":
            if line.formula not in premises:
                return bad("formula is not among the premises")
        elif line.rule == "mp":
            if len(line.refs) != 2:
                return bad("modus ponens needs two line references")
            i, j = line.refs
            if not (1 <= i < number and 1 <= j < number):
                return bad("reference to a non-earlier line")
            antecedent = proof.lines[i - 1].formula
            implication = proof.lines[j - 1].formula
            if implication != Or(Not(antecedent), line.formula):
                return bad("cited lines do not match modus ponens")
        elif line.rule == "gen":
            if len(line.refs) != 1:
                return bad("generalization needs one line reference")
            (i,) = line.refs
            if not 1 <= i < number:
                return bad("reference to a non-earlier line")
            if line.var is None:
                return bad("generalization needs a variable")
            if line.var in premise_free:
                return bad(f"eigenvariable {line.var!r} is free in a premise")
            if line.formula != Forall(line.var, proof.lines[i - 1].formula):
                return bad("formula is not the generalization of the cited line")
        else:
            return bad(f"unknown rule {line.rule!r}")

    if not proof.lines:
        return ProofVerdict(False, None, "empty proof")
    return ProofVerdict(True)
