"""Executable first-order metamathematics toolkit.

Subpackages by concern: syntax (terms/formulas/parsing), complexity
(alternation ranks, dp/pdp), coding (Godel numbers, binary numerals),
schemas (axiom schema instance generators), evaluate (N and finite-model
semantics, compositional/CT checkers), models (finite structures),
forcing (conditions, the forcing relation, generic construction), proofs
(Hilbert kernel), cli (batch front end).
"""

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
    Signature,
    Term,
    Var,
    arith_signature,
    free_vars,
    parse,
    render,
    substitute,
)

__all__ = [
    "And",
    "App",
    "Const",
    "Equal",
    "Exists",
    "Forall",
    "Formula",
    "LogicError",
    "Not",
    "Or",
    "Rel",
    "Signature",
    "Term",
    "Var",
    "arith_signature",
    "free_vars",
    "parse",
    "render",
    "substitute",
]
