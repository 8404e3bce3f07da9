"""Quantifier-alternation depth: sigma/pi level classification, dp and pdp.

The mutual grammar (level 0 is empty on both sides):

    Sigma_{n+1} := AT | exists v Sigma_{n+1} | Sigma_{n+1} and Sigma_{n+1}
                 | Sigma_{n+1} or Sigma_{n+1} | not Pi_{n+1} | forall v Pi_n
    Pi_{n+1}    := AT | forall v Pi_{n+1}    | Pi_{n+1} and Pi_{n+1}
                 | Pi_{n+1} or Pi_{n+1}      | not Sigma_{n+1} | exists v Sigma_n

Both hierarchies are cumulative, so membership is determined by the least
level, computed in one bottom-up pass.  The last grammar clause on each side
is vacuous at n = 0 (it refers to the empty level-0 class).
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import And, App, Const, Equal, Exists, Forall, Formula, Not, Or, Rel, Term, Var


@dataclass(frozen=True)
class RankPair:
    """Least n >= 1 with membership in Sigma_n (resp. Pi_n)."""

    sigma: int
    pi: int


def rank(f: Formula) -> RankPair:
    if isinstance(f, (Equal, Rel)):
        return RankPair(1, 1)
    if isinstance(f, Not):
        r = rank(f.body)
        return RankPair(r.pi, r.sigma)
    if isinstance(f, (And, Or)):
        a = rank(f.left)
        b = rank(f.right)
        return RankPair(max(a.sigma, b.sigma), max(a.pi, b.pi))
    if isinstance(f, Exists):
        r = rank(f.body)
        return RankPair(r.sigma, r.sigma + 1)
    if isinstance(f, Forall):
        r = rank(f.body)
        return RankPair(r.pi + 1, r.pi)
    raise TypeError(f"not a formula: {f!r}")


def in_sigma(f: Formula, n: int) -> bool:
    if n < 0:
        raise ValueError("level must be >= 0")
    return n >= 1 and rank(f).sigma <= n


def in_pi(f: Formula, n: int) -> bool:
    if n < 0:
        raise ValueError("level must be >= 0")
    return n >= 1 and rank(f).pi <= n


def in_delta(f: Formula, n: int) -> bool:
    r = rank(f)
    return n >= 1 and r.sigma <= n and r.pi <= n


def dp(f: Formula) -> int:
    """Maximal number of connectives and quantifiers on a branch."""
    if isinstance(f, (Equal, Rel)):
        return 0
    if isinstance(f, Not):
        return dp(f.body) + 1
    if isinstance(f, (And, Or)):
        return max(dp(f.left), dp(f.right)) + 1
    if isinstance(f, (Exists, Forall)):
        return dp(f.body) + 1
    raise TypeError(f"not a formula: {f!r}")


def pdp_term(t: Term) -> int:
    if isinstance(t, (Var, Const)):
        return 0
    if isinstance(t, App):
        return max(pdp_term(a) for a in t.args) + 1
    raise TypeError(f"not a term: {t!r}")


def pdp(x: Formula | Term) -> int:
    """Like dp, but terms are unravelled into the branch length."""
    if isinstance(x, Term):
        return pdp_term(x)
    if isinstance(x, Equal):
        return max(pdp_term(x.left), pdp_term(x.right))
    if isinstance(x, Rel):
        if not x.args:
            return 0
        return max(pdp_term(a) for a in x.args)
    if isinstance(x, Not):
        return pdp(x.body) + 1
    if isinstance(x, (And, Or)):
        return max(pdp(x.left), pdp(x.right)) + 1
    if isinstance(x, (Exists, Forall)):
        return pdp(x.body) + 1
    raise TypeError(f"not a formula or term: {x!r}")
