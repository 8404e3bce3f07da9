"""Exhaustive enumeration of terms and formulas by total node count.

Used by the brute-force corpora: every term/formula over the given
signature and variable pool whose node count is exactly (or at most) the
requested size, in a deterministic order.
"""

from __future__ import annotations

from .syntax import (
    And,
    App,
    Const,
    Equal,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Rel,
    Signature,
    Term,
    Var,
)


class SizedEnumerator:
    """Enumerates terms/formulas of bounded node count over a fixed pool.

    The variable pool doubles as the set of binders: quantifiers range over
    the same names, so generated formulas may shadow.  Order is by size,
    then by a fixed construction order, and is stable across runs.
    """

    def __init__(self, sig: Signature, variables: tuple[str, ...]):
        self.sig = sig
        self.variables = tuple(variables)
        self._terms_cache: dict[int, tuple[Term, ...]] = {}
        self._formulas_cache: dict[int, tuple[Formula, ...]] = {}

    def terms_of_size(self, n: int) -> tuple[Term, ...]:
        if n in self._terms_cache:
            return self._terms_cache[n]
        out: list[Term] = []
        if n == 1:
            out.extend(Const(c) for c in sorted(self.sig.constants))
            out.extend(Var(v) for v in self.variables)
        elif n > 1:
            for fn, arity in sorted(self.sig.functions.items()):
                for args in self._arg_tuples(n - 1, arity, self.terms_of_size):
                    out.append(App(fn, args))
        result = tuple(out)
        self._terms_cache[n] = result
        return result

    def _arg_tuples(self, budget: int, arity: int, of_size):
        if arity == 0:
            if budget == 0:
                yield ()
            return
        if arity == 1:
            for t in of_size(budget):
                yield (t,)
            return
        for first_size in range(1, budget - (arity - 1) + 1):
            for first in of_size(first_size):
                for rest in self._arg_tuples(budget - first_size, arity - 1, of_size):
                    yield (first,) + rest

    def formulas_of_size(self, n: int) -> tuple[Formula, ...]:
        if n in self._formulas_cache:
            return self._formulas_cache[n]
        out: list[Formula] = []
        if n >= 1:
            # atoms: equality then declared relations
            for args in self._arg_tuples(n - 1, 2, self.terms_of_size):
                out.append(Equal(*args))
            for r, arity in sorted(self.sig.relations.items()):
                for args in self._arg_tuples(n - 1, arity, self.terms_of_size):
                    out.append(Rel(r, args))
            for f in self.formulas_of_size(n - 1):
                out.append(Not(f))
            for v in self.variables:
                for f in self.formulas_of_size(n - 1):
                    out.append(Exists(v, f))
            for v in self.variables:
                for f in self.formulas_of_size(n - 1):
                    out.append(Forall(v, f))
            for left_size in range(1, n - 1):
                for left in self.formulas_of_size(left_size):
                    for right in self.formulas_of_size(n - 1 - left_size):
                        out.append(And(left, right))
            for left_size in range(1, n - 1):
                for left in self.formulas_of_size(left_size):
                    for right in self.formulas_of_size(n - 1 - left_size):
                        out.append(Or(left, right))
        result = tuple(out)
        self._formulas_cache[n] = result
        return result

    def formulas_up_to(self, max_size: int):
        for n in range(1, max_size + 1):
            yield from self.formulas_of_size(n)

    def terms_up_to(self, max_size: int):
        for n in range(1, max_size + 1):
            yield from self.terms_of_size(n)

    def count_formulas(self, max_size: int) -> int:
        return sum(len(self.formulas_of_size(n)) for n in range(1, max_size + 1))


def enumerator(sig: Signature, variables: tuple[str, ...]) -> SizedEnumerator:
    return SizedEnumerator(sig, variables)
