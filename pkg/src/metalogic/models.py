"""Finite first-order structures: membership models, adjunctive-set checks,
disjoint unions, automorphisms, definability and bounded theory comparison.

Formula size in this module is the logical size: the number of connectives
and quantifiers (the same nodes dp counts).  Atoms have size 0.  Definable-
element search runs a semantic dynamic program: formulas are grouped by
their full truth table over a fixed three-variable assignment space, so the
reported least defining sizes are exact within that fragment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .coding import encode
from .complexity import in_sigma
from .evaluate import eval_finite
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
    Var,
    free_vars,
    membership_signature,
    parse,
    render,
)


class GuardError(LogicError):
    pass


MAX_UNIVERSE = 8
MAX_FORMULA_SIZE = 7


@dataclass
class FiniteModel:
    """Explicit universe with total relation/function/constant tables."""

    universe: tuple
    relations: dict[str, frozenset]
    functions: dict[str, dict]
    constants: dict[str, object]
    signature: Signature

    def __post_init__(self):
        self.universe = tuple(self.universe)
        elements = set(self.universe)
        if len(elements) != len(self.universe):
            raise LogicError("universe has repeated elements")
        self.relations = {r: frozenset(map(tuple, ts)) for r, ts in self.relations.items()}
        for r, arity in self.signature.relations.items():
            if r not in self.relations:
                raise LogicError(f"missing table for relation {r!r}")
            for t in self.relations[r]:
                if len(t) != arity or not set(t) <= elements:
                    raise LogicError(f"bad tuple {t!r} in relation {r!r}")
        for f, arity in self.signature.functions.items():
            if f not in self.functions:
                raise LogicError(f"missing table for function {f!r}")
            table = self.functions[f]
            for args in itertools.product(self.universe, repeat=arity):
                if args not in table:
                    raise LogicError(f"function {f!r} not total: missing {args!r}")
                if table[args] not in elements:
                    raise LogicError(f"function {f!r} maps outside the universe")
        for c in self.signature.constants:
            if c not in self.constants or self.constants[c] not in elements:
                raise LogicError(f"missing or bad constant {c!r}")

    def is_relational(self) -> bool:
        return not self.signature.functions and not self.signature.constants

    def to_json(self) -> dict:
        return {
            "universe": list(self.universe),
            "relations": {r: sorted(map(list, ts)) for r, ts in sorted(self.relations.items())},
            "functions": {
                f: sorted([list(k) + [v] for k, v in t.items()])
                for f, t in sorted(self.functions.items())
            },
            "constants": dict(sorted(self.constants.items())),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteModel":
        relations = {r: frozenset(map(tuple, ts)) for r, ts in data.get("relations", {}).items()}
        functions = {
            f: {tuple(row[:-1]): row[-1] for row in rows}
            for f, rows in data.get("functions", {}).items()
        }
        constants = dict(data.get("constants", {}))
        rel_arities = {}
        for r, ts in data.get("relations", {}).items():
            rel_arities[r] = len(ts[0]) if ts else 2
        fn_arities = {f: (len(rows[0]) - 1 if rows else 1) for f, rows in data.get("functions", {}).items()}
        sig = Signature(
            constants=frozenset(constants),
            functions=fn_arities,
            relations=rel_arities,
        )
        return cls(tuple(data["universe"]), relations, functions, constants, sig)


# ---------------------------------------------------------------------------
# Hereditarily finite membership models (Ackermann-coded)


def build_hf(rank: int) -> FiniteModel:
    """Membership model on the hereditarily finite sets of rank < rank.

    Elements are Ackermann codes: x is a member of y iff bit x of y is set.
    """
    if not 1 <= rank <= 4:
        raise GuardError("rank must be between 1 and 4")
    size = 1
    for _ in range(rank - 1):
        size = 2 ** size
    universe = tuple(range(size))
    edges = frozenset((x, y) for x in universe for y in universe if (y >> x) & 1)
    return FiniteModel(universe, {"in": edges}, {}, {}, membership_signature())


def as_sentences(sig: Signature | None = None) -> dict[str, Formula]:
    """The adjunctive-set axioms and extensionality as parsed formulas."""
    sig = sig or membership_signature()
    return {
        "as1": parse("(exists x (forall y (not (in y x))))", sig),
        "as2": parse(
            "(forall x (forall y (exists z (forall w "
            "(iff (in w z) (or (in w x) (= w y)))))))",
            sig,
        ),
        "ext": parse(
            "(forall x (forall y (-> (forall z (iff (in z x) (in z y))) (= x y))))",
            sig,
        ),
    }


@dataclass
class ASReport:
    as1: bool
    as1_witness: object
    as2: bool
    as2_detail: object
    ext: bool
    ext_counterexample: object

    def to_json(self) -> dict:
        return {
            "as1": {"holds": self.as1, "witness": self.as1_witness},
            "as2": {"holds": self.as2, "detail": self.as2_detail},
            "ext": {"holds": self.ext, "counterexample": self.ext_counterexample},
        }


def check_as(model: FiniteModel) -> ASReport:
    """Check AS1/AS2/extensionality directly over the membership table."""
    if "in" not in model.relations:
        raise LogicError("model has no membership relation 'in'")
    edges = model.relations["in"]
    members = {y: {x for (x, yy) in edges if yy == y} for y in model.universe}

    as1_witness = None
    for x in model.universe:
        if not members[x]:
            as1_witness = x
            break

    as2_holds = True
    as2_detail = None
    for x in model.universe:
        for y in model.universe:
            want = members[x] | {y}
            for z in model.universe:
                if members[z] == want:
                    break
            else:
                as2_holds = False
                as2_detail = {"x": x, "y": y}
                break
        if not as2_holds:
            break

    ext_holds = True
    ext_counterexample = None
    for x in model.universe:
        for y in model.universe:
            if x != y and members[x] == members[y]:
                ext_holds = False
                ext_counterexample = {"x": x, "y": y}
                break
        if not ext_holds:
            break

    return ASReport(as1_witness is not None, as1_witness, as2_holds, as2_detail, ext_holds, ext_counterexample)


def disjoint_union(a: FiniteModel, b: FiniteModel) -> FiniteModel:
    """Tagged union of two relational models over the same signature."""
    if not a.is_relational() or not b.is_relational():
        raise LogicError("disjoint union is defined for relational models only")
    if a.signature.relations != b.signature.relations:
        raise LogicError("signatures differ")

    def tag(prefix, e):
        return f"{prefix}:{e}"

    universe = tuple(tag("a", e) for e in a.universe) + tuple(tag("b", e) for e in b.universe)
    relations = {}
    for r in a.signature.relations:
        tuples = {tuple(tag("a", e) for e in t) for t in a.relations[r]}
        tuples |= {tuple(tag("b", e) for e in t) for t in b.relations[r]}
        relations[r] = frozenset(tuples)
    return FiniteModel(universe, relations, {}, {}, a.signature)


# ---------------------------------------------------------------------------
# Automorphisms


@dataclass
class AutomorphismReport:
    maps: list[dict]
    fixpoint_free_exists: bool

    def to_json(self) -> dict:
        return {
            "count": len(self.maps),
            "fixpointFreeExists": self.fixpoint_free_exists,
            "maps": [dict(sorted(m.items(), key=lambda kv: str(kv[0]))) for m in self.maps],
        }


def automorphisms(model: FiniteModel) -> AutomorphismReport:
    """All table-preserving permutations, by brute force (universe <= 8)."""
    if len(model.universe) > MAX_UNIVERSE:
        raise GuardError(f"universe larger than {MAX_UNIVERSE}")
    universe = sorted(model.universe, key=str)
    found = []
    fixpoint_free = False
    for image in itertools.permutations(universe):
        perm = dict(zip(universe, image))
        ok = True
        for name, value in model.constants.items():
            if perm[value] != value:
                ok = False
                break
        if ok:
            for fname, table in model.functions.items():
                for args, value in table.items():
                    if table[tuple(perm[x] for x in args)] != perm[value]:
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            for rname, tuples in model.relations.items():
                for t in itertools.product(universe, repeat=model.signature.relations[rname]):
                    if (t in tuples) != (tuple(perm[x] for x in t) in tuples):
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            found.append(perm)
            if all(perm[x] != x for x in universe):
                fixpoint_free = True
    return AutomorphismReport(found, fixpoint_free)


# ---------------------------------------------------------------------------
# Definable elements (semantic dynamic programming)

_POOL = ("v0", "v1", "v2")


class _ClassSpace:
    """Truth tables over all assignments of a 3-variable pool into U."""

    def __init__(self, model: FiniteModel):
        self.model = model
        self.universe = list(model.universe)
        n = len(self.universe)
        self.n = n
        self.assignments = list(itertools.product(range(n), repeat=len(_POOL)))
        self.index = {a: i for i, a in enumerate(self.assignments)}
        self.full_mask = (1 << len(self.assignments)) - 1
        # groups[j] = list of assignment-index blocks that differ only in v_j
        self.groups = []
        for j in range(len(_POOL)):
            blocks = {}
            for i, a in enumerate(self.assignments):
                key = a[:j] + a[j + 1 :]
                blocks.setdefault(key, []).append(i)
            self.groups.append(list(blocks.values()))

    def quantify(self, table: int, j: int, existential: bool) -> int:
        out = 0
        for block in self.groups[j]:
            bits = [(table >> i) & 1 for i in block]
            value = any(bits) if existential else all(bits)
            if value:
                for i in block:
                    out |= 1 << i
        return out

    def term_tables(self):
        """Closure of term value-tables under the model's functions.

        Returns a list of (values tuple, varset frozenset, representative
        term), in deterministic discovery order.
        """
        model = self.model
        items = []
        seen = set()

        def add(values, varset, term):
            key = (values, varset)
            if key not in seen:
                seen.add(key)
                items.append((values, varset, term))
                return True
            return False

        for j, v in enumerate(_POOL):
            values = tuple(a[j] for a in self.assignments)
            add(values, frozenset({v}), Var(v))
        for cname in sorted(model.constants):
            e = self.universe.index(model.constants[cname])
            add(tuple(e for _ in self.assignments), frozenset(), Const(cname))

        changed = True
        while changed:
            changed = False
            snapshot = list(items)
            for fname in sorted(model.signature.functions):
                arity = model.signature.functions[fname]
                table = model.functions[fname]
                for combo in itertools.product(snapshot, repeat=arity):
                    values = tuple(
                        self.universe.index(
                            table[tuple(self.universe[c[0][i]] for c in combo)]
                        )
                        for i in range(len(self.assignments))
                    )
                    varset = frozenset().union(*(c[1] for c in combo))
                    term = App(fname, tuple(c[2] for c in combo))
                    if add(values, varset, term):
                        changed = True
        return items

    def atom_classes(self):
        """(table, varset, formula) for every atom over the term closure."""
        out = []
        terms = self.term_tables()
        for (va, sa, ta), (vb, sb, tb) in itertools.product(terms, repeat=2):
            table = 0
            for i in range(len(self.assignments)):
                if va[i] == vb[i]:
                    table |= 1 << i
            out.append((table, sa | sb, Equal(ta, tb)))
        for rname in sorted(self.model.signature.relations):
            arity = self.model.signature.relations[rname]
            tuples = self.model.relations[rname]
            for combo in itertools.product(terms, repeat=arity):
                table = 0
                for i in range(len(self.assignments)):
                    args = tuple(self.universe[c[0][i]] for c in combo)
                    if args in tuples:
                        table |= 1 << i
                out.append((table, frozenset().union(*(c[1] for c in combo)) if combo else frozenset(), Rel(rname, tuple(c[2] for c in combo))))
        return out


@dataclass
class DefinabilityReport:
    size_bound: int
    definitions: dict
    undefined: list
    pairs: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "sizeBound": self.size_bound,
            "definitions": {
                str(e): {"size": s, "formula": render(f)} for e, (s, f) in sorted(self.definitions.items(), key=lambda kv: str(kv[0]))
            },
            "undefined": sorted(map(str, self.undefined)),
            "pairs": [[str(c), str(e)] for c, e in self.pairs],
        }


def definable_elements(model: FiniteModel, size_bound: int) -> DefinabilityReport:
    """Least logical size of a defining formula per element, or none.

    Searches all formulas with one free variable (v0) of logical size at
    most ``size_bound``, over a three-variable pool, grouping formulas by
    truth table so the search is exact within that fragment.  Every
    reported definition is re-checked with the evaluator.
    """
    if len(model.universe) > MAX_UNIVERSE:
        raise GuardError(f"universe larger than {MAX_UNIVERSE}")
    if size_bound > MAX_FORMULA_SIZE:
        raise GuardError(f"size bound larger than {MAX_FORMULA_SIZE}")

    space = _ClassSpace(model)
    universe = space.universe

    # classes: key -> (size, formula); levels: size -> list of (key, formula)
    best: dict[tuple[int, frozenset], tuple[int, Formula]] = {}
    levels: list[list[tuple[tuple[int, frozenset], Formula]]] = []

    def admit(level_bucket, table, varset, formula):
        key = (table, varset)
        if key not in best:
            best[key] = (len(levels), formula)
            level_bucket.append((key, formula))

    bucket: list = []
    for table, varset, formula in space.atom_classes():
        admit(bucket, table, varset, formula)
    levels.append(bucket)

    for target in range(1, size_bound + 1):
        bucket = []
        prev = levels[target - 1]
        # negation
        for (table, varset), formula in prev:
            admit(bucket, table ^ space.full_mask, varset, Not(formula))
        # quantifiers
        for j, v in enumerate(_POOL):
            for (table, varset), formula in prev:
                e_table = space.quantify(table, j, existential=True)
                admit(bucket, e_table, varset - {v}, Exists(v, formula))
                a_table = space.quantify(table, j, existential=False)
                admit(bucket, a_table, varset - {v}, Forall(v, formula))
        # binary connectives
        for left_size in range(0, target - 1):
            right_size = target - 1 - left_size
            for (t1, s1), f1 in levels[left_size]:
                for (t2, s2), f2 in levels[right_size]:
                    admit(bucket, t1 & t2, s1 | s2, And(f1, f2))
                    admit(bucket, t1 | t2, s1 | s2, Or(f1, f2))
        levels.append(bucket)
        if len(best) > 200_000:
            raise GuardError("definability search space too large")

    definitions: dict = {}
    pairs = []
    for sz, bucket in enumerate(levels):
        for (table, varset), formula in bucket:
            if varset != {"v0"}:
                continue
            satisfiers = [
                universe[a[0]]
                for i, a in enumerate(space.assignments)
                if a[1] == 0 and a[2] == 0 and (table >> i) & 1
            ]
            if len(satisfiers) != 1:
                continue
            element = satisfiers[0]
            if element in definitions:
                continue
            check = [e for e in universe if eval_finite(formula, model, {"v0": e})]
            if check != [element]:
                raise LogicError("internal definability check failed")
            definitions[element] = (sz, formula)
            pairs.append((encode(formula), element))

    undefined = [e for e in universe if e not in definitions]
    return DefinabilityReport(size_bound, definitions, undefined, pairs)


# ---------------------------------------------------------------------------
# Bounded elementary-equivalence comparison


def _sentences_up_to(sig: Signature, pool: tuple[str, ...], max_logical_size: int):
    """All formulas (tracked with free sets) by logical size; yields sentences."""
    consts = [Const(c) for c in sorted(sig.constants)]
    if sig.functions:
        raise GuardError("bounded theory comparison supports relational signatures")
    terms = [(Var(v), frozenset({v})) for v in pool] + [(c, frozenset()) for c in consts]

    atoms = []
    for (ta, sa), (tb, sb) in itertools.product(terms, repeat=2):
        atoms.append((Equal(ta, tb), sa | sb))
    for rname in sorted(sig.relations):
        arity = sig.relations[rname]
        for combo in itertools.product(terms, repeat=arity):
            atoms.append(
                (Rel(rname, tuple(c[0] for c in combo)), frozenset().union(*(c[1] for c in combo)) if combo else frozenset())
            )

    levels = [list(dict.fromkeys(atoms))]
    yield from (f for f, fv in levels[0] if not fv)
    for target in range(1, max_logical_size + 1):
        bucket = []
        prev = levels[target - 1]
        for f, fv in prev:
            bucket.append((Not(f), fv))
        for v in pool:
            for f, fv in prev:
                bucket.append((Exists(v, f), fv - {v}))
                bucket.append((Forall(v, f), fv - {v}))
        for left_size in range(0, target - 1):
            for f1, s1 in levels[left_size]:
                for f2, s2 in levels[target - 1 - left_size]:
                    bucket.append((And(f1, f2), s1 | s2))
                    bucket.append((Or(f1, f2), s1 | s2))
        bucket = list(dict.fromkeys(bucket))
        levels.append(bucket)
        yield from (f for f, fv in bucket if not fv)


@dataclass
class EquivalenceReport:
    equivalent: bool
    level: int
    size_bound: int
    distinguishing: Formula | None = None
    truth_in_a: bool | None = None
    truth_in_b: bool | None = None

    def to_json(self) -> dict:
        out = {"equivalent": self.equivalent, "level": self.level, "sizeBound": self.size_bound}
        if self.distinguishing is not None:
            out["distinguishing"] = render(self.distinguishing)
            out["truthInA"] = self.truth_in_a
            out["truthInB"] = self.truth_in_b
        return out


def n_equiv(
    a: FiniteModel,
    b: FiniteModel,
    level: int,
    size_bound: int,
    pool: tuple[str, ...] = ("v0", "v1"),
) -> EquivalenceReport:
    """Compare truth of all sigma-level sentences up to the size bound.

    Returns the first differing sentence in enumeration order, if any.
    """
    if len(a.universe) > MAX_UNIVERSE or len(b.universe) > MAX_UNIVERSE:
        raise GuardError(f"universe larger than {MAX_UNIVERSE}")
    if size_bound > MAX_FORMULA_SIZE:
        raise GuardError(f"size bound larger than {MAX_FORMULA_SIZE}")
    if a.signature.relations != b.signature.relations:
        raise LogicError("signatures differ")
    for sentence in _sentences_up_to(a.signature, pool, size_bound):
        if not in_sigma(sentence, level):
            continue
        ta = eval_finite(sentence, a)
        tb = eval_finite(sentence, b)
        if ta != tb:
            return EquivalenceReport(False, level, size_bound, sentence, ta, tb)
    return EquivalenceReport(True, level, size_bound)
