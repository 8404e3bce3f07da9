"""First-order syntax: signatures, terms, formulas, parsing, rendering, substitution.

The formula language is desugared: the only connectives are not/and/or and
the quantifiers exists/forall.  Equality is a builtin atom rather than a
declared relation.  The surface syntax is s-expressions; ``->``, ``iff`` and
``exists!`` exist only at the surface and are eliminated by the parser.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping


class LogicError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LogicError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class SignatureError(LogicError):
    pass


class ArityError(LogicError):
    pass


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class Signature:
    """Declared constants, functions and relations.

    ``arith_core`` records whether the ordered-ring core {0, 1, +, *, <} is
    present.  Function arities must be >= 1 (nullary functions are
    constants); relations may be nullary, which gives propositional atoms.
    """

    constants: frozenset[str] = frozenset()
    functions: Mapping[str, int] = field(default_factory=dict)
    relations: Mapping[str, int] = field(default_factory=dict)
    arith_core: bool = False

    def __post_init__(self):
        names = list(self.constants) + list(self.functions) + list(self.relations)
        if len(names) != len(set(names)):
            raise SignatureError("symbol declared more than once")
        for f, a in self.functions.items():
            if a < 1:
                raise SignatureError(f"function {f!r} must have arity >= 1")
        for r, a in self.relations.items():
            if a < 0:
                raise SignatureError(f"relation {r!r} has negative arity")
        if self.arith_core:
            ok = (
                {"0", "1"} <= self.constants
                and self.functions.get("+") == 2
                and self.functions.get("*") == 2
                and self.relations.get("<") == 2
            )
            if not ok:
                raise SignatureError("arithmetic core must be {0, 1, +(2), *(2), <(2)}")

    def with_relation(self, name: str, arity: int) -> "Signature":
        rels = dict(self.relations)
        rels[name] = arity
        return Signature(self.constants, dict(self.functions), rels, self.arith_core)

    def with_function(self, name: str, arity: int) -> "Signature":
        fns = dict(self.functions)
        fns[name] = arity
        return Signature(self.constants, fns, dict(self.relations), self.arith_core)

    def with_constant(self, name: str) -> "Signature":
        return Signature(
            self.constants | {name}, dict(self.functions), dict(self.relations), self.arith_core
        )


def arith_signature() -> Signature:
    """The language of ordered rings: constants 0, 1; +, *; <."""
    return Signature(
        constants=frozenset({"0", "1"}),
        functions={"+": 2, "*": 2},
        relations={"<": 2},
        arith_core=True,
    )


def membership_signature() -> Signature:
    """A single binary relation ``in`` (set membership)."""
    return Signature(relations={"in": 2})


# ---------------------------------------------------------------------------
# Terms and formulas


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    fn: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Equal(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


def app(fn: str, *args: Term) -> App:
    return App(fn, tuple(args))


def rel(name: str, *args: Term) -> Rel:
    return Rel(name, tuple(args))


def implies(a: Formula, b: Formula) -> Or:
    """Desugared material implication: not(a) or b."""
    return Or(Not(a), b)


def iff(a: Formula, b: Formula) -> And:
    """Desugared biconditional: (not(a) or b) and (not(b) or a)."""
    return And(Or(Not(a), b), Or(Not(b), a))


# ---------------------------------------------------------------------------
# Traversals


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Equal):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Rel):
        out: set[str] = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f: Formula) -> set[str]:
    """Every variable occurring in f, free or bound (including binders)."""
    if isinstance(f, Equal):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Rel):
        out: set[str] = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Not):
        return all_vars(f.body)
    if isinstance(f, (And, Or)):
        return all_vars(f.left) | all_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, (And, Or)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from subformulas(f.body)


_V_PATTERN = re.compile(r"^v(\d+)$")


def fresh_var(avoid: set[str]) -> str:
    """Smallest unused name in the v0, v1, ... namespace."""
    used = set()
    for name in avoid:
        m = _V_PATTERN.match(name)
        if m:
            used.add(int(m.group(1)))
    i = 0
    while i in used:
        i += 1
    return f"v{i}"


# ---------------------------------------------------------------------------
# Substitution


def substitute_term(t: Term, v: str, r: Term) -> Term:
    if isinstance(t, Var):
        return r if t.name == v else t
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(substitute_term(a, v, r) for a in t.args))


def substitute(f: Formula, v: str, t: Term) -> Formula:
    """Replace free occurrences of v in f by t, renaming binders to avoid capture.

    When v is not free in f, f is returned unchanged (the identical object).
    Renaming picks the smallest unused v-index, so results are reproducible.
    """
    if v not in free_vars(f):
        return f
    if isinstance(f, Equal):
        return Equal(substitute_term(f.left, v, t), substitute_term(f.right, v, t))
    if isinstance(f, Rel):
        return Rel(f.name, tuple(substitute_term(a, v, t) for a in f.args))
    if isinstance(f, Not):
        return Not(substitute(f.body, v, t))
    if isinstance(f, And):
        return And(substitute(f.left, v, t), substitute(f.right, v, t))
    if isinstance(f, Or):
        return Or(substitute(f.left, v, t), substitute(f.right, v, t))
    if isinstance(f, (Exists, Forall)):
        cls = type(f)
        # v is free in the body here, hence f.var != v.
        if f.var in term_vars(t):
            nv = fresh_var(all_vars(f.body) | term_vars(t) | {v})
            body = substitute(f.body, f.var, Var(nv))
            return cls(nv, substitute(body, v, t))
        return cls(f.var, substitute(f.body, v, t))
    raise TypeError(f"not a formula: {f!r}")


def substitute_many(f: Formula, repl: Mapping[str, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution.

    Routed through fresh temporaries so overlapping variables in the
    replacement terms cannot interfere with one another.
    """
    avoid = all_vars(f) | set(repl)
    for t in repl.values():
        avoid |= term_vars(t)
    temps: dict[str, str] = {}
    for v in sorted(repl):
        tmp = fresh_var(avoid)
        avoid.add(tmp)
        temps[v] = tmp
    out = f
    for v in sorted(repl):
        out = substitute(out, v, Var(temps[v]))
    for v in sorted(repl):
        out = substitute(out, temps[v], repl[v])
    return out


def alpha_equal(f: Formula, g: Formula) -> bool:
    """Structural equality up to renaming of bound variables."""

    def go(a: Formula, b: Formula, env_a: dict[str, int], env_b: dict[str, int], depth: int) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Equal):
            return go_t(a.left, b.left, env_a, env_b) and go_t(a.right, b.right, env_a, env_b)
        if isinstance(a, Rel):
            return (
                a.name == b.name
                and len(a.args) == len(b.args)
                and all(go_t(x, y, env_a, env_b) for x, y in zip(a.args, b.args))
            )
        if isinstance(a, Not):
            return go(a.body, b.body, env_a, env_b, depth)
        if isinstance(a, (And, Or)):
            return go(a.left, b.left, env_a, env_b, depth) and go(
                a.right, b.right, env_a, env_b, depth
            )
        if isinstance(a, (Exists, Forall)):
            ea = dict(env_a)
            eb = dict(env_b)
            ea[a.var] = depth
            eb[b.var] = depth
            return go(a.body, b.body, ea, eb, depth + 1)
        raise TypeError(f"not a formula: {a!r}")

    def go_t(s: Term, t: Term, env_a: dict[str, int], env_b: dict[str, int]) -> bool:
        if type(s) is not type(t):
            return False
        if isinstance(s, Var):
            if s.name in env_a or t.name in env_b:
                return env_a.get(s.name) == env_b.get(t.name)
            return s.name == t.name
        if isinstance(s, Const):
            return s.name == t.name
        return (
            s.fn == t.fn
            and len(s.args) == len(t.args)
            and all(go_t(x, y, env_a, env_b) for x, y in zip(s.args, t.args))
        )

    return go(f, g, {}, {}, 0)


# ---------------------------------------------------------------------------
# S-expression surface syntax

_KEYWORDS = {"=", "not", "and", "or", "->", "iff", "exists", "forall", "exists!"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            tokens.append((c, i))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append((text[i:j], i))
            i = j
    return tokens


class _Reader:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.text = text

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def read(self):
        tok, at = self.next()
        if tok == ")":
            raise ParseError("unexpected ')'", at)
        if tok == "(":
            items = []
            while True:
                nxt = self.peek()
                if nxt is None:
                    raise ParseError("missing ')'", len(self.text))
                if nxt[0] == ")":
                    self.next()
                    return (items, at)
                items.append(self.read())
        return (tok, at)


def _parse_term(node, sig: Signature) -> Term:
    body, at = node
    if isinstance(body, str):
        if body in _KEYWORDS:
            raise ParseError(f"reserved word {body!r} used as a term", at)
        if body in sig.constants:
            return Const(body)
        if body in sig.functions:
            raise ParseError(f"function {body!r} used without arguments", at)
        if body in sig.relations:
            raise ParseError(f"relation {body!r} used as a term", at)
        return Var(body)
    if not body:
        raise ParseError("empty term", at)
    head, head_at = body[0]
    if not isinstance(head, str):
        raise ParseError("term head must be a symbol", head_at)
    if head not in sig.functions:
        raise ParseError(f"undeclared function {head!r}", head_at)
    arity = sig.functions[head]
    args = body[1:]
    if len(args) != arity:
        raise ArityError(f"function {head!r} expects {arity} arguments, got {len(args)}")
    return App(head, tuple(_parse_term(a, sig) for a in args))


def _binder_var(node) -> str:
    body, at = node
    if not isinstance(body, str) or body in _KEYWORDS:
        raise ParseError("quantifier needs a plain variable", at)
    return body


def _parse_formula(node, sig: Signature) -> Formula:
    body, at = node
    if isinstance(body, str):
        # A bare symbol can only be a nullary relation (propositional atom).
        if body in sig.relations and sig.relations[body] == 0:
            return Rel(body, ())
        raise ParseError(f"expected a formula, got {body!r}", at)
    if not body:
        raise ParseError("empty formula", at)
    head, head_at = body[0]
    if not isinstance(head, str):
        raise ParseError("formula head must be a symbol", head_at)
    args = body[1:]

    def need(n: int):
        if len(args) != n:
            raise ParseError(f"{head!r} expects {n} arguments, got {len(args)}", head_at)

    if head == "=":
        need(2)
        return Equal(_parse_term(args[0], sig), _parse_term(args[1], sig))
    if head == "not":
        need(1)
        return Not(_parse_formula(args[0], sig))
    if head == "and":
        need(2)
        return And(_parse_formula(args[0], sig), _parse_formula(args[1], sig))
    if head == "or":
        need(2)
        return Or(_parse_formula(args[0], sig), _parse_formula(args[1], sig))
    if head == "->":
        need(2)
        return implies(_parse_formula(args[0], sig), _parse_formula(args[1], sig))
    if head == "iff":
        need(2)
        return iff(_parse_formula(args[0], sig), _parse_formula(args[1], sig))
    if head == "exists":
        need(2)
        return Exists(_binder_var(args[0]), _parse_formula(args[1], sig))
    if head == "forall":
        need(2)
        return Forall(_binder_var(args[0]), _parse_formula(args[1], sig))
    if head == "exists!":
        need(2)
        v = _binder_var(args[0])
        phi = _parse_formula(args[1], sig)
        z = fresh_var(all_vars(phi) | {v})
        phi_z = substitute(phi, v, Var(z))
        return Exists(v, And(phi, Forall(z, Or(Not(phi_z), Equal(Var(z), Var(v))))))
    if head in sig.relations:
        arity = sig.relations[head]
        if len(args) != arity:
            raise ArityError(f"relation {head!r} expects {arity} arguments, got {len(args)}")
        return Rel(head, tuple(_parse_term(a, sig) for a in args))
    raise ParseError(f"undeclared relation or connective {head!r}", head_at)


def parse(text: str, sig: Signature) -> Formula:
    """Parse surface s-expression syntax into a desugared Formula."""
    reader = _Reader(text)
    node = reader.read()
    leftover = reader.peek()
    if leftover is not None:
        raise ParseError("trailing input after formula", leftover[1])
    return _parse_formula(node, sig)


def parse_term(text: str, sig: Signature) -> Term:
    reader = _Reader(text)
    node = reader.read()
    leftover = reader.peek()
    if leftover is not None:
        raise ParseError("trailing input after term", leftover[1])
    return _parse_term(node, sig)


def render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    return "(" + " ".join([t.fn] + [render_term(a) for a in t.args]) + ")"


def render(f: Formula) -> str:
    """Render to surface syntax; parse(render(f), sig) is structurally f."""
    if isinstance(f, Equal):
        return f"(= {render_term(f.left)} {render_term(f.right)})"
    if isinstance(f, Rel):
        if not f.args:
            return f.name
        return "(" + " ".join([f.name] + [render_term(a) for a in f.args]) + ")"
    if isinstance(f, Not):
        return f"(not {render(f.body)})"
    if isinstance(f, And):
        return f"(and {render(f.left)} {render(f.right)})"
    if isinstance(f, Or):
        return f"(or {render(f.left)} {render(f.right)})"
    if isinstance(f, Exists):
        return f"(exists {f.var} {render(f.body)})"
    if isinstance(f, Forall):
        return f"(forall {f.var} {render(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# JSON AST mirror


def term_to_json(t: Term) -> dict:
    if isinstance(t, Var):
        return {"kind": "var", "name": t.name}
    if isinstance(t, Const):
        return {"kind": "const", "name": t.name}
    return {"kind": "apply", "fn": t.fn, "args": [term_to_json(a) for a in t.args]}


def to_json(f: Formula) -> dict:
    if isinstance(f, Equal):
        return {"kind": "equal", "left": term_to_json(f.left), "right": term_to_json(f.right)}
    if isinstance(f, Rel):
        return {"kind": "rel", "name": f.name, "args": [term_to_json(a) for a in f.args]}
    if isinstance(f, Not):
        return {"kind": "not", "body": to_json(f.body)}
    if isinstance(f, And):
        return {"kind": "and", "left": to_json(f.left), "right": to_json(f.right)}
    if isinstance(f, Or):
        return {"kind": "or", "left": to_json(f.left), "right": to_json(f.right)}
    if isinstance(f, Exists):
        return {"kind": "exists", "var": f.var, "body": to_json(f.body)}
    if isinstance(f, Forall):
        return {"kind": "forall", "var": f.var, "body": to_json(f.body)}
    raise TypeError(f"not a formula: {f!r}")


def term_from_json(obj: dict) -> Term:
    kind = obj["kind"]
    if kind == "var":
        return Var(obj["name"])
    if kind == "const":
        return Const(obj["name"])
    if kind == "apply":
        return App(obj["fn"], tuple(term_from_json(a) for a in obj["args"]))
    raise ParseError(f"unknown term kind {kind!r}")


def from_json(obj: dict) -> Formula:
    kind = obj["kind"]
    if kind == "equal":
        return Equal(term_from_json(obj["left"]), term_from_json(obj["right"]))
    if kind == "rel":
        return Rel(obj["name"], tuple(term_from_json(a) for a in obj["args"]))
    if kind == "not":
        return Not(from_json(obj["body"]))
    if kind == "and":
        return And(from_json(obj["left"]), from_json(obj["right"]))
    if kind == "or":
        return Or(from_json(obj["left"]), from_json(obj["right"]))
    if kind == "exists":
        return Exists(obj["var"], from_json(obj["body"]))
    if kind == "forall":
        return Forall(obj["var"], from_json(obj["body"]))
    raise ParseError(f"unknown formula kind {kind!r}")


def to_json_text(f: Formula) -> str:
    return json.dumps(to_json(f), sort_keys=True, separators=(",", ":"))


def from_json_text(text: str) -> Formula:
    return from_json(json.loads(text))


# ---------------------------------------------------------------------------
# Sizes


def term_size(t: Term) -> int:
    if isinstance(t, (Var, Const)):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def size(f: Formula) -> int:
    """Total node count, terms included."""
    if isinstance(f, Equal):
        return 1 + term_size(f.left) + term_size(f.right)
    if isinstance(f, Rel):
        return 1 + sum(term_size(a) for a in f.args)
    if isinstance(f, Not):
        return 1 + size(f.body)
    if isinstance(f, (And, Or)):
        return 1 + size(f.left) + size(f.right)
    if isinstance(f, (Exists, Forall)):
        return 1 + size(f.body)
    raise TypeError(f"not a formula: {f!r}")


def logical_size(f: Formula) -> int:
    """Number of connectives and quantifiers (the nodes that dp counts)."""
    if isinstance(f, (Equal, Rel)):
        return 0
    if isinstance(f, Not):
        return 1 + logical_size(f.body)
    if isinstance(f, (And, Or)):
        return 1 + logical_size(f.left) + logical_size(f.right)
    if isinstance(f, (Exists, Forall)):
        return 1 + logical_size(f.body)
    raise TypeError(f"not a formula: {f!r}")
