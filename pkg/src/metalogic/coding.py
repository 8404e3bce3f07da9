"""Godel numbering, binary numerals, and dot substitution.

Codes are built from a monotone pairing function on naturals:

    pair(a, b) = int of bytes  0x01 | varint(len(A)) | A | B

where A, B are the minimal big-endian byte strings of a and b.  The pairing
is injective, strictly monotone in both arguments, and pair(a, b) is
strictly greater than both a and b, so the code of a proper sub-part is
always strictly smaller than the code of the whole.  0 is not a code, and
decode rejects any integer that is not in the image of encode, naming the
first malformed layer.
"""

from __future__ import annotations

from .syntax import (
    App,
    Const,
    Equal,
    Exists,
    Forall,
    Formula,
    LogicError,
    Not,
    Or,
    And,
    Rel,
    Term,
    Var,
    substitute,
)


class NotACodeError(LogicError):
    pass


# node tags
_TAG_VAR = 0
_TAG_CONST = 1
_TAG_APP = 2
_TAG_EQUAL = 3
_TAG_REL = 4
_TAG_NOT = 5
_TAG_AND = 6
_TAG_OR = 7
_TAG_EXISTS = 8
_TAG_FORALL = 9

_TERM_TAGS = {_TAG_VAR, _TAG_CONST, _TAG_APP}


def _varint(n: int) -> bytes:
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def _read_varint(data: bytes, pos: int) -> tuple[int, int]:
    shift = 0
    value = 0
    start = pos
    while True:
        if pos >= len(data):
            raise NotACodeError("truncated length prefix")
        b = data[pos]
        pos += 1
        value |= (b & 0x7F) << shift
        if not b & 0x80:
            if b == 0 and pos - start > 1:
                raise NotACodeError("non-minimal length prefix")
            return value, pos
        shift += 7


def _to_bytes(n: int) -> bytes:
    if n == 0:
        return b""
    return n.to_bytes((n.bit_length() + 7) // 8, "big")


def pair(a: int, b: int) -> int:
    if a < 0 or b < 0:
        raise ValueError("pairing is defined on naturals")
    ab = _to_bytes(a)
    bb = _to_bytes(b)
    return int.from_bytes(b"\x01" + _varint(len(ab)) + ab + bb, "big")


def unpair(z: int) -> tuple[int, int]:
    if z <= 0:
        raise NotACodeError("0 is not a code")
    data = _to_bytes(z)
    if data[0] != 0x01:
        raise NotACodeError("missing pair sentinel")
    alen, pos = _read_varint(data, 1)
    if pos + alen > len(data):
        raise NotACodeError("declared component exceeds payload")
    ab = data[pos : pos + alen]
    bb = data[pos + alen :]
    if ab[:1] == b"\x00":
        raise NotACodeError("non-minimal first component")
    if bb[:1] == b"\x00":
        raise NotACodeError("non-minimal second component")
    return int.from_bytes(ab, "big"), int.from_bytes(bb, "big")


def _encode_name(name: str) -> int:
    return int.from_bytes(b"\x01" + name.encode("utf-8"), "big")


def _decode_name(n: int) -> str:
    data = _to_bytes(n)
    if not data or data[0] != 0x01:
        raise NotACodeError("malformed symbol name")
    try:
        return data[1:].decode("utf-8")
    except UnicodeDecodeError as e:
        raise NotACodeError("symbol name is not valid utf-8") from e


def _encode_list(codes: list[int]) -> int:
    out = 0
    for c in reversed(codes):
        out = pair(c, out) + 1
    return out


def _decode_list(n: int) -> list[int]:
    out = []
    while n != 0:
        head, n = unpair(n - 1)
        out.append(head)
    return out


def encode_term(t: Term) -> int:
    if isinstance(t, Var):
        return pair(_TAG_VAR, _encode_name(t.name)) + 1
    if isinstance(t, Const):
        return pair(_TAG_CONST, _encode_name(t.name)) + 1
    if isinstance(t, App):
        payload = pair(_encode_name(t.fn), _encode_list([encode_term(a) for a in t.args]))
        return pair(_TAG_APP, payload) + 1
    raise TypeError(f"not a term: {t!r}")


def encode(x: Term | Formula) -> int:
    """Injective code; codes of proper sub-parts are strictly smaller."""
    if isinstance(x, Term):
        return encode_term(x)
    if isinstance(x, Equal):
        return pair(_TAG_EQUAL, pair(encode(x.left), encode(x.right))) + 1
    if isinstance(x, Rel):
        payload = pair(_encode_name(x.name), _encode_list([encode_term(a) for a in x.args]))
        return pair(_TAG_REL, payload) + 1
    if isinstance(x, Not):
        return pair(_TAG_NOT, encode(x.body)) + 1
    if isinstance(x, And):
        return pair(_TAG_AND, pair(encode(x.left), encode(x.right))) + 1
    if isinstance(x, Or):
        return pair(_TAG_OR, pair(encode(x.left), encode(x.right))) + 1
    if isinstance(x, Exists):
        return pair(_TAG_EXISTS, pair(_encode_name(x.var), encode(x.body))) + 1
    if isinstance(x, Forall):
        return pair(_TAG_FORALL, pair(_encode_name(x.var), encode(x.body))) + 1
    raise TypeError(f"not a term or formula: {x!r}")


def _decode_term_strict(c: int) -> Term:
    x = decode(c)
    if not isinstance(x, Term):
        raise NotACodeError("expected a term code inside a term position")
    return x


def decode(c: int) -> Term | Formula:
    """Inverse of encode on its image; raises NotACodeError otherwise."""
    if c <= 0:
        raise NotACodeError(f"{c} is not a code")
    tag, payload = unpair(c - 1)
    if tag == _TAG_VAR:
        return Var(_decode_name(payload))
    if tag == _TAG_CONST:
        return Const(_decode_name(payload))
    if tag == _TAG_APP:
        name_code, args_code = unpair(payload)
        return App(
            _decode_name(name_code),
            tuple(_decode_term_strict(a) for a in _decode_list(args_code)),
        )
    if tag == _TAG_EQUAL:
        left, right = unpair(payload)
        return Equal(_decode_term_strict(left), _decode_term_strict(right))
    if tag == _TAG_REL:
        name_code, args_code = unpair(payload)
        return Rel(
            _decode_name(name_code),
            tuple(_decode_term_strict(a) for a in _decode_list(args_code)),
        )
    if tag == _TAG_NOT:
        return Not(_decode_formula_strict(payload))
    if tag == _TAG_AND:
        left, right = unpair(payload)
        return And(_decode_formula_strict(left), _decode_formula_strict(right))
    if tag == _TAG_OR:
        left, right = unpair(payload)
        return Or(_decode_formula_strict(left), _decode_formula_strict(right))
    if tag == _TAG_EXISTS:
        var_code, body_code = unpair(payload)
        return Exists(_decode_name(var_code), _decode_formula_strict(body_code))
    if tag == _TAG_FORALL:
        var_code, body_code = unpair(payload)
        return Forall(_decode_name(var_code), _decode_formula_strict(body_code))
    raise NotACodeError(f"unknown node tag {tag}")


def _decode_formula_strict(c: int) -> Formula:
    x = decode(c)
    if not isinstance(x, Formula):
        raise NotACodeError("expected a formula code inside a formula position")
    return x


def decode_formula(c: int) -> Formula:
    x = decode(c)
    if not isinstance(x, Formula):
        raise NotACodeError("code denotes a term, not a formula")
    return x


# ---------------------------------------------------------------------------
# Binary numerals

_ZERO = Const("0")
_ONE = Const("1")
_TWO = App("+", (_ONE, _ONE))


def numeral(n: int) -> Term:
    """The binary numeral a0 + 2*(a1 + 2*(... + 2*ak)), a0 least significant."""
    if n < 0:
        raise ValueError("numerals name naturals")
    if n == 0:
        return _ZERO
    if n == 1:
        return _ONE
    bits = []
    m = n
    while m:
        bits.append(m & 1)
        m >>= 1
    digit = {0: _ZERO, 1: _ONE}
    acc = digit[bits[-1]]
    for b in reversed(bits[:-1]):
        acc = App("+", (digit[b], App("*", (_TWO, acc))))
    return acc


def numeral_value(t: Term) -> int:
    """Inverse of numeral; raises on any term not produced by it."""
    if t == _ZERO:
        return 0
    if t == _ONE:
        return 1
    value, shift = 0, 0
    while True:
        if not (isinstance(t, App) and t.fn == "+" and len(t.args) == 2):
            raise LogicError("not a binary numeral")
        bit, rest = t.args
        if bit == _ZERO:
            pass
        elif bit == _ONE:
            value |= 1 << shift
        else:
            raise LogicError("not a binary numeral")
        if not (isinstance(rest, App) and rest.fn == "*" and len(rest.args) == 2):
            raise LogicError("not a binary numeral")
        two, tail = rest.args
        if two != _TWO:
            raise LogicError("not a binary numeral")
        shift += 1
        if tail == _ONE:
            return value | (1 << shift)
        if tail == _ZERO:
            raise LogicError("not a binary numeral")  # leading digit must be 1
        t = tail


def dot_substitute(f: Formula, v: str, n: int) -> Formula:
    """Substitute the binary numeral naming n for v in f."""
    return substitute(f, v, numeral(n))
