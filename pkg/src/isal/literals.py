"""Text form of data values, shared by the CLI and the example files.

    b:true  b:false
    i:-42
    f:2.5  f:1e-3  f:inf  f:-inf  f:nan
    s:"escaped \\"text\\""        (JSON string escapes)
"""

from __future__ import annotations

import json
import math
import re

from .cdll import Datum, Tag


class LiteralError(ValueError):
    pass


_LITERAL = re.compile(
    r"""
    b:(?:true|false)
  | i:[+-]?\d+
  | f:[+-]?(?:inf|nan|(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | s:"(?:[^"\\]|\\.)*"
    """,
    re.VERBOSE,
)
_SEP = re.compile(r"[\s,]*")


def format_datum(d: Datum) -> str:
    if d.tag is Tag.BOOL:
        return "b:true" if d.value else "b:false"
    if d.tag is Tag.INT:
        return f"i:{d.value}"
    if d.tag is Tag.FLOAT:
        v = d.value
        if math.isnan(v):
            return "f:nan"
        return f"f:{v!r}"
    return "s:" + json.dumps(d.value, ensure_ascii=False)


def parse_datum(text: str) -> Datum:
    values = parse_literals(text)
    if len(values) != 1:
        raise LiteralError(f"expected one literal, got {text!r}")
    return values[0]


def _convert(lit: str) -> Datum:
    kind, body = lit[0], lit[2:]
    if kind == "b":
        return Datum.b(body == "true")
    if kind == "i":
        try:
            return Datum.i(int(body))
        except OverflowError as exc:
            raise LiteralError(str(exc)) from None
    if kind == "f":
        if not re.search(r"[.eE]|inf|nan", body):
            raise LiteralError(f"float literal needs a point or exponent: {lit!r}")
        return Datum.f(float(body))
    return Datum.s(json.loads(body))


def parse_literals(text: str) -> list[Datum]:
    """Parse a whitespace- or comma-separated list of literals."""
    out = []
    pos = _SEP.match(text, 0).end()
    while pos < len(text):
        m = _LITERAL.match(text, pos)
        end = m.end() if m else pos
        if not m or (end < len(text) and not (text[end].isspace() or text[end] == ",")):
            word = text[pos:].split(None, 1)[0]
            raise LiteralError(f"bad literal {word!r} at offset {pos}")
        out.append(_convert(m.group()))
        pos = _SEP.match(text, end).end()
    return out
