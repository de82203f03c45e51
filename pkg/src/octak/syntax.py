"""Parsers for the command-line text formats.

Field names::

    Q | Q(i) | Q(sqrt(D)) | Q(sqrt(D),+) | Q(sqrt(D),-)

Field elements (the generator must belong to the field)::

    element := ['+'|'-'] term (('+'|'-') term)*
    term    := rational ['*' gen] | gen
    rational:= INT ['/' INT]
    gen     := 'i' | 'sqrt(' INT ')'

Matrices are row-major JSON-style arrays whose items are field elements,
quoted or bare: ``[[1/2],[1/2]]`` or ``[["3/5+4/5*i", "0"]]``.

Sign patterns are rows over ``+ 0 -`` separated by commas: ``+0,++``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .field import FieldDescriptor, FieldElement, FieldKind

_FIELD_RE = re.compile(r"^\s*Q\s*(?:\(\s*(?:(?P<i>i)|sqrt\s*\(\s*(?P<d>\d+)\s*\)\s*(?:,\s*(?P<s>[+-])\s*)?)\))?\s*$")


def parse_field(text: str) -> FieldDescriptor:
    m = _FIELD_RE.match(text)
    if not m:
        raise ParseError(f"unknown field {text!r}; expected Q, Q(i) or Q(sqrt(D)[,+|-])", text, 0)
    if m.group("i"):
        return FieldDescriptor.gaussian()
    if m.group("d"):
        try:
            return FieldDescriptor.real_quadratic(int(m.group("d")), -1 if m.group("s") == "-" else 1)
        except ValueError as exc:
            raise ParseError(str(exc), text, m.start("d")) from None
    return FieldDescriptor.rationals()


class _Scanner:
    def __init__(self, text: str, offset: int = 0, source: str | None = None):
        self.text = text
        self.pos = 0
        self.offset = offset
        self.source = text if source is None else source

    def error(self, msg: str, pos: int | None = None) -> ParseError:
        return ParseError(msg, self.source, self.offset + (self.pos if pos is None else pos))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, s: str) -> bool:
        self.skip_ws()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.take(s):
            found = self.peek() or "end of input"
            raise self.error(f"expected {s!r}, found {found!r}")

    def integer(self) -> int:
        self.skip_ws()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            raise self.error("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_gen(sc: _Scanner, F: FieldDescriptor) -> bool:
    """Consume a generator if present; return True when one was read."""
    start = sc.pos
    if sc.take("sqrt"):
        sc.expect("(")
        d = sc.integer()
        sc.expect(")")
        if F.kind is not FieldKind.REAL_QUADRATIC or d != F.d:
            raise sc.error(f"sqrt({d}) is not the generator of {F}", start)
        return True
    if sc.take("i"):
        if F.kind is not FieldKind.GAUSSIAN:
            raise sc.error(f"i is not an element of {F}", start)
        return True
    return False


def _parse_element(sc: _Scanner, F: FieldDescriptor) -> FieldElement:
    a = Fraction(0)
    b = Fraction(0)
    first = True
    while True:
        sign = 1
        if sc.take("-"):
            sign = -1
        elif not sc.take("+") and not first:
            break
        first = False
        sc.skip_ws()
        if sc.peek().isdigit():
            q = Fraction(sc.integer())
            if sc.take("/"):
                den_pos = sc.pos
                den = sc.integer()
                if den == 0:
                    raise sc.error("zero denominator", den_pos)
                q /= den
            if sc.take("*"):
                if not _parse_gen(sc, F):
                    raise sc.error("expected i or sqrt(D) after '*'")
                b += sign * q
            else:
                a += sign * q
        elif _parse_gen(sc, F):
            b += sign
        else:
            found = sc.peek() or "end of input"
            raise sc.error(f"expected a number, i or sqrt(D), found {found!r}")
        if sc.at_end() or sc.peek() not in "+-":
            break
    return FieldElement(a, b, F)


def parse_element(text: str, F: FieldDescriptor, *, offset: int = 0, source: str | None = None) -> FieldElement:
    sc = _Scanner(text, offset, source)
    x = _parse_element(sc, F)
    if not sc.at_end():
        raise sc.error(f"unexpected {sc.peek()!r}")
    return x


def parse_matrix(text: str, F: FieldDescriptor) -> list[list[FieldElement]]:
    """Row-major matrix literal; returns a list of rows."""
    sc = _Scanner(text)
    sc.expect("[")
    rows: list[list[FieldElement]] = []
    if not sc.take("]"):
        while True:
            rows.append(_parse_row(sc, F, text))
            if sc.take("]"):
                break
            sc.expect(",")
    if not sc.at_end():
        raise sc.error(f"trailing input {sc.peek()!r}")
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ParseError(f"ragged matrix: row lengths {sorted(widths)}", text, 0)
    return rows


def _parse_row(sc: _Scanner, F: FieldDescriptor, source: str) -> list[FieldElement]:
    sc.expect("[")
    row: list[FieldElement] = []
    if sc.take("]"):
        return row
    while True:
        sc.skip_ws()
        if sc.take('"'):
            start = sc.pos
            end = sc.text.find('"', start)
            if end < 0:
                raise sc.error("unterminated string")
            sc.pos = end + 1
        else:
            start = sc.pos
            while sc.pos < len(sc.text) and sc.text[sc.pos] not in ",]":
                sc.pos += 1
            end = sc.pos
        item = sc.text[start:end]
        if not item.strip():
            raise sc.error("empty matrix entry", start)
        row.append(parse_element(item, F, offset=start, source=source))
        if sc.take("]"):
            return row
        sc.expect(",")


_SIGNS = {"+": 1, "0": 0, "-": -1}


def parse_signs(text: str) -> tuple[int, ...]:
    bad = [k for k, ch in enumerate(text) if ch not in _SIGNS]
    if bad:
        raise ParseError(f"sign vectors use only '+', '0', '-', found {text[bad[0]]!r}", text, bad[0])
    return tuple(_SIGNS[ch] for ch in text)


def format_signs(v) -> str:
    return "".join("+" if s > 0 else "-" if s < 0 else "0" for s in v)


def parse_sign_pattern(text: str) -> list[tuple[int, ...]]:
    """Rows of a sign matrix, e.g. ``+0,++``."""
    rows = []
    pos = 0
    for chunk in text.split(","):
        stripped = chunk.strip()
        lead = len(chunk) - len(chunk.lstrip())
        try:
            rows.append(parse_signs(stripped))
        except ParseError as exc:
            raise ParseError(str(exc).split(": ", 1)[1], text, pos + lead + exc.column - 1) from None
        pos += len(chunk) + 1
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ParseError(f"sign pattern must be square, got {n} rows of lengths {[len(r) for r in rows]}", text, 0)
    return rows
