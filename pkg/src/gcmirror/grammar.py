"""Tokenizer and recursive-descent parser shared by the scalar and form grammars.

Grammar (``^`` is a power after a scalar and a wedge between generators)::

    expr    := ['-'] term (('+' | '-') term)*
    term    := power (('*' | '/' | '^') power)*
    power   := primary ['^' INT]
    primary := NUMBER | 'i' | 'varpi' | 'E' '[' INT (',' INT)* ']'
             | IDENT | '(' expr ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0, line_offset: int = 0):
        line = text.count("\n", 0, pos) + 1 + line_offset
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.column = col


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()\[\],]))")


@dataclass
class Token:
    kind: str
    value: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        out.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class Algebra:
    """Callbacks that give meaning to parsed atoms."""

    def number(self, value: Fraction) -> Any: ...
    def imaginary(self) -> Any: ...
    def varpi(self) -> Any: ...
    def mode(self, m: list[int]) -> Any: ...
    def ident(self, name: str) -> Any: ...  # None if unknown
    def is_generator(self, name: str) -> bool: return False
    def add(self, a, b): return a + b
    def neg(self, a): return -a
    def mul(self, a, b): return a * b
    def power(self, a, k: int): return a ** k
    def divide(self, a, b): ...


class _Parser:
    def __init__(self, text: str, alg: Algebra, line_offset: int = 0):
        self.text = text
        self.alg = alg
        self.toks = tokenize(text)
        self.i = 0
        self.line_offset = line_offset

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok.pos, self.line_offset)

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str) -> Token:
        t = self.peek()
        if t.value != value or t.kind == "end":
            self.error(f"expected {value!r}")
        return self.take()

    def parse(self):
        if self.peek().kind == "end":
            self.error("empty expression")
        v = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected token {self.peek().value!r}")
        return v

    def expr(self):
        negate = False
        if self.peek().value in "+-" and self.peek().kind == "op":
            negate = self.take().value == "-"
        v = self.term()
        if negate:
            v = self.alg.neg(v)
        while self.peek().kind == "op" and self.peek().value in "+-":
            op = self.take().value
            w = self.term()
            v = self.alg.add(v, self.alg.neg(w) if op == "-" else w)
        return v

    def term(self):
        v = self.power()
        while self.peek().kind == "op" and self.peek().value in "*/^":
            op = self.take()
            w = self.power()
            if op.value == "/":
                try:
                    v = self.alg.divide(v, w)
                except (ValueError, ZeroDivisionError) as exc:
                    self.error(str(exc), op)
            else:
                v = self.alg.mul(v, w)
        return v

    def power(self):
        start = self.peek()
        v = self.primary()
        if self.peek().value == "^" and self.peek(1).kind == "num":
            self.take()
            k = int(self.take().value)
            try:
                v = self.alg.power(v, k)
            except ValueError as exc:
                self.error(str(exc), start)
        return v

    def primary(self):
        t = self.peek()
        if t.kind == "num":
            self.take()
            return self.alg.number(Fraction(int(t.value)))
        if t.kind == "op" and t.value == "(":
            self.take()
            v = self.expr()
            self.expect(")")
            return v
        if t.kind == "op" and t.value == "-":
            self.take()
            return self.alg.neg(self.power())
        if t.kind == "ident":
            self.take()
            if t.value == "i":
                return self.alg.imaginary()
            if t.value == "varpi":
                return self.alg.varpi()
            if t.value == "E" and self.peek().value == "[":
                self.take()
                modes = [self.signed_int()]
                while self.peek().value == ",":
                    self.take()
                    modes.append(self.signed_int())
                self.expect("]")
                try:
                    return self.alg.mode(modes)
                except ValueError as exc:
                    self.error(str(exc), t)
            v = self.alg.ident(t.value)
            if v is None:
                self.error(f"unknown name {t.value!r}", t)
            return v
        if t.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected token {t.value!r}")

    def signed_int(self) -> int:
        sign = 1
        if self.peek().value == "-":
            self.take()
            sign = -1
        t = self.peek()
        if t.kind != "num":
            self.error("expected an integer")
        self.take()
        return sign * int(t.value)


def parse_with(text: str, alg: Algebra, line_offset: int = 0):
    return _Parser(text, alg, line_offset).parse()


class PolyAlgebra(Algebra):
    def __init__(self, ctx):
        from .scalar import PolyScalar
        self.ctx = ctx
        self.P = PolyScalar

    def number(self, value):
        return self.P.const(self.ctx, value)

    def imaginary(self):
        from .scalar import I
        return self.P.const(self.ctx, I)

    def varpi(self):
        if not self.ctx.periodic:
            raise ValueError("varpi requires a periodic context")
        return self.P.varpi(self.ctx)

    def mode(self, m):
        return self.P.mode(self.ctx, m)

    def ident(self, name):
        if name in self.ctx.names:
            return self.P.var(self.ctx, name)
        return None

    def divide(self, a, b):
        if not b.is_constant() or b.is_zero():
            raise ValueError("can only divide by a nonzero constant")
        return a / b.constant_value()


def parse_poly(text: str, ctx, line_offset: int = 0):
    """Parse a polynomial string in the given context."""
    try:
        return parse_with(text, PolyAlgebra(ctx), line_offset)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), text, 0, line_offset) from None

