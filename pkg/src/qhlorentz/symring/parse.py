"""Parser for the canonical text form, e.g. ``C*z^2 - 1/4*D^2``.

Grammar (``^`` and ``**`` both mean power, exponents are signed integers)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom (('^' | '**') ['-'] INT)?
    atom   := INT | NAME | '(' expr ')'
"""

from __future__ import annotations

import re

from ..errors import ParseError, UnknownVariable
from .core import Expr, VarSet

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("int", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, text: str, vs: VarSet):
        self.text = text
        self.vs = vs
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok != ("op", op):
            raise ParseError(f"expected {op!r} in {self.text!r}")

    def expr(self):
        value = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, value = self.take()
            if kind != "int":
                raise ParseError(f"integer exponent expected in {self.text!r}")
            exp = sign * value
            return base ** exp
        return base

    def atom(self):
        kind, value = self.take()
        if kind == "int":
            return self.vs.const(value)
        if kind == "name":
            try:
                return self.vs.symbol(value)
            except UnknownVariable:
                raise UnknownVariable(f"unknown symbol {value!r} in {self.text!r}") from None
        if (kind, value) == ("op", "("):
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {value!r} in {self.text!r}")


def parse(text: str, varset: VarSet) -> Expr:
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression")
    p = _Parser(text, varset)
    value = p.expr()
    if p.peek()[0] != "end":
        raise ParseError(f"trailing input in {text!r}")
    return value
