"""Recursive-descent parser for the expression grammar.

Grammar (whitespace insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'|'+'] INT)?
    atom    := NUMBER | 'PI' | 'E' | xN | tN | FUNC '(' expr ')' | '(' expr ')'

Coordinates ``x1..xm`` occupy positions 0..m-1; product-factor coordinates
``t1..th`` sit right after them, at positions m..m+h-1.
"""

from __future__ import annotations

import re
from typing import List, Tuple

from . import nodes as N


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, src: str, pos: int):
        super().__init__(f"{message} at position {pos}: {src!r}")
        self.src = src
        self.pos = pos


class CoordinateRangeError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(src):
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", src, pos)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str, dim: int, nfactors: int):
        self.src = src
        self.dim = dim
        self.nfactors = nfactors
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            found = "end of input" if t[0] == "end" else repr(t[1])
            raise ExprSyntaxError(f"expected {value!r}, found {found}", self.src, t[2])

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"unexpected {t[1]!r}", self.src, t[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            r = self.term()
            e = N.add(e, r) if op == "+" else N.sub(e, r)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            r = self.unary()
            e = N.mul(e, r) if op == "*" else N.div(e, r)
        return e

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return N.neg(self.unary())
        if t[0] == "op" and t[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            t = self.peek()
            if t[0] == "op" and t[1] in ("-", "+"):
                self.take()
                sign = -1 if t[1] == "-" else 1
            t = self.take()
            if t[0] != "num" or not t[1].isdigit():
                raise ExprSyntaxError("exponent must be an integer literal", self.src, t[2])
            return N.power(base, sign * int(t[1]))
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return N.const(float(text))
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "id":
            if text == "PI":
                return N.PI
            if text == "E":
                return N.E
            if text in N.UNARY_FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return N.func(text, arg)
            m = re.fullmatch(r"([xt])([1-9]\d*)", text)
            if m:
                k = int(m.group(2))
                if m.group(1) == "x":
                    if k > self.dim:
                        raise CoordinateRangeError(
                            f"coordinate {text} out of range for dimension {self.dim} "
                            f"(position {pos} in {self.src!r})"
                        )
                    return N.coord(k - 1, text)
                if k > self.nfactors:
                    raise CoordinateRangeError(
                        f"product coordinate {text} out of range: {self.nfactors} factor(s) "
                        f"(position {pos} in {self.src!r})"
                    )
                return N.coord(self.dim + k - 1, text)
            raise ExprSyntaxError(f"unknown identifier {text!r}", self.src, pos)
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", self.src, pos)
        raise ExprSyntaxError(f"unexpected {text!r}", self.src, pos)


def parse_expr(src: str, dim: int, nfactors: int = 0) -> N.Expr:
    """Parse ``src`` into an expression over ``dim`` coordinates (plus ``nfactors`` t's)."""
    if not isinstance(src, str):
        raise TypeError("expression source must be a string")
    if dim < 1:
        raise ValueError("dimension must be positive")
    return _Parser(src, dim, nfactors).parse()
