"""Printer producing strings the parser reads back to the same values."""

from __future__ import annotations

from typing import Dict

from . import nodes as N

# binding strength: higher binds tighter
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}
_ATOM = 5


def _num(v: float) -> str:
    r = repr(float(v))
    if r in ("inf", "-inf", "nan"):
        raise ValueError(f"cannot print non-finite constant {r}")
    return r


def to_str(e: N.Expr) -> str:
    memo: Dict[int, tuple] = {}
    stack = [e]
    while stack:
        node = stack[-1]
        pending = [a for a in node.args if id(a) not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if id(node) not in memo:
            memo[id(node)] = _fmt(node, memo)
    return memo[id(e)][0]


def _wrap(child, prec_needed, strict=False):
    text, prec = child
    if prec < prec_needed or (strict and prec == prec_needed):
        return f"({text})"
    return text


def _fmt(node: N.Expr, memo):
    op = node.op
    if op == "const":
        if node.name:
            return node.name, _ATOM
        text = _num(node.data)
        return (text, _ATOM) if node.data >= 0 else (text, _PREC["neg"])
    if op == "coord":
        return node.name, _ATOM
    kids = [memo[id(a)] for a in node.args]
    if op in ("+", "-", "*", "/"):
        p = _PREC[op]
        left = _wrap(kids[0], p)
        # right operand of - and / (and + / * for safety with signs) needs strict parens
        right = _wrap(kids[1], p, strict=op in ("-", "/"))
        if op in ("+", "-") and right.startswith("-"):
            right = f"({right})"
        if op in ("*", "/") and kids[1][1] == _PREC["neg"]:
            right = f"({kids[1][0]})"
        return f"{left} {op} {right}", p
    if op == "neg":
        inner = _wrap(kids[0], _PREC["neg"] + 1)
        return f"-{inner}", _PREC["neg"]
    if op == "^":
        base = _wrap(kids[0], _ATOM)
        return f"{base}^{node.data}", _PREC["^"]
    return f"{op}({kids[0][0]})", _ATOM
