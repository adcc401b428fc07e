"""Hash-consed scalar expression trees over coordinates.

Every node is interned, so structurally equal trees are the same object.
That makes ``is``-equality structural, lets derivative and evaluation caches
key on identity, and turns repeated subtrees into a shared DAG.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

UNARY_FUNCS = ("sin", "cos", "tan", "exp", "log", "sqrt")


class DomainError(ArithmeticError):
    """Evaluation hit a singular point (division by zero, log of a non-positive, ...)."""

    def __init__(self, message: str, node: Optional["Expr"] = None, mask=None):
        super().__init__(message)
        self.node = node
        self.mask = mask


class Expr:
    """Immutable expression node.  Build through the module constructors."""

    __slots__ = ("op", "args", "data", "name", "_dcache", "__weakref__")

    op: str
    args: Tuple["Expr", ...]

    # arithmetic sugar; plain numbers are lifted to constants
    def __add__(self, other):
        return add(self, lift(other))

    def __radd__(self, other):
        return add(lift(other), self)

    def __sub__(self, other):
        return sub(self, lift(other))

    def __rsub__(self, other):
        return sub(lift(other), self)

    def __mul__(self, other):
        return mul(self, lift(other))

    def __rmul__(self, other):
        return mul(lift(other), self)

    def __truediv__(self, other):
        return div(self, lift(other))

    def __rtruediv__(self, other):
        return div(lift(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("only integer exponents are supported")
        return power(self, int(n))

    def __repr__(self):
        from .printer import to_str

        return f"Expr({to_str(self)!r})"

    def __str__(self):
        from .printer import to_str

        return to_str(self)

    def __reduce__(self):
        # rebuild through the interning constructors
        return (_rebuild, (self.op, self.args, self.data, self.name))

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    @property
    def value(self) -> float:
        if self.op != "const":
            raise AttributeError("not a constant")
        return self.data


_INTERN: Dict[tuple, Expr] = {}


def _make(op: str, args: Tuple[Expr, ...] = (), data=None, name=None) -> Expr:
    key = (op, args, data, name)
    node = _INTERN.get(key)
    if node is None:
        node = object.__new__(Expr)
        node.op = op
        node.args = args
        node.data = data
        node.name = name
        node._dcache = None
        _INTERN[key] = node
    return node


def _rebuild(op, args, data, name):
    return _make(op, tuple(args), data, name)


def const(value: float, name: Optional[str] = None) -> Expr:
    value = float(value)
    if value == 0.0:
        value = 0.0  # fold -0.0
    return _make("const", (), value, name)


ZERO = const(0.0)
ONE = const(1.0)
TWO = const(2.0)
HALF = const(0.5)
PI = const(math.pi, "PI")
E = const(math.e, "E")


def coord(pos: int, name: Optional[str] = None) -> Expr:
    """Coordinate with 0-based absolute position ``pos``.

    ``name`` is the printed identifier (``x3``, ``t1``); defaults to ``x{pos+1}``.
    """
    if pos < 0:
        raise ValueError("coordinate position must be non-negative")
    return _make("coord", (), int(pos), name or f"x{pos + 1}")


def lift(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float, np.integer, np.floating)):
        return const(float(v))
    raise TypeError(f"cannot convert {type(v).__name__} to an expression")


def _c(e: Expr) -> Optional[float]:
    return e.data if e.op == "const" else None


def add(a: Expr, b: Expr) -> Expr:
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None:
        return const(ca + cb)
    if ca == 0.0:
        return b
    if cb == 0.0:
        return a
    if b.op == "neg":
        return sub(a, b.args[0])
    return _make("+", (a, b))


def sub(a: Expr, b: Expr) -> Expr:
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None:
        return const(ca - cb)
    if cb == 0.0:
        return a
    if ca == 0.0:
        return neg(b)
    if a is b:
        return ZERO
    if b.op == "neg":
        return add(a, b.args[0])
    return _make("-", (a, b))


def neg(a: Expr) -> Expr:
    ca = _c(a)
    if ca is not None:
        return const(-ca)
    if a.op == "neg":
        return a.args[0]
    return _make("neg", (a,))


def mul(a: Expr, b: Expr) -> Expr:
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None:
        return const(ca * cb)
    if ca == 0.0 or cb == 0.0:
        return ZERO
    if ca == 1.0:
        return b
    if cb == 1.0:
        return a
    if ca == -1.0:
        return neg(b)
    if cb == -1.0:
        return neg(a)
    if cb is not None:
        # canonical: constant factor on the left
        a, b = b, a
    return _make("*", (a, b))


def div(a: Expr, b: Expr) -> Expr:
    ca, cb = _c(a), _c(b)
    if cb is not None:
        if cb == 0.0:
            # keep the node; evaluation reports the singularity
            return _make("/", (a, b))
        if ca is not None:
            return const(ca / cb)
        if cb == 1.0:
            return a
        if cb == -1.0:
            return neg(a)
    if ca == 0.0:
        return ZERO
    return _make("/", (a, b))


def power(a: Expr, n: int) -> Expr:
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return a
    ca = _c(a)
    if ca is not None and not (ca == 0.0 and n < 0):
        return const(ca ** n)
    return _make("^", (a,), n)


def func(name: str, a: Expr) -> Expr:
    if name not in UNARY_FUNCS:
        raise ValueError(f"unknown function {name!r}")
    ca = _c(a)
    if ca is not None:
        if name == "sin":
            return const(math.sin(ca))
        if name == "cos":
            return const(math.cos(ca))
        if name == "exp":
            return const(math.exp(ca))
        if name == "log" and ca > 0:
            return const(math.log(ca))
        if name == "sqrt" and ca >= 0:
            return const(math.sqrt(ca))
        if name == "tan" and math.cos(ca) != 0.0:
            return const(math.tan(ca))
    return _make(name, (a,))


def sin(a):
    return func("sin", lift(a))


def cos(a):
    return func("cos", lift(a))


def tan(a):
    return func("tan", lift(a))


def exp(a):
    return func("exp", lift(a))


def log(a):
    return func("log", lift(a))


def sqrt(a):
    return func("sqrt", lift(a))


def total(terms: Iterable[Expr]) -> Expr:
    acc = ZERO
    for t in terms:
        acc = add(acc, t)
    return acc


# ---------------------------------------------------------------- derivative


def partial(e: Expr, i: int) -> Expr:
    """Exact symbolic derivative with respect to the coordinate at position ``i``."""
    cache = e._dcache
    if cache is None:
        cache = e._dcache = {}
    hit = cache.get(i)
    if hit is not None:
        return hit
    # iterative post-order so deep trees cannot blow the recursion limit
    stack = [e]
    while stack:
        node = stack[-1]
        pending = [
            a for a in node.args if a._dcache is None or i not in a._dcache
        ]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if node._dcache is None:
            node._dcache = {}
        if i not in node._dcache:
            node._dcache[i] = _partial_step(node, i)
    return e._dcache[i]


def _partial_step(e: Expr, i: int) -> Expr:
    op = e.op
    if op == "const":
        return ZERO
    if op == "coord":
        return ONE if e.data == i else ZERO
    args = e.args
    d = [a._dcache[i] for a in args]
    if op == "+":
        return add(d[0], d[1])
    if op == "-":
        return sub(d[0], d[1])
    if op == "neg":
        return neg(d[0])
    if op == "*":
        a, b = args
        return add(mul(d[0], b), mul(a, d[1]))
    if op == "/":
        a, b = args
        # (a'b - ab') / b^2
        if d[1] is ZERO:
            return div(d[0], b)
        return div(sub(mul(d[0], b), mul(a, d[1])), power(b, 2))
    if op == "^":
        (a,) = args
        n = e.data
        return mul(mul(const(n), power(a, n - 1)), d[0])
    (u,) = args
    du = d[0]
    if du is ZERO:
        return ZERO
    if op == "sin":
        return mul(cos(u), du)
    if op == "cos":
        return neg(mul(sin(u), du))
    if op == "tan":
        return mul(add(ONE, power(e, 2)), du)
    if op == "exp":
        return mul(e, du)
    if op == "log":
        return div(du, u)
    if op == "sqrt":
        return div(du, mul(TWO, e))
    raise AssertionError(op)


def gradient(e: Expr, dim: int) -> List[Expr]:
    return [partial(e, i) for i in range(dim)]


def coordinates_used(e: Expr) -> set:
    seen, out, stack = set(), set(), [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if n.op == "coord":
            out.add(n.data)
        stack.extend(n.args)
    return out


# ---------------------------------------------------------------- evaluation


def _apply(op: str, node: Expr, vals):
    if op == "+":
        return vals[0] + vals[1], None
    if op == "-":
        return vals[0] - vals[1], None
    if op == "*":
        return vals[0] * vals[1], None
    if op == "neg":
        return -vals[0], None
    if op == "/":
        den = vals[1]
        return vals[0] / den, den == 0
    if op == "^":
        base = vals[0]
        n = node.data
        if n < 0:
            return base ** float(n), base == 0
        return base ** n, None
    x = vals[0]
    if op == "sin":
        return np.sin(x), None
    if op == "cos":
        return np.cos(x), None
    if op == "exp":
        return np.exp(x), None
    if op == "tan":
        return np.tan(x), np.cos(x) == 0
    if op == "log":
        return np.log(x), x <= 0
    if op == "sqrt":
        return np.sqrt(x), x < 0
    raise AssertionError(op)


def evaluate_many(exprs: Sequence[Expr], points: np.ndarray, strict: bool = False):
    """Evaluate expressions at every row of ``points``.

    Returns ``(values, bad)`` where ``values`` is a float array of shape
    ``(len(exprs), N)`` and ``bad`` is a boolean mask of points at which some
    subexpression was singular or overflowed.  With ``strict=True`` a
    :class:`DomainError` naming the innermost offending subexpression is
    raised instead.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    memo: Dict[int, object] = {}
    bad = np.zeros(n, dtype=bool)
    first_bad: Optional[Expr] = None
    with np.errstate(all="ignore"):
        for root in exprs:
            if id(root) in memo:
                continue
            stack = [root]
            while stack:
                node = stack[-1]
                if id(node) in memo:
                    stack.pop()
                    continue
                op = node.op
                if op == "const":
                    memo[id(node)] = node.data
                    stack.pop()
                    continue
                if op == "coord":
                    if node.data >= pts.shape[1]:
                        raise IndexError(
                            f"coordinate {node.name} outside a {pts.shape[1]}-dimensional point"
                        )
                    memo[id(node)] = pts[:, node.data]
                    stack.pop()
                    continue
                pending = [a for a in node.args if id(a) not in memo]
                if pending:
                    stack.extend(pending)
                    continue
                stack.pop()
                val, sing = _apply(op, node, [memo[id(a)] for a in node.args])
                if sing is not None and np.any(sing):
                    if first_bad is None:
                        first_bad = node
                    bad |= np.broadcast_to(sing, (n,))
                memo[id(node)] = val
    out = np.empty((len(exprs), n))
    for k, e in enumerate(exprs):
        out[k] = memo[id(e)]
    nonfinite = ~np.isfinite(out).all(axis=0) if len(exprs) else np.zeros(n, bool)
    if np.any(nonfinite) and first_bad is None:
        for e in exprs:
            if not np.all(np.isfinite(out[exprs.index(e)])):
                first_bad = e
                break
    bad |= nonfinite
    if strict and bad.any():
        from .printer import to_str

        raise DomainError(
            f"expression is singular at {int(bad.sum())} point(s); offending subexpression: "
            f"{to_str(first_bad) if first_bad is not None else '?'}",
            node=first_bad,
            mask=bad,
        )
    return out, bad


def evaluate(e: Expr, point) -> float:
    vals, _ = evaluate_many([e], np.atleast_2d(point), strict=True)
    return float(vals[0, 0])
