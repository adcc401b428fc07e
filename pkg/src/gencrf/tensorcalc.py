"""Coordinate tensor fields and the classical operators on them.

Components are numpy object arrays of :class:`~gencrf.exprcore.Expr`.  Index
conventions: vectors ``X[i] = X^i``, forms ``a[i]``, two-forms
``s[i, j] = s(d_i, d_j)``, bivectors ``P[i, j] = P(dx^i, dx^j)``,
endomorphisms ``F[i, j] = F^i_j`` (so ``FX`` is a matrix-vector product).

Factor conventions (no 1/2 or 1/3 factors)::

    (a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)
    d a(X, Y)     = X a(Y) - Y a(X) - a([X, Y])
    d s(X, Y, Z)  = cyclic sum of X s(Y, Z) - cyclic sum of s([X, Y], Z)
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import exprcore as ec
from .exprcore import Expr, ZERO, ONE, HALF

# ------------------------------------------------------------------ helpers


def as_expr_array(data, shape: Optional[Tuple[int, ...]] = None, dim: Optional[int] = None,
                  nfactors: int = 0) -> np.ndarray:
    """Object array of expressions from nested lists of Expr / numbers / strings."""
    raw = np.array(data, dtype=object)
    if shape is not None and raw.shape != tuple(shape):
        raise ValueError(f"expected shape {tuple(shape)}, got {raw.shape}")
    out = np.empty(raw.shape, dtype=object)
    for idx, v in np.ndenumerate(raw):
        if isinstance(v, str):
            if dim is None:
                raise ValueError("a dimension is needed to parse expression strings")
            out[idx] = ec.parse_expr(v, dim, nfactors)
        else:
            out[idx] = ec.lift(v)
    return out


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def emat(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of expression arrays (object dtype dot with folding)."""
    a2 = a if a.ndim == 2 else a.reshape(1, -1)
    b2 = b if b.ndim == 2 else b.reshape(-1, 1)
    n, k = a2.shape
    k2, p = b2.shape
    if k != k2:
        raise ValueError("shape mismatch")
    out = np.empty((n, p), dtype=object)
    for i in range(n):
        for j in range(p):
            out[i, j] = ec.total(ec.mul(a2[i, l], b2[l, j]) for l in range(k))
    if a.ndim == 1 and b.ndim == 1:
        return out[0, 0]
    if a.ndim == 1:
        return out[0]
    if b.ndim == 1:
        return out[:, 0]
    return out


def eadd(a, b):
    return np.vectorize(ec.add, otypes=[object])(a, b)


def esub(a, b):
    return np.vectorize(ec.sub, otypes=[object])(a, b)


def escale(c, a):
    c = ec.lift(c)
    return np.vectorize(lambda x: ec.mul(c, x), otypes=[object])(a)


def ediff(a: np.ndarray, i: int) -> np.ndarray:
    return np.vectorize(lambda x: ec.partial(x, i), otypes=[object])(a)


def evaluate_array(a: np.ndarray, points: np.ndarray, strict: bool = False):
    """Evaluate an expression array at points: returns ``(values (N, *shape), bad)``."""
    flat = list(a.ravel())
    vals, bad = ec.evaluate_many(flat, points, strict=strict)
    return vals.T.reshape((vals.shape[1],) + a.shape), bad


def jet_array(a: np.ndarray, points: np.ndarray, dim: int, strict: bool = False):
    """Values ``(N, *shape)``, gradients ``(N, *shape, dim)`` and bad mask."""
    flat = list(a.ravel())
    exprs = flat + [ec.partial(e, i) for e in flat for i in range(dim)]
    vals, bad = ec.evaluate_many(exprs, points, strict=strict)
    n = vals.shape[1]
    k = len(flat)
    val = vals[:k].T.reshape((n,) + a.shape)
    grad = vals[k:].reshape(k, dim, n).transpose(2, 0, 1).reshape((n,) + a.shape + (dim,))
    return val, grad, bad


# ------------------------------------------------------------------ field types


class Field:
    """Base class: a tensor field given by an object array of expressions."""

    rank: int = 0
    kind: str = "field"

    def __init__(self, comp, dim: Optional[int] = None, nfactors: int = 0):
        if isinstance(comp, np.ndarray) and comp.dtype == object and dim is None:
            arr = comp
        else:
            arr = as_expr_array(comp, dim=dim, nfactors=nfactors)
        if dim is None:
            dim = arr.shape[0] if arr.ndim else 0
        if arr.shape != (dim,) * self.rank:
            raise ValueError(f"{self.kind}: expected shape {(dim,) * self.rank}, got {arr.shape}")
        self.comp = arr
        self.dim = dim

    def __getitem__(self, idx):
        return self.comp[idx]

    def evaluate(self, points, strict: bool = False) -> np.ndarray:
        return evaluate_array(self.comp, points, strict=strict)[0]

    def jet(self, points, strict: bool = False):
        return jet_array(self.comp, points, self.dim, strict=strict)

    def map(self, fn) -> "Field":
        return type(self)(np.vectorize(fn, otypes=[object])(self.comp))

    def __add__(self, other):
        return type(self)(eadd(self.comp, other.comp))

    def __sub__(self, other):
        return type(self)(esub(self.comp, other.comp))

    def __neg__(self):
        return type(self)(np.vectorize(ec.neg, otypes=[object])(self.comp))

    def scaled(self, c) -> "Field":
        return type(self)(escale(c, self.comp))

    def strings(self):
        return np.vectorize(ec.to_str, otypes=[object])(self.comp).tolist()

    def __repr__(self):
        return f"{type(self).__name__}({self.strings()!r})"

    @classmethod
    def zero(cls, dim: int):
        return cls(zeros((dim,) * cls.rank))

    @classmethod
    def parse(cls, data, dim: int, nfactors: int = 0):
        """Parse nested lists of expression strings; ``t`` coordinates follow the ``x``'s."""
        total_dim = dim + nfactors
        raw = np.array(data, dtype=object)
        if raw.shape != (total_dim,) * cls.rank:
            raise ValueError(f"{cls.kind}: expected shape {(total_dim,) * cls.rank}, got {raw.shape}")
        out = np.empty(raw.shape, dtype=object)
        for idx, v in np.ndenumerate(raw):
            out[idx] = ec.parse_expr(v, dim, nfactors) if isinstance(v, str) else ec.lift(v)
        return cls(out)


class VectorField(Field):
    rank = 1
    kind = "vector field"

    @classmethod
    def coordinate(cls, i: int, dim: int) -> "VectorField":
        c = zeros(dim)
        c[i] = ONE
        return cls(c)


class OneFormField(Field):
    rank = 1
    kind = "one-form"

    @classmethod
    def coordinate(cls, i: int, dim: int) -> "OneFormField":
        c = zeros(dim)
        c[i] = ONE
        return cls(c)

    def __call__(self, X: VectorField) -> Expr:
        return emat(self.comp, X.comp)


class _Antisym2(Field):
    rank = 2

    def antisymmetry_residual(self, points) -> float:
        v = self.evaluate(points)
        return float(np.max(np.abs(v + np.swapaxes(v, 1, 2)))) if v.size else 0.0


class TwoFormField(_Antisym2):
    kind = "two-form"

    def __call__(self, X: VectorField, Y: VectorField) -> Expr:
        return emat(X.comp, emat(self.comp, Y.comp))


class BivectorField(_Antisym2):
    kind = "bivector"

    def __call__(self, a: OneFormField, b: OneFormField) -> Expr:
        return emat(a.comp, emat(self.comp, b.comp))


class EndField(Field):
    rank = 2
    kind = "endomorphism"

    @classmethod
    def identity(cls, dim: int) -> "EndField":
        c = zeros((dim, dim))
        for i in range(dim):
            c[i, i] = ONE
        return cls(c)

    def apply(self, X: VectorField) -> VectorField:
        return VectorField(emat(self.comp, X.comp))

    def __matmul__(self, other: "EndField") -> "EndField":
        return EndField(emat(self.comp, other.comp))

    def transpose_action(self, a: OneFormField) -> OneFormField:
        """``tF a = a o F``."""
        return OneFormField(emat(self.comp.T, a.comp))


class MetricField(Field):
    rank = 2
    kind = "metric"

    def __call__(self, X: VectorField, Y: VectorField) -> Expr:
        return emat(X.comp, emat(self.comp, Y.comp))

    def symmetry_residual(self, points) -> float:
        v = self.evaluate(points)
        return float(np.max(np.abs(v - np.swapaxes(v, 1, 2))))

    def min_eigenvalue(self, points) -> float:
        v = self.evaluate(points)
        return float(np.min(np.linalg.eigvalsh(0.5 * (v + np.swapaxes(v, 1, 2)))))


class ThreeForm(Field):
    rank = 3
    kind = "three-form"

    def antisymmetry_residual(self, points) -> float:
        v = self.evaluate(points)
        r = 0.0
        for perm in ((0, 2, 1, 3), (0, 3, 2, 1), (0, 1, 3, 2)):
            r = max(r, float(np.max(np.abs(v + v.transpose(perm)))))
        return r

    def __call__(self, X, Y, Z) -> Expr:
        return ec.total(
            ec.mul(ec.mul(ec.mul(X.comp[i], Y.comp[j]), Z.comp[k]), self.comp[i, j, k])
            for i in range(self.dim) for j in range(self.dim) for k in range(self.dim)
        )


class TriVector(ThreeForm):
    kind = "trivector"


# ------------------------------------------------------------------ operators


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    m = X.dim
    out = np.empty(m, dtype=object)
    for i in range(m):
        out[i] = ec.total(
            ec.sub(ec.mul(X[j], ec.partial(Y[i], j)), ec.mul(Y[j], ec.partial(X[i], j)))
            for j in range(m)
        )
    return VectorField(out)


def directional(X: VectorField, f: Expr) -> Expr:
    """``X(f)``."""
    return ec.total(ec.mul(X[j], ec.partial(f, j)) for j in range(X.dim))


def differential(f: Expr, dim: int) -> OneFormField:
    return OneFormField(np.array([ec.partial(f, i) for i in range(dim)], dtype=object))


def exterior_derivative(w: Field) -> Field:
    m = w.dim
    if isinstance(w, OneFormField):
        out = zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                v = ec.sub(ec.partial(w[j], i), ec.partial(w[i], j))
                out[i, j] = v
                out[j, i] = ec.neg(v)
        return TwoFormField(out)
    if isinstance(w, TwoFormField):
        out = zeros((m, m, m))
        for i, j, k in itertools.combinations(range(m), 3):
            v = ec.add(ec.add(ec.partial(w[j, k], i), ec.partial(w[k, i], j)), ec.partial(w[i, j], k))
            _fill_antisym3(out, i, j, k, v)
        return ThreeForm(out)
    raise TypeError(f"exterior derivative not implemented for {type(w).__name__}")


def _fill_antisym3(out, i, j, k, v):
    nv = ec.neg(v)
    out[i, j, k] = out[j, k, i] = out[k, i, j] = v
    out[j, i, k] = out[i, k, j] = out[k, j, i] = nv


def interior_product(X: VectorField, w: Field) -> Field:
    """Contraction of ``X`` into the first slot."""
    m = X.dim
    if isinstance(w, (TwoFormField, MetricField)):
        return OneFormField(np.array(
            [ec.total(ec.mul(X[i], w[i, j]) for i in range(m)) for j in range(m)], dtype=object))
    if isinstance(w, ThreeForm):
        out = zeros((m, m))
        for j in range(m):
            for k in range(m):
                out[j, k] = ec.total(ec.mul(X[i], w[i, j, k]) for i in range(m))
        return TwoFormField(out)
    if isinstance(w, OneFormField):
        return w(X)
    raise TypeError(f"interior product not implemented for {type(w).__name__}")


def wedge(a: OneFormField, b: Field) -> Field:
    m = a.dim
    if isinstance(b, OneFormField):
        out = zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                v = ec.sub(ec.mul(a[i], b[j]), ec.mul(a[j], b[i]))
                out[i, j] = v
                out[j, i] = ec.neg(v)
        return TwoFormField(out)
    if isinstance(b, TwoFormField):
        out = zeros((m, m, m))
        for i, j, k in itertools.combinations(range(m), 3):
            v = ec.total([ec.mul(a[i], b[j, k]), ec.mul(a[j], b[k, i]), ec.mul(a[k], b[i, j])])
            _fill_antisym3(out, i, j, k, v)
        return ThreeForm(out)
    raise TypeError(f"wedge not implemented for {type(b).__name__}")


def lie_derivative(X: VectorField, T):
    """Lie derivative of a function, one-form or covariant two-tensor."""
    m = X.dim
    if isinstance(T, Expr):
        return directional(X, T)
    dX = [[ec.partial(X[j], i) for i in range(m)] for j in range(m)]  # dX[j][i] = d_i X^j
    if isinstance(T, OneFormField):
        out = np.empty(m, dtype=object)
        for i in range(m):
            out[i] = ec.add(directional(X, T[i]),
                            ec.total(ec.mul(T[j], dX[j][i]) for j in range(m)))
        return OneFormField(out)
    if isinstance(T, (TwoFormField, MetricField)):
        out = np.empty((m, m), dtype=object)
        for i in range(m):
            for j in range(m):
                out[i, j] = ec.total(
                    [directional(X, T[i, j])]
                    + [ec.mul(T[k, j], dX[k][i]) for k in range(m)]
                    + [ec.mul(T[i, k], dX[k][j]) for k in range(m)]
                )
        return type(T)(out)
    raise TypeError(f"Lie derivative not implemented for {type(T).__name__}")


def sharp(P: BivectorField, a: OneFormField) -> VectorField:
    """``#_P a = i(a) P``, i.e. ``(#_P a)^j = a_i P^{ij}``."""
    return VectorField(emat(a.comp, P.comp))


def flat(s: TwoFormField, X: VectorField) -> OneFormField:
    """``b_s X = i(X) s``."""
    return interior_product(X, s)


def schouten_bracket(P: BivectorField, Q: BivectorField) -> TriVector:
    """``[P, Q]^{ijk} = sum over cyclic (i, j, k) of P^{il} d_l Q^{jk} + Q^{il} d_l P^{jk}``.

    With this normalization ``[P, P](df, dg, dh)`` is twice the Jacobiator of
    ``{f, g} = P(df, dg)``.
    """
    m = P.dim
    dP = [ediff(P.comp, l) for l in range(m)]
    dQ = [ediff(Q.comp, l) for l in range(m)] if Q is not P else dP

    def term(i, j, k):
        return ec.total(
            ec.add(ec.mul(P[i, l], dQ[l][j, k]), ec.mul(Q[i, l], dP[l][j, k])) for l in range(m)
        )

    out = zeros((m, m, m))
    for i, j, k in itertools.combinations(range(m), 3):
        v = ec.total([term(i, j, k), term(j, k, i), term(k, i, j)])
        _fill_antisym3(out, i, j, k, v)
    return TriVector(out)


def one_form_P_bracket(a: OneFormField, b: OneFormField, P: BivectorField) -> OneFormField:
    """``{a, b}_P = L_{#a} b - L_{#b} a - d(P(a, b))``."""
    return (lie_derivative(sharp(P, a), b) - lie_derivative(sharp(P, b), a)
            - differential(P(a, b), a.dim))


# ------------------------------------------------------------------ inverse & connection


def symbolic_inverse(M: np.ndarray) -> np.ndarray:
    """Inverse of a square expression matrix.

    Constant matrices go through numpy; otherwise the adjugate is expanded
    with memoized Laplace cofactors (fine for the m <= 8 desk scale when the
    matrix is sparse, which all metrics and restricted forms here are).
    """
    n = M.shape[0]
    if all(e.is_const for e in M.ravel()):
        inv = np.linalg.inv(np.array([[e.value for e in row] for row in M], dtype=float))
        return as_expr_array(inv)
    memo: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Expr] = {}

    def det(rows: Tuple[int, ...], cols: Tuple[int, ...]) -> Expr:
        if not rows:
            return ONE
        key = (rows, cols)
        hit = memo.get(key)
        if hit is not None:
            return hit
        r0, rest = rows[0], rows[1:]
        acc = ZERO
        for pos, c in enumerate(cols):
            a = M[r0, c]
            if a is ZERO:
                continue
            minor = det(rest, cols[:pos] + cols[pos + 1:])
            term = ec.mul(a, minor)
            acc = ec.add(acc, term) if pos % 2 == 0 else ec.sub(acc, term)
        memo[key] = acc
        return acc

    full = tuple(range(n))
    D = det(full, full)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            # inverse[i, j] = cofactor(j, i) / det
            rows = full[:j] + full[j + 1:]
            cols = full[:i] + full[i + 1:]
            c = det(rows, cols)
            out[i, j] = ec.div(c if (i + j) % 2 == 0 else ec.neg(c), D)
    return out


class Connection:
    """Levi-Civita connection: ``christoffel[k, i, j] = Gamma^k_{ij}``."""

    def __init__(self, gamma: MetricField, christoffel: np.ndarray, inverse: np.ndarray):
        self.gamma = gamma
        self.christoffel = christoffel
        self.inverse = inverse
        self.dim = gamma.dim


def levi_civita(gamma: MetricField) -> Connection:
    m = gamma.dim
    ginv = symbolic_inverse(gamma.comp)
    dg = [ediff(gamma.comp, l) for l in range(m)]  # dg[l][i, j] = d_l g_ij
    low = np.empty((m, m, m), dtype=object)  # low[l, i, j] = Gamma_{l,ij}
    for l in range(m):
        for i in range(m):
            for j in range(i, m):
                v = ec.mul(HALF, ec.sub(ec.add(dg[i][j, l], dg[j][i, l]), dg[l][i, j]))
                low[l, i, j] = low[l, j, i] = v
    chris = np.empty((m, m, m), dtype=object)
    for k in range(m):
        for i in range(m):
            for j in range(i, m):
                v = ec.total(ec.mul(ginv[k, l], low[l, i, j]) for l in range(m))
                chris[k, i, j] = chris[k, j, i] = v
    return Connection(gamma, chris, ginv)


def covariant_derivative_end(conn: Connection, F: EndField) -> np.ndarray:
    """``D[k, i, j] = ((nabla_{d_k} F)^i_j``."""
    m = F.dim
    G = conn.christoffel
    D = np.empty((m, m, m), dtype=object)
    for k in range(m):
        for i in range(m):
            for j in range(m):
                D[k, i, j] = ec.total(
                    [ec.partial(F[i, j], k)]
                    + [ec.mul(G[i, k, l], F[l, j]) for l in range(m)]
                    + [ec.neg(ec.mul(G[l, k, j], F[i, l])) for l in range(m)]
                )
    return D


def covariant_derivative_metric(conn: Connection) -> np.ndarray:
    """``(nabla_k gamma)_{ij}``; vanishes for the Levi-Civita connection."""
    m = conn.dim
    g = conn.gamma.comp
    G = conn.christoffel
    out = np.empty((m, m, m), dtype=object)
    for k in range(m):
        for i in range(m):
            for j in range(m):
                out[k, i, j] = ec.total(
                    [ec.partial(g[i, j], k)]
                    + [ec.neg(ec.mul(G[l, k, i], g[l, j])) for l in range(m)]
                    + [ec.neg(ec.mul(G[l, k, j], g[i, l])) for l in range(m)]
                )
    return out


# ------------------------------------------------------------------ pullbacks


def pullback(w: Field, F: EndField) -> Field:
    """``w^c(X, ...) = w(FX, ...)`` with every argument transformed by ``F``."""
    if isinstance(w, OneFormField):
        return OneFormField(emat(F.comp.T, w.comp))
    if isinstance(w, (TwoFormField, MetricField)):
        return type(w)(emat(F.comp.T, emat(w.comp, F.comp)))
    if isinstance(w, ThreeForm):
        m = w.dim
        Fc = F.comp
        # contract one slot at a time
        t = w.comp
        for axis in range(3):
            t = np.moveaxis(t, axis, -1)
            new = np.empty(t.shape, dtype=object)
            for idx in np.ndindex(t.shape[:-1]):
                for j in range(m):
                    new[idx + (j,)] = ec.total(ec.mul(t[idx + (l,)], Fc[l, j]) for l in range(m))
            t = np.moveaxis(new, -1, axis)
        return ThreeForm(t)
    raise TypeError(f"pullback not implemented for {type(w).__name__}")
