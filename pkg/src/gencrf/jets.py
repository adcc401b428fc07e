"""Batched first-order numeric jets and the bracket calculus on them.

A :class:`Jet` holds values ``val[..., *shape]`` and first partials
``grad[..., *shape, m]`` of a tensor-valued function at a batch of points.
Products follow the Leibniz rule, so fields built pointwise from evaluated
components (projector-composed sections, contractions, inverses) carry exact
first derivatives.  That is all a Courant bracket, a Lie derivative or a
Christoffel symbol needs.

Leading axes are batch axes (sample point first, then any section indices);
they broadcast like numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Jet:
    val: np.ndarray
    grad: np.ndarray

    @property
    def dim(self) -> int:
        return self.grad.shape[-1]

    @classmethod
    def constant(cls, val, dim: int) -> "Jet":
        val = np.asarray(val)
        return cls(val, np.zeros(val.shape + (dim,), dtype=val.dtype))

    @classmethod
    def of_field(cls, field, points) -> "Jet":
        val, grad, _ = field.jet(points)
        return cls(val, grad)

    def __getitem__(self, idx) -> "Jet":
        # indexing only touches leading (batch / tensor) axes, never the gradient axis
        return Jet(self.val[idx], self.grad[idx])

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(self.val + other.val, self.grad + other.grad)

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet(self.val - other.val, self.grad - other.grad)

    def __neg__(self) -> "Jet":
        return Jet(-self.val, -self.grad)

    def scale(self, c) -> "Jet":
        return Jet(c * self.val, c * self.grad)

    def swap(self) -> "Jet":
        """Swap the last two tensor axes (matrix transpose)."""
        return Jet(np.swapaxes(self.val, -1, -2), np.swapaxes(self.grad, -2, -3))

    def expand(self, axis: int) -> "Jet":
        """Insert a broadcast axis; negative axes count from the tensor end of ``val``."""
        gaxis = axis - 1 if axis < 0 else axis
        return Jet(np.expand_dims(self.val, axis), np.expand_dims(self.grad, gaxis))


def contract(spec: str, a: Jet, b: Jet) -> Jet:
    """Einsum of two jets with the product rule.

    ``spec`` uses only tensor indices, e.g. ``"ij,jk->ik"``; batch axes are
    implicit (``...``) and the derivative axis is appended internally.
    """
    lhs, out = spec.split("->")
    sa, sb = lhs.split(",")
    val = np.einsum(f"...{sa},...{sb}->...{out}", a.val, b.val)
    ga = np.einsum(f"...{sa}z,...{sb}->...{out}z", a.grad, b.val)
    gb = np.einsum(f"...{sa},...{sb}z->...{out}z", a.val, b.grad)
    return Jet(val, ga + gb)


def matmul(a: Jet, b: Jet) -> Jet:
    return contract("ij,jk->ik", a, b)


def matvec(a: Jet, v: Jet) -> Jet:
    return contract("ij,j->i", a, v)


def inverse(a: Jet) -> Jet:
    inv = np.linalg.inv(a.val)
    grad = -np.einsum("...ij,...jkz,...kl->...ilz", inv, a.grad, inv)
    return Jet(inv, grad)


def identity(n: int, batch_shape, dim: int, dtype=float) -> Jet:
    val = np.broadcast_to(np.eye(n, dtype=dtype), tuple(batch_shape) + (n, n)).copy()
    return Jet.constant(val, dim)


def block(rows) -> Jet:
    """Assemble a block matrix jet from a nested list of jets."""
    val = np.concatenate([np.concatenate([b.val for b in r], axis=-1) for r in rows], axis=-2)
    grad = np.concatenate([np.concatenate([b.grad for b in r], axis=-2) for r in rows], axis=-3)
    return Jet(val, grad)


def columns(M: Jet) -> Jet:
    """Columns of a matrix jet as a batch of vectors: ``out[..., a, :] = M[..., :, a]``."""
    return M.swap()


# ----------------------------------------------------------------- calculus
# vectors: val (..., m), grad (..., m, m) with grad[..., i, j] = d_j X^i


def lie_bracket(X: Jet, Y: Jet) -> np.ndarray:
    return (np.einsum("...j,...ij->...i", X.val, Y.grad)
            - np.einsum("...j,...ij->...i", Y.val, X.grad))


def directional(X: Jet, f: Jet) -> np.ndarray:
    """``X(f)`` for a scalar jet ``f`` (val (...), grad (..., m))."""
    return np.einsum("...j,...j->...", X.val, f.grad)


def lie_form(X: Jet, a: Jet) -> np.ndarray:
    """``(L_X a)_i = X^j d_j a_i + a_j d_i X^j``."""
    return (np.einsum("...j,...ij->...i", X.val, a.grad)
            + np.einsum("...j,...ji->...i", a.val, X.grad))


def lie_2tensor(X: Jet, T: Jet) -> np.ndarray:
    """Lie derivative of a covariant 2-tensor jet."""
    return (np.einsum("...k,...ijk->...ij", X.val, T.grad)
            + np.einsum("...kj,...ki->...ij", T.val, X.grad)
            + np.einsum("...ik,...kj->...ij", T.val, X.grad))


def pair(a: Jet, X: Jet) -> Jet:
    """Scalar jet ``a(X)``."""
    return contract("i,i->", a, X)


def d_two_form(s: Jet) -> np.ndarray:
    """``(ds)_{ijk} = d_i s_jk + d_j s_ki + d_k s_ij`` from a 2-form jet."""
    g = s.grad  # g[..., j, k, i] = d_i s_jk
    return (np.einsum("...jki->...ijk", g) + np.einsum("...kij->...ijk", g)
            + np.einsum("...ijk->...ijk", g))


def d_one_form(a: Jet) -> np.ndarray:
    """``(da)_{ij} = d_i a_j - d_j a_i``."""
    g = a.grad  # g[..., j, i] = d_i a_j
    return np.swapaxes(g, -1, -2) - g


# ----------------------------------------------------------------- big bundle


def split(A: Jet, m: int):
    """Vector and form parts of a big-section jet."""
    return (Jet(A.val[..., :m], A.grad[..., :m, :]), Jet(A.val[..., m:], A.grad[..., m:, :]))


def courant(A: Jet, B: Jet, m: int) -> np.ndarray:
    """Courant bracket ``([X,Y], L_X b - L_Y a + d(a(Y) - b(X))/2)``, values only.

    Works for complex jets by bilinearity; batch axes broadcast (see
    :func:`courant_pairs`).
    """
    X, a = split(A, m)
    Y, b = split(B, m)
    vec = lie_bracket(X, Y)
    f = pair(a, Y) - pair(b, X)
    form = lie_form(X, b) - lie_form(Y, a) + 0.5 * f.grad
    return np.concatenate([vec, form], axis=-1)


def courant_pairs(U: Jet, V: Jet, m: int) -> np.ndarray:
    """All brackets ``[U_k, V_l]``: U, V have shape (N, K, 2m), (N, L, 2m)."""
    return courant(U.expand(-2), V.expand(-3), m)


def pairing(u: np.ndarray, v: np.ndarray, m: int) -> np.ndarray:
    """Neutral pairing ``(a(Y) + b(X)) / 2`` on value arrays (bilinear, no conjugation)."""
    return 0.5 * (np.sum(u[..., m:] * v[..., :m], axis=-1) + np.sum(v[..., m:] * u[..., :m], axis=-1))


def g_matrix(m: int) -> np.ndarray:
    z, e = np.zeros((m, m)), np.eye(m)
    return 0.5 * np.block([[z, e], [e, z]])


def apply(M: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Pointwise matrix action: M (N, n, n), u (N, ..., n)."""
    extra = u.ndim - 2  # section axes between the point axis and the component axis
    Mx = M.reshape(M.shape[:1] + (1,) * extra + M.shape[1:])
    return np.einsum("...ij,...j->...i", Mx, u)


# ----------------------------------------------------------------- connection


def christoffel(gamma: Jet):
    """Christoffel symbols ``C[..., k, i, j] = Gamma^k_{ij}`` and the inverse metric."""
    ginv = np.linalg.inv(gamma.val)
    g = gamma.grad  # g[..., i, j, l] = d_l g_ij
    low = 0.5 * (np.einsum("...jli->...lij", g) + np.einsum("...ilj->...lij", g)
                 - np.einsum("...ijl->...lij", g))
    return np.einsum("...kl,...lij->...kij", ginv, low), ginv


def nabla_end(F: Jet, C: np.ndarray) -> np.ndarray:
    """``D[..., k, i, j] = (nabla_k F)^i_j``."""
    dF = np.einsum("...ijk->...kij", F.grad)
    return (dF + np.einsum("...ikl,...lj->...kij", C, F.val)
            - np.einsum("...lkj,...il->...kij", C, F.val))
