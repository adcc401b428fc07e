"""Sections of the big tangent bundle, the neutral pairing and the Courant bracket."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import exprcore as ec
from . import jets as J
from .tensorcalc import (
    OneFormField,
    VectorField,
    differential,
    lie_bracket,
    lie_derivative,
)


@dataclass(frozen=True)
class BigSection:
    """``(X, alpha)`` with optional imaginary parts ``(Xi, alphai)``."""

    X: VectorField
    alpha: OneFormField
    Xi: Optional[VectorField] = None
    alphai: Optional[OneFormField] = None

    def __post_init__(self):
        if self.X.dim != self.alpha.dim:
            raise ValueError("vector and form parts live on different dimensions")
        for part in (self.Xi, self.alphai):
            if part is not None and part.dim != self.X.dim:
                raise ValueError("real and imaginary parts live on different dimensions")

    @property
    def dim(self) -> int:
        return self.X.dim

    @property
    def is_complex(self) -> bool:
        return self.Xi is not None or self.alphai is not None

    def real(self) -> "BigSection":
        return BigSection(self.X, self.alpha)

    def imag(self) -> "BigSection":
        m = self.dim
        return BigSection(self.Xi or VectorField.zero(m), self.alphai or OneFormField.zero(m))

    def components(self) -> np.ndarray:
        """Real components as an object array of length 2m (real part only)."""
        return np.concatenate([self.X.comp, self.alpha.comp])

    @classmethod
    def from_components(cls, re: np.ndarray, im: Optional[np.ndarray] = None) -> "BigSection":
        m = len(re) // 2
        if im is None:
            return cls(VectorField(re[:m]), OneFormField(re[m:]))
        return cls(VectorField(re[:m]), OneFormField(re[m:]), VectorField(im[:m]), OneFormField(im[m:]))

    @classmethod
    def vector(cls, X: VectorField) -> "BigSection":
        return cls(X, OneFormField.zero(X.dim))

    @classmethod
    def form(cls, a: OneFormField) -> "BigSection":
        return cls(VectorField.zero(a.dim), a)

    def scaled(self, f) -> "BigSection":
        """Multiply by a real scalar field (or number)."""
        f = ec.lift(f)
        return BigSection(
            self.X.scaled(f), self.alpha.scaled(f),
            self.Xi.scaled(f) if self.Xi is not None else None,
            self.alphai.scaled(f) if self.alphai is not None else None,
        )

    def jet(self, points) -> J.Jet:
        """Complex (or real) jet with val (N, 2m), grad (N, 2m, m)."""
        re = J.Jet.of_field(_Stack(self.components()), points)
        if not self.is_complex:
            return re
        im = J.Jet.of_field(_Stack(self.imag().components()), points)
        return J.Jet(re.val + 1j * im.val, re.grad + 1j * im.grad)

    def evaluate(self, points) -> np.ndarray:
        return self.jet(points).val


class _Stack:
    """Adapter giving a flat component array the field ``jet`` interface."""

    def __init__(self, comp):
        self.comp = comp
        self.dim = len(comp) // 2

    def jet(self, points):
        from .tensorcalc import jet_array

        return jet_array(self.comp, points, self.dim)


def pairing_g(A: BigSection, B: BigSection, p) -> complex:
    """``g(A, B) = (alpha(Y) + beta(X)) / 2`` at the point ``p`` (complex bilinear)."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    u = A.evaluate(p)
    v = B.evaluate(p)
    val = J.pairing(u, v, A.dim)[0]
    return complex(val) if np.iscomplexobj(val) else float(val)


def _courant_real(A: BigSection, B: BigSection) -> BigSection:
    X, a = A.X, A.alpha
    Y, b = B.X, B.alpha
    f = ec.sub(a(Y), b(X))
    form = (lie_derivative(X, b) - lie_derivative(Y, a)
            + differential(f, X.dim).scaled(ec.HALF))
    return BigSection(lie_bracket(X, Y), form)


def courant_bracket(A: BigSection, B: BigSection) -> BigSection:
    """Symbolic Courant bracket, complex-bilinear over real and imaginary parts."""
    if not (A.is_complex or B.is_complex):
        return _courant_real(A, B)
    ar, ai, br, bi = A.real(), A.imag(), B.real(), B.imag()
    rr, ii = _courant_real(ar, br), _courant_real(ai, bi)
    ri, ir = _courant_real(ar, bi), _courant_real(ai, br)
    re = np.vectorize(ec.sub, otypes=[object])(rr.components(), ii.components())
    im = np.vectorize(ec.add, otypes=[object])(ri.components(), ir.components())
    return BigSection.from_components(re, im)


def axiom_v_residual(A: J.Jet, B: J.Jet, C: J.Jet, m: int) -> np.ndarray:
    """Pointwise residual of axiom (v) for section jets A, B, C.

    ``X(g(B,C)) - g([A,B],C) - g(B,[A,C]) - (Z(g(A,B)) + Y(g(A,C)))/2`` where
    X, Y, Z are the vector parts of A, B, C.
    """
    X = J.split(A, m)[0]
    Y = J.split(B, m)[0]
    Z = J.split(C, m)[0]

    def gj(U, V):
        (U1, u2), (V1, v2) = J.split(U, m), J.split(V, m)
        return (J.pair(u2, V1) + J.pair(v2, U1)).scale(0.5)

    ab = J.courant(A, B, m)
    ac = J.courant(A, C, m)
    lhs = J.directional(X, gj(B, C))
    rhs = (J.pairing(ab, C.val, m) + J.pairing(B.val, ac, m)
           + 0.5 * (J.directional(Z, gj(A, B)) + J.directional(Y, gj(A, C))))
    return lhs - rhs


def check_axiom_v(A: BigSection, B: BigSection, C: BigSection, points) -> float:
    """Maximum over ``points`` of the axiom (v) residual."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = axiom_v_residual(A.jet(pts), B.jet(pts), C.jet(pts), A.dim)
    return float(np.max(np.abs(r))) if r.size else 0.0
