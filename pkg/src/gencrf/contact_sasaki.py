"""Almost contact metric structures, their product lifts and the Sasakian-type criteria.

An almost contact metric structure ``(F, Z, xi, gamma)`` on M is read as a
translation invariant almost Hermitian structure on ``M x R`` (coordinate
``t``, box [-1, 1]) through

    J     = F + dt (x) Z - xi (x) d/dt
    Gamma = e^t (gamma + dt^2)
    omega = Gamma(J., .) = e^t (Xi - xi ^ dt),   Xi(X, Y) = gamma(FX, Y).

The direct conditions of the generalized Sasakian criterion use
``rho = psi + d kappa`` and ``lambda^c`` = ``lambda`` evaluated on
F-transformed arguments (:func:`tensorcalc.pullback`), for ``s = +-1``:

    c1  i(Z) rho = 0
    c2  rho^c + L_Z[(L_Z rho)^c] = 0
    c3  (d psi)^c - i(Z)[xi ^ d((L_Z rho)^c)] = 0
    c4  Xi - d xi + s (L_Z rho)^c = 0

Each is cross-checked against the product-space Gualtieri conditions for
``(Gamma, Psi = e^t (psi + kappa ^ dt), J_+, J_-)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from . import exprcore as ec
from . import jets as J
from .exprcore import CoordinateDomain
from .genmetric import MetricQuadruple, check_gualtieri_kahler
from .genstruct import AlmostContactData, check_integrability, classical_crf_values, lift_to_product
from .report import DEFAULT_TOL, CheckReport, PreconditionError, StructureError, combine, make_report
from .tensorcalc import (
    BivectorField,
    EndField,
    Field,
    MetricField,
    OneFormField,
    TwoFormField,
    VectorField,
    emat,
    evaluate_array,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative,
    pullback,
    wedge,
    zeros,
)

T_BOX = (-1.0, 1.0)


@dataclass(frozen=True, eq=False)
class AlmostContactMetric:
    F: EndField
    Z: VectorField
    xi: OneFormField
    gamma: MetricField
    domain: CoordinateDomain

    @property
    def dim(self) -> int:
        return self.domain.dim

    def negated(self) -> "AlmostContactMetric":
        """``(-F, -Z, -xi, gamma)``: again an almost contact metric structure, normal iff this one is."""
        return AlmostContactMetric(-self.F, -self.Z, -self.xi, self.gamma, self.domain)


@dataclass(frozen=True, eq=False)
class SasakiInput:
    plus: AlmostContactMetric
    minus: AlmostContactMetric
    psi: TwoFormField
    kappa: OneFormField

    @property
    def domain(self) -> CoordinateDomain:
        return self.plus.domain

    def record(self, sign: int) -> AlmostContactMetric:
        return self.plus if sign > 0 else self.minus


# ------------------------------------------------------------------ invariants


def acm_invariants(acm: AlmostContactMetric, points) -> Dict[str, float]:
    """Residuals of the defining identity and of its standard consequences."""
    pts = np.atleast_2d(points)
    m = acm.dim
    F = acm.F.evaluate(pts)
    Z = acm.Z.evaluate(pts)
    x = acm.xi.evaluate(pts)
    g = acm.gamma.evaluate(pts)
    Ft = np.swapaxes(F, -1, -2)
    xx = np.einsum("ni,nj->nij", x, x)
    res = {
        "gamma(FX,FY)=gamma(X,Y)-xi(X)xi(Y)": Ft @ g @ F - g + xx,
        "F^2=-Id+Z(x)xi": F @ F + np.eye(m) - np.einsum("ni,nj->nij", Z, x),
        "xi(Z)=1": np.einsum("ni,ni->n", x, Z) - 1.0,
        "xi o F=0": np.einsum("ni,nij->nj", x, F),
        "F(Z)=0": np.einsum("nij,nj->ni", F, Z),
        "xi=flat_gamma Z": np.einsum("nij,nj->ni", g, Z) - x,
        "gamma(Z,Z)=1": np.einsum("ni,nij,nj->n", Z, g, Z) - 1.0,
        "i(Z)Xi=0": np.einsum("ni,nki,nkj->nj", Z, F, g),
        "gamma(Z,FX)=0": np.einsum("ni,nij,njk->nk", Z, g, F),
    }
    return {k: float(np.max(np.abs(v))) for k, v in res.items()}


def validate_acm(acm: AlmostContactMetric, tol: float = 1e-9, n: int = 24) -> AlmostContactMetric:
    res = acm_invariants(acm, acm.domain.sample(n, seed=7))
    bad = [k for k, v in res.items() if v > tol]
    if bad:
        raise StructureError("almost contact metric identity violated: " + ", ".join(bad))
    return acm


# ------------------------------------------------------------------ forms and lifts


def fundamental_form(acm: AlmostContactMetric) -> TwoFormField:
    """``Xi(X, Y) = gamma(FX, Y)``, i.e. the matrix ``F^T gamma``."""
    return TwoFormField(emat(acm.F.comp.T, acm.gamma.comp))


def t_coordinate(m: int) -> ec.Expr:
    return ec.coord(m, "t1")


def _pad_form(a: OneFormField, n: int) -> OneFormField:
    out = zeros((n,))
    out[: a.dim] = a.comp
    return OneFormField(out)


def _pad_two(a: Field, n: int) -> np.ndarray:
    out = zeros((n, n))
    out[: a.dim, : a.dim] = a.comp
    return out


def lift_J(acm: AlmostContactMetric, sign: int = -1) -> EndField:
    """``J_s = F - s dt (x) Z + s xi (x) d/dt``; ``s = -1`` is ``F + dt (x) Z - xi (x) d/dt``."""
    m = acm.dim
    n = m + 1
    out = _pad_two(acm.F, n)
    for i in range(m):
        out[i, m] = ec.neg(acm.Z[i]) if sign > 0 else acm.Z[i]
        out[m, i] = acm.xi[i] if sign > 0 else ec.neg(acm.xi[i])
    return EndField(out)


def product_metric(gamma: MetricField, conformal: bool = True) -> MetricField:
    """``e^t (gamma + dt^2)``, or ``gamma + dt^2`` when ``conformal`` is False."""
    m = gamma.dim
    out = _pad_two(gamma, m + 1)
    out[m, m] = ec.ONE
    if conformal:
        f = ec.exp(t_coordinate(m))
        out = np.vectorize(lambda e: ec.mul(f, e), otypes=[object])(out)
    return MetricField(out)


def product_psi(psi: TwoFormField, kappa: OneFormField, conformal: bool = True) -> TwoFormField:
    """``e^t (psi + kappa ^ dt)``."""
    m = psi.dim
    n = m + 1
    dt = OneFormField.coordinate(m, n)
    w = TwoFormField(_pad_two(psi, n)) + wedge(_pad_form(kappa, n), dt)
    if conformal:
        f = ec.exp(t_coordinate(m))
        w = w.map(lambda e: ec.mul(f, e))
    return w


def product_lift(acm: AlmostContactMetric) -> Tuple[EndField, MetricField, TwoFormField]:
    """``(J, Gamma, omega)`` on ``M x R`` with ``omega(X, Y) = Gamma(JX, Y)``."""
    Jf = lift_J(acm, -1)
    G = product_metric(acm.gamma)
    return Jf, G, TwoFormField(emat(Jf.comp.T, G.comp))


def product_domain(domain: CoordinateDomain) -> CoordinateDomain:
    return domain.extended([T_BOX])


def product_points(points, seed: int = 0) -> np.ndarray:
    """Append a ``t`` value in the interior of [-1, 1] to every sample point (deterministic)."""
    pts = np.atleast_2d(points)
    t = np.random.default_rng(seed).uniform(0.98 * T_BOX[0], 0.98 * T_BOX[1], len(pts))
    return np.column_stack([pts, t])


# ------------------------------------------------------------------ normality


def normality_tensor(acm: AlmostContactMetric) -> np.ndarray:
    """``N_F(d_a, d_b) + d xi(d_a, d_b) Z`` as an (m, m, m) expression array ``[i, a, b]``."""
    m = acm.dim
    cols = [acm.F.apply(VectorField.coordinate(a, m)) for a in range(m)]
    F2 = acm.F @ acm.F
    dxi = exterior_derivative(acm.xi)
    out = zeros((m, m, m))
    for a in range(m):
        for b in range(m):
            E_a, E_b = VectorField.coordinate(a, m), VectorField.coordinate(b, m)
            t1 = lie_bracket(cols[a], cols[b])
            t2 = F2.apply(lie_bracket(E_a, E_b))
            t3 = acm.F.apply(lie_bracket(cols[a], E_b))
            t4 = acm.F.apply(lie_bracket(E_a, cols[b]))
            N = t1 + t2 - t3 - t4
            for i in range(m):
                out[i, a, b] = ec.add(N[i], ec.mul(dxi[a, b], acm.Z[i]))
    return out


def normality_values(acm: AlmostContactMetric, points) -> np.ndarray:
    """Nijenhuis-type residual of the product lift J at ``points`` of M."""
    pp = product_points(points)
    Jj = J.Jet.of_field(lift_J(acm, -1), pp)
    return classical_crf_values(Jj, acm.dim + 1)


def check_normality(acm: AlmostContactMetric, points, tol: float = DEFAULT_TOL) -> CheckReport:
    pts = np.atleast_2d(points)
    rep = make_report("normal", normality_values(acm, pts), pts, tol)
    direct = make_report("N_F+dxi(x)Z", _eval(normality_tensor(acm), pts), pts, tol)
    rep.details.update(direct_residual=direct.residual, agree=direct.passed == rep.passed)
    return rep


def _eval(a, pts) -> np.ndarray:
    return evaluate_array(a.comp if isinstance(a, Field) else a, pts)[0]


# ------------------------------------------------------------------ cosymplectic


def check_cosymplectic(acm: AlmostContactMetric, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """``d xi = 0``, ``d Xi = 0`` and normality through the generalized lift with ``P = 0, theta = 0``.

    Also reports the generalized Kähler verdict for ``(gamma + dt^2, psi = 0, J_+, J_-)``
    with ``J_pm = F -+ dt (x) Z +- xi (x) d/dt``, which must agree.
    """
    pts = np.atleast_2d(points)
    m = acm.dim
    dxi = exterior_derivative(acm.xi)
    dXi = exterior_derivative(fundamental_form(acm))
    data = AlmostContactData(BivectorField.zero(m), TwoFormField.zero(m), acm.F, (acm.Z,),
                             (acm.xi,), acm.domain)
    lifted = lift_to_product(data)
    pp = product_points(pts)
    normal = check_integrability(lifted, pp, tol)
    normal.name = "normal"
    rep = combine("cosymplectic", [
        make_report("dxi=0", _eval(dxi, pts), pts, tol),
        make_report("dXi=0", _eval(dXi, pts), pts, tol),
        normal,
    ], tol)
    Q = MetricQuadruple(product_metric(acm.gamma, conformal=False),
                        TwoFormField.zero(m + 1), lift_J(acm, +1), lift_J(acm, -1),
                        product_domain(acm.domain))
    gk = check_gualtieri_kahler(Q, pp, tol)
    rep.details.update(generalized_kahler=gk.passed, agree=gk.passed == rep.passed)
    return rep


# ------------------------------------------------------------------ generalized Sasakian


def sasaki_direct_fields(S: SasakiInput, sign: int) -> Dict[str, Field]:
    """Residual fields of the four direct conditions for the record of the given sign."""
    acm = S.record(sign)
    rho = S.psi + exterior_derivative(S.kappa)
    beta = pullback(lie_derivative(acm.Z, rho), acm.F)
    dpsi = exterior_derivative(S.psi)
    dbeta = exterior_derivative(beta)
    # i(Z)(xi ^ w) = xi(Z) w - xi ^ i(Z) w
    xz = acm.xi(acm.Z)
    c3_rhs = dbeta.map(lambda e: ec.mul(xz, e)) - wedge(acm.xi, interior_product(acm.Z, dbeta))
    s = "+" if sign > 0 else "-"
    return {
        f"i(Z{s})rho=0": interior_product(acm.Z, rho),
        f"rho^c=-L_Z[(L_Z rho)^c] ({s})": pullback(rho, acm.F) + lie_derivative(acm.Z, beta),
        f"(dpsi)^c=i(Z)[xi^d(L_Z rho)^c] ({s})": pullback(dpsi, acm.F) - c3_rhs,
        f"Xi=dxi-s(L_Z rho)^c ({s})": (fundamental_form(acm) - exterior_derivative(acm.xi)
                                       + beta.scaled(float(sign))),
    }


def sasaki_product_quadruple(S: SasakiInput) -> MetricQuadruple:
    return MetricQuadruple(product_metric(S.plus.gamma), product_psi(S.psi, S.kappa),
                           lift_J(S.plus, -1), lift_J(S.minus, -1), product_domain(S.domain))


def check_sasaki_product(S: SasakiInput, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """Generalized Kähler conditions for ``(e^t(gamma + dt^2), e^t(psi + kappa ^ dt), J_+, J_-)``."""
    pp = product_points(points)
    rep = check_gualtieri_kahler(sasaki_product_quadruple(S), pp, tol)
    rep.name = "sasakian-product"
    return rep


def check_generalized_sasakian(S: SasakiInput, points, tol: float = DEFAULT_TOL) -> CheckReport:
    pts = np.atleast_2d(points)
    for sign in (1, -1):
        acm = S.record(sign)
        r = float(np.max(np.abs(normality_values(acm, pts))))
        if not r < tol:
            s = "+" if sign > 0 else "-"
            raise PreconditionError(f"almost contact record {s} is not normal (residual {r:.3e})", r)
    parts = []
    for sign in (1, -1):
        for name, f in sasaki_direct_fields(S, sign).items():
            parts.append(make_report(name, _eval(f, pts), pts, tol))
    rep = combine("sasakian", parts, tol)
    prod = check_sasaki_product(S, pts, tol)
    rep.details.update(product_residual=prod.residual, product_pass=prod.passed,
                       agree=prod.passed == rep.passed)
    if prod.passed != rep.passed:
        rep.error = "direct and product-space Sasakian verdicts disagree"
    return rep


def is_classical_sasakian(acm: AlmostContactMetric, points, tol: float = DEFAULT_TOL) -> bool:
    """Normal and contact (``Xi = d xi``)."""
    pts = np.atleast_2d(points)
    contact = _eval(fundamental_form(acm) - exterior_derivative(acm.xi), pts)
    return bool(np.max(np.abs(contact)) < tol and np.max(np.abs(normality_values(acm, pts))) < tol)
