"""Generalized F-structures ``Phi = (A, pi, sigma)`` on the big tangent bundle.

Matrix conventions on column vectors ``(X; alpha)`` with ``S = [sigma_ij]`` and
``P = [pi^ij]``: ``flat_sigma = -S``, ``sharp_pi = -P`` and

    Phi = [[A, -P], [-S, -A^T]]

so that ``Phi(X, alpha) = (AX + sharp_pi alpha, flat_sigma X - tA alpha)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import exprcore as ec
from . import jets as J
from .bigcourant import BigSection
from .exprcore import CoordinateDomain
from .report import DEFAULT_TOL, CheckReport, PreconditionError, StructureError, combine, make_report
from .tensorcalc import (
    BivectorField,
    EndField,
    OneFormField,
    TwoFormField,
    VectorField,
    emat,
    exterior_derivative,
    jet_array,
    lie_bracket,
    one_form_P_bracket,
    schouten_bracket,
    symbolic_inverse,
    zeros,
)

RANK_TOL = 1e-8


def _neg(a: np.ndarray) -> np.ndarray:
    return np.vectorize(ec.neg, otypes=[object])(a)


def _block(a, b, c, d) -> np.ndarray:
    return np.block([[a, b], [c, d]]) if a.size else np.empty((0, 0), dtype=object)


@dataclass(frozen=True, eq=False)
class GeneralizedF:
    A: EndField
    pi: BivectorField
    sigma: TwoFormField
    domain: CoordinateDomain

    def __post_init__(self):
        m = self.domain.dim
        for name, f in (("A", self.A), ("pi", self.pi), ("sigma", self.sigma)):
            if f.dim != m:
                raise StructureError(f"{name} has dimension {f.dim}, domain has {m}")

    @property
    def dim(self) -> int:
        return self.domain.dim

    def matrix(self) -> np.ndarray:
        """Symbolic 2m x 2m matrix of Phi."""
        A = self.A.comp
        return np.block([[A, _neg(self.pi.comp)], [_neg(self.sigma.comp), _neg(A.T)]])

    def jet(self, points) -> J.Jet:
        val, grad, _ = jet_array(self.matrix(), np.atleast_2d(points), self.dim)
        return J.Jet(val, grad)

    def values(self, points) -> np.ndarray:
        return self.jet(points).val

    def fields(self):
        return self.A, self.pi, self.sigma

    @classmethod
    def from_matrix(cls, M: np.ndarray, domain: CoordinateDomain) -> "GeneralizedF":
        m = domain.dim
        return cls(EndField(M[:m, :m].copy()), BivectorField(_neg(M[:m, m:])),
                   TwoFormField(_neg(M[m:, :m])), domain)

    @classmethod
    def zero(cls, domain: CoordinateDomain) -> "GeneralizedF":
        m = domain.dim
        return cls(EndField.zero(m), BivectorField.zero(m), TwoFormField.zero(m), domain)


def apply_phi(phi: GeneralizedF, s: BigSection) -> BigSection:
    """``Phi(X, alpha) = (AX + sharp_pi alpha, flat_sigma X - tA alpha)`` at expression level."""
    M = phi.matrix()
    re = emat(M, s.components())
    if not s.is_complex:
        return BigSection.from_components(re)
    return BigSection.from_components(re, emat(M, s.imag().components()))


# ------------------------------------------------------------------ pointwise algebra


def _rank(M: np.ndarray) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


@dataclass
class EigenData:
    pr_E: np.ndarray
    pr_Ebar: np.ndarray
    pr_S: np.ndarray
    pr_L: np.ndarray
    k: int
    dim_S: int
    q: int


def projectors(P: np.ndarray):
    """Polynomial projectors for Phi-values ``P`` (..., 2m, 2m)."""
    n = P.shape[-1]
    I = np.eye(n)
    P2 = P @ P
    pr_E = -0.5 * (P2 + 1j * P)
    pr_Ebar = -0.5 * (P2 - 1j * P)
    pr_S = I + P2
    pr_L = -P2
    return pr_E, pr_Ebar, pr_S, pr_L


def negative_index(pr_S: np.ndarray, m: int) -> Tuple[int, int]:
    """(dim S, negative inertia of g on S) from an orthonormal basis of im pr_S."""
    U, s, _ = np.linalg.svd(pr_S)
    if s.size == 0 or s[0] == 0:
        return 0, 0
    r = int(np.sum(s > RANK_TOL * s[0]))
    B = U[:, :r]
    gram = B.T @ J.g_matrix(m) @ B
    ev = np.linalg.eigvalsh(0.5 * (gram + gram.T))
    scale = np.max(np.abs(ev)) if ev.size else 0.0
    return r, int(np.sum(ev < -RANK_TOL * scale))


def eigen_data(phi: GeneralizedF, p) -> EigenData:
    P = phi.values(np.atleast_2d(p))[0]
    pr_E, pr_Ebar, pr_S, pr_L = projectors(P)
    k = _rank(pr_E)
    dim_S, q = negative_index(pr_S.real, phi.dim)
    return EigenData(pr_E, pr_Ebar, pr_S, pr_L, k, dim_S, q)


# ------------------------------------------------------------------ checks


def check_axioms(phi: GeneralizedF, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """Yano identity ``Phi^3 + Phi = 0`` and g-skew-symmetry, as matrix max-norms."""
    pts = np.atleast_2d(points)
    P = phi.values(pts)
    yano = P @ P @ P + P
    g = J.g_matrix(phi.dim)
    skew = np.swapaxes(P, -1, -2) @ g + g @ P
    return combine("axioms", [
        make_report("yano", yano, pts, tol),
        make_report("skew", skew, pts, tol),
    ], tol)


def check_projectors(phi: GeneralizedF, points, tol: float = 1e-10) -> CheckReport:
    """Projector algebra at every point plus constancy of rank E, dim S and q."""
    pts = np.atleast_2d(points)
    P = phi.values(pts)
    pr_E, pr_Ebar, pr_S, pr_L = projectors(P)
    I = np.eye(P.shape[-1])
    parts = [
        make_report("idempotent-E", pr_E @ pr_E - pr_E, pts, tol),
        make_report("idempotent-S", pr_S @ pr_S - pr_S, pts, tol),
        make_report("E-S", pr_E @ pr_S, pts, tol),
        make_report("sum", pr_E + pr_Ebar + pr_S - I, pts, tol),
        make_report("L", pr_L + P @ P, pts, tol),
        make_report("eigen-E", P @ pr_E - 1j * pr_E, pts, tol),
    ]
    ks, ss, qs = [], [], []
    for n in range(len(pts)):
        ks.append(_rank(pr_E[n]))
        d, q = negative_index(pr_S[n].real, phi.dim)
        ss.append(d)
        qs.append(q)
    rep = combine("projectors", parts, tol)
    constant = len(set(ks)) <= 1 and len(set(qs)) <= 1 and len(set(ss)) <= 1
    rep.details.update(k=ks[0] if ks else None, dim_S=ss[0] if ss else None,
                       q=qs[0] if qs else None, ranks_constant=constant)
    if not constant:
        rep.passed = False
        rep.error = f"rank fluctuation: rank E in {sorted(set(ks))}, q in {sorted(set(qs))}"
    return rep


def _section_jets(M: J.Jet) -> J.Jet:
    return J.columns(M)


def _phi_powers(phi: GeneralizedF, pts):
    P = phi.jet(pts)
    P2 = J.matmul(P, P)
    return P, P2


def s_concomitant_values(P: J.Jet, P2: J.Jet, U: J.Jet, V: J.Jet, m: int) -> np.ndarray:
    """``S(U_k, V_l)`` for section batches: ``[PU,PV] - [P2U,P2V] + P[PU,P2V] + P[P2U,PV]``."""
    PU, PV = J.contract("ij,kj->ki", P, U), J.contract("ij,kj->ki", P, V)
    P2U, P2V = J.contract("ij,kj->ki", P2, U), J.contract("ij,kj->ki", P2, V)
    c = J.courant_pairs
    inner = c(PU, P2V, m) + c(P2U, PV, m)
    return c(PU, PV, m) - c(P2U, P2V, m) + J.apply(P.val, inner)


def nijenhuis_values(P: J.Jet, U: J.Jet, V: J.Jet, m: int) -> np.ndarray:
    """``N(U_k, V_l) = [PU,PV] - P[PU,V] - P[U,PV] + P^2[U,V]``."""
    PU, PV = J.contract("ij,kj->ki", P, U), J.contract("ij,kj->ki", P, V)
    c = J.courant_pairs
    Pv = P.val
    return (c(PU, PV, m) - J.apply(Pv, c(PU, V, m) + c(U, PV, m))
            + J.apply(Pv @ Pv, c(U, V, m)))


def _basis(n: int, npts: int, m: int) -> J.Jet:
    return J.identity(n, (npts,), m)


def _stack_sections(sections: Sequence[BigSection], pts) -> J.Jet:
    js = [s.jet(pts) for s in sections]
    val = np.stack([j.val for j in js], axis=1)
    grad = np.stack([j.grad for j in js], axis=1)
    return J.Jet(val, grad)


def s_concomitant(phi: GeneralizedF, A: BigSection, B: BigSection, points) -> np.ndarray:
    """Values (N, 2m) of the concomitant ``S_Phi(A, B)``."""
    pts = np.atleast_2d(points)
    P, P2 = _phi_powers(phi, pts)
    return s_concomitant_values(P, P2, _stack_sections([A], pts), _stack_sections([B], pts),
                                phi.dim)[:, 0, 0]


def nijenhuis_torsion(phi: GeneralizedF, A: BigSection, B: BigSection, points) -> np.ndarray:
    """Values (N, 2m) of the Courant-Nijenhuis torsion ``N_Phi(A, B)``."""
    pts = np.atleast_2d(points)
    P = phi.jet(pts)
    return nijenhuis_values(P, _stack_sections([A], pts), _stack_sections([B], pts),
                            phi.dim)[:, 0, 0]


def check_integrability(phi: GeneralizedF, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """``S_Phi`` on all pairs of coordinate basis sections (tensoriality makes that enough)."""
    pts = np.atleast_2d(points)
    m = phi.dim
    P, P2 = _phi_powers(phi, pts)
    E = _basis(2 * m, len(pts), m)
    S = s_concomitant_values(P, P2, E, E, m)
    return make_report("integrability", S, pts, tol)


def check_LS_torsion(phi: GeneralizedF, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """``N_Phi(pr_L A, pr_S B)`` on basis sections."""
    pts = np.atleast_2d(points)
    m = phi.dim
    P, P2 = _phi_powers(phi, pts)
    I = _basis(2 * m, len(pts), m)
    U = J.columns(-P2)
    V = J.columns(I + P2)
    N = nijenhuis_values(P, U, V, m)
    return make_report("ls-torsion", N, pts, tol)


def classical_square_residuals(phi: GeneralizedF, points) -> dict:
    """Residuals of ``sharp_pi~ = 0``, ``flat_sigma~ = 0`` and ``Pi^2 = Pi`` for ``Pi = -A^2 - sharp flat``."""
    pts = np.atleast_2d(points)
    P = phi.values(pts)
    m = phi.dim
    A, sh, fl = P[:, :m, :m], P[:, :m, m:], P[:, m:, :m]
    At = np.swapaxes(A, -1, -2)
    pi_t = A @ sh - sh @ At
    sig_t = fl @ A - At @ fl
    Pi = -(A @ A) - sh @ fl
    return {
        "pi_tilde": float(np.max(np.abs(pi_t))),
        "sigma_tilde": float(np.max(np.abs(sig_t))),
        "projector": float(np.max(np.abs(Pi @ Pi - Pi))),
    }


# ------------------------------------------------------------------ classical F


def _sample_for(domain: CoordinateDomain, n: int = 24, seed: int = 7) -> np.ndarray:
    return domain.sample(n, seed)


def yano_residual(F: EndField, points) -> float:
    v = F.evaluate(points)
    return float(np.max(np.abs(v @ v @ v + v))) if v.size else 0.0


def from_classical_F(F: EndField, domain: CoordinateDomain, tol: float = 1e-9) -> GeneralizedF:
    r = yano_residual(F, _sample_for(domain))
    if r > tol:
        raise StructureError(f"F^3 + F = 0 violated (residual {r:.3e})")
    m = domain.dim
    return GeneralizedF(F, BivectorField.zero(m), TwoFormField.zero(m), domain)


def classical_crf_values(F: J.Jet, m: int) -> np.ndarray:
    """Residual of the single non-skew CRF condition on coordinate fields ``d_a, d_b``.

    ``N_F(X,Y) - [F2X,F2Y] + F([X,FY] + [F2X,FY]) - F2([F2X,Y] + [F2X,F2Y] + [X,Y])``.
    """
    npts = F.val.shape[0]
    F2 = J.matmul(F, F)
    E = J.identity(m, (npts,), m)
    X, FX, F2X = J.columns(E), J.columns(F), J.columns(F2)

    def br(U, V):
        return J.lie_bracket(U.expand(-2), V.expand(-3))

    Fv, F2v = F.val, F2.val
    # coordinate fields commute, so [X, Y] = 0 and the N_F(X,Y) terms reduce accordingly
    N = br(FX, FX) - J.apply(Fv, br(FX, X) + br(X, FX))
    rhs = (br(F2X, F2X) - J.apply(Fv, br(X, FX) + br(F2X, FX))
           + J.apply(F2v, br(F2X, X) + br(F2X, F2X)))
    return N - rhs


def check_classical_crf(F: EndField, domain: CoordinateDomain, points,
                        tol: float = DEFAULT_TOL) -> CheckReport:
    """Single-condition classical CRF test, cross-checked against the generalized one."""
    pts = np.atleast_2d(points)
    Fj = J.Jet.of_field(F, pts)
    rep = make_report("classical-crf", classical_crf_values(Fj, domain.dim), pts, tol)
    gen = check_integrability(from_classical_F(F, domain), pts, tol)
    rep.details.update(generalized_residual=gen.residual, generalized_pass=gen.passed,
                       agree=gen.passed == rep.passed)
    return rep


# ------------------------------------------------------------------ skew classical


def _field_matrix(fields: Sequence) -> np.ndarray:
    """m x r matrix whose columns are the given vector fields / one-forms."""
    return np.stack([f.comp for f in fields], axis=1)


def _check_nondegenerate(Om: np.ndarray, domain: CoordinateDomain, what: str):
    if Om.size == 0:
        return
    pts = _sample_for(domain)
    from .tensorcalc import evaluate_array

    vals, bad = evaluate_array(Om, pts)
    if bad.any():
        raise StructureError(f"{what} is singular at a sample point")
    dets = np.abs(np.linalg.det(vals))
    if np.min(dets) < 1e-10:
        k = int(np.argmin(dets))
        raise StructureError(f"{what} is degenerate at {pts[k].tolist()} (|det| = {dets[k]:.2e})")


def from_V_sigma(V: Sequence[VectorField], sigma: TwoFormField,
                 domain: CoordinateDomain) -> GeneralizedF:
    """Skew classical structure of the pair (span V, sigma) with sigma non-degenerate on V.

    ``Om = V^T S V``, ``pr_V = V Om^-1 V^T S``, ``P = -V Om^-1 V^T`` and
    ``sigma' = sigma(pr_V., pr_V.)``.
    """
    m = domain.dim
    if not V:
        return GeneralizedF.zero(domain)
    Vm = _field_matrix(V)
    S = sigma.comp
    Om = emat(Vm.T, emat(S, Vm))
    _check_nondegenerate(Om, domain, "sigma restricted to V")
    Oi = symbolic_inverse(Om)
    VOi = emat(Vm, Oi)
    Pm = _neg(emat(VOi, Vm.T))
    prV = emat(VOi, emat(Vm.T, S))
    Sp = emat(prV.T, emat(S, prV))
    return GeneralizedF(EndField.zero(m), BivectorField(Pm), TwoFormField(Sp), domain)


def from_Sigma_pi(Sigma: Sequence[OneFormField], pi: BivectorField,
                  domain: CoordinateDomain) -> GeneralizedF:
    """Dual construction: ``Om = Sg^T P Sg``, ``S = -Sg Om^-1 Sg^T``, ``pi' = pi(pr., pr.)``."""
    m = domain.dim
    if not Sigma:
        return GeneralizedF.zero(domain)
    Sg = _field_matrix(Sigma)
    P = pi.comp
    Om = emat(Sg.T, emat(P, Sg))
    _check_nondegenerate(Om, domain, "pi restricted to Sigma")
    Oi = symbolic_inverse(Om)
    SOi = emat(Sg, Oi)
    Sm = _neg(emat(SOi, Sg.T))
    pr = emat(SOi, emat(Sg.T, P))
    Pp = emat(pr.T, emat(P, pr))
    return GeneralizedF(EndField.zero(m), BivectorField(Pp), TwoFormField(Sm), domain)


def _span_residual(vectors: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Component of ``vectors`` (N, ..., m) outside the column span of ``basis`` (N, m, r)."""
    Q, _ = np.linalg.qr(basis)
    flat = vectors.reshape(vectors.shape[0], -1, vectors.shape[-1])
    proj = np.einsum("nir,nkj,njr->nki", Q, flat, Q)
    return (flat - proj).reshape(vectors.shape)


def check_graph_theta(F: Sequence[VectorField], theta: TwoFormField, points,
                      tol: float = DEFAULT_TOL) -> CheckReport:
    """Big-isotropic graph of ``flat_theta`` over a subbundle F: isotropy, foliation, d theta."""
    pts = np.atleast_2d(points)
    m = theta.dim
    if not F:
        return CheckReport("graph-theta", 0.0, None, True)
    Xs = [J.Jet.of_field(X, pts) for X in F]
    th = J.Jet.of_field(theta, pts)
    Xv = np.stack([X.val for X in Xs], axis=-1)  # (N, m, r)
    # isotropy: g((X, i_X th), (Y, i_Y th)) = (th(X,Y) + th(Y,X)) / 2
    T = np.einsum("nia,nij,njb->nab", Xv, th.val, Xv)
    iso = 0.5 * (T + np.swapaxes(T, -1, -2))
    br = np.stack([np.stack([J.lie_bracket(a, b) for b in Xs], axis=1) for a in Xs], axis=1)
    fol = _span_residual(br, Xv)
    dth = J.d_two_form(th)
    dres = np.einsum("nijk,nia,njb->nabk", dth, Xv, Xv)
    return combine("graph-theta", [
        make_report("isotropy", iso, pts, tol),
        make_report("foliation", fol, pts, tol),
        make_report("dtheta", dres, pts, tol),
    ], tol)


def check_graph_P(Sigma: Sequence[OneFormField], P: BivectorField, points,
                  tol: float = DEFAULT_TOL) -> CheckReport:
    """Graph of ``sharp_P`` over Sigma: closure under the P-bracket and ``[P,P](Sigma, Sigma, .) = 0``."""
    pts = np.atleast_2d(points)
    if not Sigma:
        return CheckReport("graph-P", 0.0, None, True)
    Sv = np.stack([s.evaluate(pts) for s in Sigma], axis=-1)
    brs = np.stack([np.stack([one_form_P_bracket(a, b, P).evaluate(pts) for b in Sigma], axis=1)
                    for a in Sigma], axis=1)
    closure = _span_residual(brs, Sv)
    PP = schouten_bracket(P, P).evaluate(pts)
    sch = np.einsum("nijk,nia,njb->nabk", PP, Sv, Sv)
    return combine("graph-P", [
        make_report("closure", closure, pts, tol),
        make_report("schouten", sch, pts, tol),
    ], tol)


# ------------------------------------------------------------------ almost contact


@dataclass(frozen=True, eq=False)
class AlmostContactData:
    """Generalized almost contact data ``(P, theta, F, Z_a, xi^a)`` of codimension h."""

    P: BivectorField
    theta: TwoFormField
    F: EndField
    Z: Tuple[VectorField, ...]
    xi: Tuple[OneFormField, ...]
    domain: CoordinateDomain

    @property
    def h(self) -> int:
        return len(self.Z)


def almost_contact_residuals(d: AlmostContactData, points) -> dict:
    pts = np.atleast_2d(points)
    m = d.domain.dim
    P = -d.P.evaluate(pts)  # sharp_P as a matrix
    Pm = d.P.evaluate(pts)
    th = d.theta.evaluate(pts)  # flat_theta = -th
    F = d.F.evaluate(pts)
    Zs = [z.evaluate(pts) for z in d.Z]
    xs = [x.evaluate(pts) for x in d.xi]
    Ft = np.swapaxes(F, -1, -2)
    res = {}
    # P(a o F, b) = P(a, b o F): F^T-conjugation symmetry
    res["P(aF,b)=P(a,bF)"] = Ft @ Pm - Pm @ F
    res["theta(FX,Y)=theta(X,FY)"] = Ft @ th - th @ F
    proj = -np.eye(m) - P @ (-th)
    for a, (Z, x) in enumerate(zip(Zs, xs)):
        res[f"F(Z_{a + 1})=0"] = np.einsum("nij,nj->ni", F, Z)
        res[f"xi^{a + 1} o F=0"] = np.einsum("ni,nij->nj", x, F)
        res[f"i(Z_{a + 1})theta=0"] = np.einsum("ni,nij->nj", Z, th)
        res[f"i(xi^{a + 1})P=0"] = np.einsum("ni,nij->nj", x, Pm)
        proj = proj + np.einsum("ni,nj->nij", Z, x)
        for b, Zb in enumerate(Zs):
            res[f"xi^a(Z_b)=delta^a_b [a={a + 1}, b={b + 1}]"] = (
                np.einsum("ni,ni->n", x, Zb) - (1.0 if a == b else 0.0))
    res["F^2=-Id-sharp_P flat_theta+sum xi(x)Z"] = F @ F - proj
    return {k: (float(np.max(np.abs(v))) if np.size(v) else 0.0) for k, v in res.items()}


def from_almost_contact(P: BivectorField, theta: TwoFormField, F: EndField,
                        Z: Sequence[VectorField], xi: Sequence[OneFormField],
                        domain: CoordinateDomain, tol: float = 1e-9):
    """Validate the almost contact identities and return ``(Phi, data)``."""
    if len(Z) != len(xi):
        raise StructureError("as many vector fields Z_a as one-forms xi^a are required")
    data = AlmostContactData(P, theta, F, tuple(Z), tuple(xi), domain)
    res = almost_contact_residuals(data, _sample_for(domain))
    bad = [k for k, v in res.items() if v > tol]
    if bad:
        # the normalization identity is reported under its conventional name
        names = ["xi^a(Z_b)=delta^a_b" if k.startswith("xi^a(Z_b)") else k for k in bad]
        raise StructureError("almost contact identity violated: " + ", ".join(dict.fromkeys(names)))
    return GeneralizedF(F, P, theta, domain), data


def _pad(a: np.ndarray, n: int) -> np.ndarray:
    out = zeros((n,) * a.ndim)
    out[tuple(slice(0, s) for s in a.shape)] = a
    return out


def lift_to_product(d: AlmostContactData) -> GeneralizedF:
    """``A' = F``, ``pi' = P + sum Z_a ^ d/dt^a``, ``sigma' = theta + sum xi^a ^ dt^a`` on M x R^h."""
    m, h = d.domain.dim, d.h
    n = m + h
    dom = d.domain.extended([(-1.0, 1.0)] * h)
    A = _pad(d.F.comp, n)
    Pm = _pad(d.P.comp, n)
    Sm = _pad(d.theta.comp, n)
    for a in range(h):
        t = m + a
        for i in range(m):
            z, x = d.Z[a][i], d.xi[a][i]
            Pm[i, t] = ec.add(Pm[i, t], z)
            Pm[t, i] = ec.sub(Pm[t, i], z)
            Sm[i, t] = ec.add(Sm[i, t], x)
            Sm[t, i] = ec.sub(Sm[t, i], x)
    return GeneralizedF(EndField(A), BivectorField(Pm), TwoFormField(Sm), dom)


def contact_frames(d: AlmostContactData):
    """Complementary frames: ``(Z_a, xi^a)`` has g-norm +1 and ``(Z_a, -xi^a)`` has -1."""
    pos = [BigSection(Z, x) for Z, x in zip(d.Z, d.xi)]
    neg = [BigSection(Z, -x) for Z, x in zip(d.Z, d.xi)]
    return neg, pos


def check_complementary_frames(phi: GeneralizedF, neg: Sequence[BigSection],
                               pos: Sequence[BigSection], points,
                               tol: float = DEFAULT_TOL) -> CheckReport:
    """Frames of S with g(Z_a, Z_a) = -1 (``neg``) and g(Z_al, Z_al) = +1 (``pos``)."""
    pts = np.atleast_2d(points)
    m = phi.dim
    P = phi.values(pts)
    frames = list(neg) + list(pos)
    signs = [-1.0] * len(neg) + [1.0] * len(pos)
    if not frames:
        return CheckReport("frames", 0.0, None, True)
    Zv = np.stack([f.evaluate(pts) for f in frames], axis=1)  # (N, r, 2m)
    G = J.pairing(Zv[:, :, None, :], Zv[:, None, :, :], m)
    target = np.diag(signs)
    phiZ = np.einsum("nij,nrj->nri", P, Zv)
    g = J.g_matrix(m)
    recon = -np.eye(2 * m) + sum(
        s * np.einsum("ni,nj->nij", Zv[:, r], Zv[:, r] @ g) for r, s in enumerate(signs))
    return combine("frames", [
        make_report("gram", G - target, pts, tol),
        make_report("kernel", phiZ, pts, tol),
        make_report("square", P @ P - recon, pts, tol),
    ], tol)


# ------------------------------------------------------------------ B-field


def b_field(phi: GeneralizedF, B: TwoFormField) -> GeneralizedF:
    """Conjugate Phi by ``e^B: (X, alpha) -> (X, alpha + i(X)B)``."""
    m = phi.dim
    Id = np.empty((m, m), dtype=object)
    Zr = zeros((m, m))
    for i in range(m):
        for j in range(m):
            Id[i, j] = ec.ONE if i == j else ec.ZERO
    b = _neg(B.comp)  # flat_B
    eB = np.block([[Id, Zr], [b, Id]])
    emB = np.block([[Id, Zr], [_neg(b), Id]])
    M = emat(eB, emat(phi.matrix(), emB))
    return GeneralizedF.from_matrix(M, phi.domain)
