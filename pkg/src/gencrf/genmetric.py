"""Generalized Riemannian metrics ``G = (gamma, psi)`` and CRFK criteria.

With ``Gm = [gamma_ij]`` and ``Ps = [psi_ij]``:

    phi     = Gm^-1 Ps            (= -sharp_gamma flat_psi)
    flat_b  = Gm (I - phi^2)      (the metric beta)
    sharp_G = [[phi, Gm^-1], [flat_b, phi^T]]
    v_pm X  = (X, (-Ps +- Gm) X)  (= (X, flat_{psi +- gamma} X))
    F_pm    = A + sharp_pi flat_{psi +- gamma}

Everything a checker needs is assembled from first-order jets of the
input components, so no symbolic matrix inverse is involved there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import exprcore as ec
from . import jets as J
from .bigcourant import BigSection
from .exprcore import CoordinateDomain
from .genstruct import (
    GeneralizedF,
    check_integrability,
    classical_crf_values,
    projectors,
    yano_residual,
)
from .report import DEFAULT_TOL, CheckReport, PreconditionError, StructureError, combine, make_report
from .tensorcalc import (
    EndField,
    MetricField,
    TwoFormField,
    VectorField,
    OneFormField,
    emat,
    symbolic_inverse,
)


def _neg(a):
    return np.vectorize(ec.neg, otypes=[object])(a)


@dataclass(frozen=True, eq=False)
class GeneralizedMetric:
    gamma: MetricField
    psi: TwoFormField
    domain: CoordinateDomain

    @property
    def dim(self) -> int:
        return self.domain.dim

    def jets(self, points) -> "MetricJets":
        return MetricJets.build(J.Jet.of_field(self.gamma, points), J.Jet.of_field(self.psi, points))

    def sharp_G_matrix(self) -> np.ndarray:
        """Symbolic 2m x 2m matrix of sharp_G (uses a symbolic inverse of gamma)."""
        Gi = symbolic_inverse(self.gamma.comp)
        phi = emat(Gi, self.psi.comp)
        m = self.dim
        I = np.empty((m, m), dtype=object)
        for i in range(m):
            for j in range(m):
                I[i, j] = ec.ONE if i == j else ec.ZERO
        beta = emat(self.gamma.comp, np.vectorize(ec.sub, otypes=[object])(I, emat(phi, phi)))
        return np.block([[phi, Gi], [beta, phi.T]])


@dataclass(frozen=True, eq=False)
class MetricQuadruple:
    gamma: MetricField
    psi: TwoFormField
    Fp: EndField
    Fm: EndField
    domain: CoordinateDomain

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def metric(self) -> GeneralizedMetric:
        return GeneralizedMetric(self.gamma, self.psi, self.domain)

    def F(self, sign: int) -> EndField:
        return self.Fp if sign > 0 else self.Fm


class MetricJets:
    """Jets of gamma, psi and the derived phi, beta, sharp_G at a batch of points."""

    def __init__(self, gamma: J.Jet, psi: J.Jet, ginv: J.Jet, phi: J.Jet, beta: J.Jet, sharp: J.Jet):
        self.gamma, self.psi, self.ginv = gamma, psi, ginv
        self.phi, self.beta, self.sharp = phi, beta, sharp

    @classmethod
    def build(cls, gamma: J.Jet, psi: J.Jet) -> "MetricJets":
        m = gamma.val.shape[-1]
        n = gamma.val.shape[0]
        ginv = J.inverse(gamma)
        phi = J.matmul(ginv, psi)
        I = J.identity(m, (n,), m)
        beta = J.matmul(gamma, I - J.matmul(phi, phi))
        sharp = J.block([[phi, ginv], [beta, phi.swap()]])
        return cls(gamma, psi, ginv, phi, beta, sharp)

    @property
    def m(self) -> int:
        return self.gamma.val.shape[-1]

    def lift(self, sign: int) -> J.Jet:
        """Matrix (2m x m) jet of ``X -> v_pm X``."""
        n, m = self.gamma.val.shape[0], self.m
        I = J.identity(m, (n,), m)
        return J.block([[I], [-self.psi + self.gamma.scale(float(sign))]])

    def G_matrix(self) -> np.ndarray:
        return 2.0 * np.swapaxes(self.sharp.val, -1, -2) @ J.g_matrix(self.m)


# ------------------------------------------------------------------ basic operations


def sharp_G(G: GeneralizedMetric, s: BigSection, points) -> np.ndarray:
    """Values (N, 2m) of ``sharp_G`` applied to a section."""
    pts = np.atleast_2d(points)
    return J.apply(G.jets(pts).sharp.val, s.evaluate(pts))


def v_pm_lift(G: GeneralizedMetric, X: VectorField, sign: int) -> BigSection:
    """``(X, flat_{psi +- gamma} X)`` as an expression-level section."""
    Ps, Gm = G.psi.comp, G.gamma.comp
    M = np.vectorize(lambda p, g: ec.add(ec.neg(p), g) if sign > 0 else ec.sub(ec.neg(p), g),
                     otypes=[object])(Ps, Gm)
    return BigSection(X, OneFormField(emat(M, X.comp)))


def check_metric_axioms(G: GeneralizedMetric, points, tol: float = 1e-10) -> CheckReport:
    pts = np.atleast_2d(points)
    mj = G.jets(pts)
    m = G.dim
    S = mj.sharp.val
    g = J.g_matrix(m)
    I2 = np.eye(2 * m)
    parts = [
        make_report("sharp-squared", S @ S - I2, pts, tol),
        make_report("isometry", np.swapaxes(S, -1, -2) @ g @ S - g, pts, tol),
        make_report("gamma-symmetric", mj.gamma.val - np.swapaxes(mj.gamma.val, -1, -2), pts, tol),
        make_report("psi-antisymmetric", mj.psi.val + np.swapaxes(mj.psi.val, -1, -2), pts, tol),
    ]
    # positivity: report how far the smallest eigenvalue is below the threshold
    for name, M in (("gamma", mj.gamma.val), ("beta", mj.beta.val), ("G", mj.G_matrix())):
        Ms = 0.5 * (M + np.swapaxes(M, -1, -2))
        ev = np.linalg.eigvalsh(Ms)[:, 0]
        r = np.maximum(0.0, 1e-10 - ev)
        rep = make_report(f"{name}-positive", r, pts, np.inf)
        rep.passed = bool(np.all(ev > 1e-10))
        rep.details["min_eigenvalue"] = float(ev.min())
        parts.append(rep)
    # V_pm: eigen-relations, orthogonality and G = +-2g
    vp, vm = mj.lift(1).val, mj.lift(-1).val  # (N, 2m, m)
    Gm = mj.G_matrix()
    parts.append(make_report("V+eigen", S @ vp - vp, pts, tol))
    parts.append(make_report("V-eigen", S @ vm + vm, pts, tol))
    parts.append(make_report("V-orthogonal", np.swapaxes(vp, -1, -2) @ g @ vm, pts, tol))
    for sgn, v in ((1.0, vp), (-1.0, vm)):
        vt = np.swapaxes(v, -1, -2)
        parts.append(make_report(f"G=({'+' if sgn > 0 else '-'})2g",
                                 vt @ Gm @ v - sgn * 2.0 * (vt @ g @ v), pts, tol))
    return combine("metric-axioms", parts, tol)


# ------------------------------------------------------------------ compatibility


def _phi_blocks(P: np.ndarray, m: int):
    A = P[..., :m, :m]
    Pi = -P[..., :m, m:]
    S = -P[..., m:, :m]
    return A, Pi, S


def check_compatibility(G: GeneralizedMetric, phi: GeneralizedF, points,
                        tol: float = DEFAULT_TOL) -> CheckReport:
    """Commutation ``sharp_G Phi = Phi sharp_G`` and, independently, the two tensor conditions.

    With ``W = Gm Pi Gm``: ``A^T Gm + Gm A = phi^T W - W phi`` and
    ``S = W - (phi^2)^T W + [A, phi]^T Gm``.
    """
    pts = np.atleast_2d(points)
    m = G.dim
    mj = G.jets(pts)
    P = phi.values(pts)
    Sg = mj.sharp.val
    comm = make_report("commutation", Sg @ P - P @ Sg, pts, tol)
    A, Pi, S = _phi_blocks(P, m)
    Gm, f = mj.gamma.val, mj.phi.val
    tr = lambda x: np.swapaxes(x, -1, -2)
    W = Gm @ Pi @ Gm
    h1 = tr(A) @ Gm + Gm @ A - (tr(f) @ W - W @ f)
    h2 = S - (W - tr(f @ f) @ W + tr(A @ f - f @ A) @ Gm)
    r1, r2 = make_report("H1", h1, pts, tol), make_report("H2", h2, pts, tol)
    rep = comm
    rep.name = "metric-compat"
    rep.details.update(H1=r1.residual, H2=r2.residual, tensor_pass=r1.passed and r2.passed,
                       agree=(r1.passed and r2.passed) == comm.passed)
    return rep


def induced_F_pm_values(G: GeneralizedMetric, phi: GeneralizedF, points):
    pts = np.atleast_2d(points)
    m = G.dim
    mj = G.jets(pts)
    P = phi.values(pts)
    A, sh = P[..., :m, :m], P[..., :m, m:]
    Gm, Ps = mj.gamma.val, mj.psi.val
    return A + sh @ (-Ps + Gm), A + sh @ (-Ps - Gm)


def induced_F_pm(G: GeneralizedMetric, phi: GeneralizedF) -> Tuple[EndField, EndField]:
    """``F_pm = A + sharp_pi flat_{psi +- gamma}`` as expression fields."""
    A = phi.A.comp
    sh = _neg(phi.pi.comp)
    out = []
    for sign in (1, -1):
        M = np.vectorize(lambda p, g: ec.add(ec.neg(p), g) if sign > 0 else ec.sub(ec.neg(p), g),
                         otypes=[object])(G.psi.comp, G.gamma.comp)
        out.append(EndField(np.vectorize(ec.add, otypes=[object])(A, emat(sh, M))))
    return out[0], out[1]


def reconstruct_phi(Q: MetricQuadruple) -> GeneralizedF:
    """Rebuild Phi from ``(gamma, psi, F+, F-)``.

    ``sharp_pi = (F+ - F-) Gm^-1 / 2``, ``A = (F+ (I + phi) + F- (I - phi)) / 2`` and
    ``flat_sigma = Gm (A phi - phi A + sharp_pi beta)``.
    """
    m = Q.dim
    Gi = symbolic_inverse(Q.gamma.comp)
    add = np.vectorize(ec.add, otypes=[object])
    sub = np.vectorize(ec.sub, otypes=[object])
    half = lambda a: np.vectorize(lambda x: ec.mul(ec.HALF, x), otypes=[object])(a)
    Fp, Fm = Q.Fp.comp, Q.Fm.comp
    phi = emat(Gi, Q.psi.comp)
    sharp_pi = half(emat(sub(Fp, Fm), Gi))
    A = half(add(add(Fp, Fm), emat(sub(Fp, Fm), phi)))
    I = np.empty((m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            I[i, j] = ec.ONE if i == j else ec.ZERO
    beta = emat(Q.gamma.comp, sub(I, emat(phi, phi)))
    flat_sigma = emat(Q.gamma.comp, add(sub(emat(A, phi), emat(phi, A)), emat(sharp_pi, beta)))
    M = np.block([[A, sharp_pi], [flat_sigma, _neg(A.T)]])
    return GeneralizedF.from_matrix(M, Q.domain)


def phi_from_quadruple_jet(mj: MetricJets, Fp: J.Jet, Fm: J.Jet) -> J.Jet:
    """Jet version of :func:`reconstruct_phi`."""
    n, m = Fp.val.shape[0], mj.m
    I = J.identity(m, (n,), m)
    D = Fp - Fm
    sharp_pi = J.matmul(D, mj.ginv).scale(0.5)
    A = (Fp + Fm + J.matmul(D, mj.phi)).scale(0.5)
    inner = J.matmul(A, mj.phi) - J.matmul(mj.phi, A) + J.matmul(sharp_pi, mj.beta)
    flat_sigma = J.matmul(mj.gamma, inner)
    return J.block([[A, sharp_pi], [flat_sigma, -A.swap()]])


def complementary_structure(G: GeneralizedMetric, phi: GeneralizedF) -> GeneralizedF:
    """``Phi^c = sharp_G o Phi``."""
    M = emat(G.sharp_G_matrix(), phi.matrix())
    return GeneralizedF.from_matrix(M, phi.domain)


def check_quadruple_roundtrip(G: GeneralizedMetric, phi: GeneralizedF, points,
                              tol: float = DEFAULT_TOL) -> CheckReport:
    """``reconstruct(induced_F_pm(G, Phi)) = Phi`` and the complementary quadruple ``(F+, -F-)``."""
    pts = np.atleast_2d(points)
    mj = G.jets(pts)
    Fp, Fm = induced_F_pm_values(G, phi, pts)
    zero = np.zeros(Fp.shape + (G.dim,))
    back = phi_from_quadruple_jet(mj, J.Jet(Fp, zero), J.Jet(Fm, zero)).val
    P = phi.values(pts)
    Pc = mj.sharp.val @ P
    m = G.dim
    A, sh = Pc[..., :m, :m], Pc[..., :m, m:]
    Fpc = A + sh @ (-mj.psi.val + mj.gamma.val)
    Fmc = A + sh @ (-mj.psi.val - mj.gamma.val)
    return combine("quadruple-roundtrip", [
        make_report("roundtrip", back - P, pts, tol),
        make_report("complementary+", Fpc - Fp, pts, tol),
        make_report("complementary-", Fmc + Fm, pts, tol),
        make_report("cc", mj.sharp.val @ Pc - P, pts, tol),
    ], tol)


def quadruple_invariants(Q: MetricQuadruple, points, tol: float = 1e-9) -> dict:
    pts = np.atleast_2d(points)
    g = Q.gamma.evaluate(pts)
    out = {}
    for name, F in (("F+", Q.Fp), ("F-", Q.Fm)):
        Fv = F.evaluate(pts)
        out[f"{name} yano"] = float(np.max(np.abs(Fv @ Fv @ Fv + Fv)))
        out[f"{name} gamma-skew"] = float(np.max(np.abs(np.swapaxes(Fv, -1, -2) @ g + g @ Fv)))
    return out


def _require_quadruple(Q: MetricQuadruple, pts):
    inv = quadruple_invariants(Q, pts)
    bad = {k: v for k, v in inv.items() if v > 1e-8}
    if bad:
        k = max(bad, key=bad.get)
        raise PreconditionError(f"quadruple invariant violated: {k}", bad[k])


# ------------------------------------------------------------------ CRFK


def _quad_jets(Q: MetricQuadruple, pts):
    mj = Q.metric.jets(pts)
    return mj, J.Jet.of_field(Q.Fp, pts), J.Jet.of_field(Q.Fm, pts)


def crfk9_values(mj: MetricJets, F: J.Jet, sign: int) -> np.ndarray:
    """``R[a, j, k] = gamma(F e_a, (nabla_k F) e_j) -+ (dpsi(F2 e_a, e_j, e_k) + dpsi(F e_a, F e_j, e_k)) / 2``."""
    C, _ = J.christoffel(mj.gamma)
    D = J.nabla_end(F, C)  # D[n, k, l, j]
    Fv, Gv = F.val, mj.gamma.val
    F2 = Fv @ Fv
    dpsi = J.d_two_form(mj.psi)
    lhs = np.einsum("nia,nil,nklj->najk", Fv, Gv, D)
    t1 = np.einsum("nijk,nia->najk", dpsi, F2)
    t2 = np.einsum("nilk,nia,nlj->najk", dpsi, Fv, Fv)
    return lhs - sign * 0.5 * (t1 + t2)


def check_crfk_nabla(Q: MetricQuadruple, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """Connection form: classical CRF for both F_pm plus the nabla-F identity."""
    pts = np.atleast_2d(points)
    _require_quadruple(Q, pts)
    mj, Fp, Fm = _quad_jets(Q, pts)
    m = Q.dim
    parts = []
    for sign, F in ((1, Fp), (-1, Fm)):
        s = "+" if sign > 0 else "-"
        parts.append(make_report(f"crf{s}", classical_crf_values(F, m), pts, tol))
        parts.append(make_report(f"nabla{s}", crfk9_values(mj, F, sign), pts, tol))
    return combine("crfk-nabla", parts, tol)


def crfk4_values(mj: MetricJets, F: J.Jet, sign: int) -> np.ndarray:
    """``dpsi(X, Y, .) -+ ((L_Y gamma)(X, .) - L_X(i_Y gamma))`` for X in H, Y in H or Q.

    X runs over ``-(F^2 + iF) e_a / 2`` and Y over the same fields and over
    ``(I + F^2) e_b``; returns residuals stacked as (N, a, b', m).
    """
    n, m = F.val.shape[0], mj.m
    F2 = J.matmul(F, F)
    I = J.identity(m, (n,), m)
    F2c, Fc = J.Jet(F2.val.astype(complex), F2.grad.astype(complex)), F
    prH = (F2c + Fc.scale(1j)).scale(-0.5)
    prQ = I + F2
    Xs = J.columns(prH)  # (N, m, m) complex
    Ys = J.Jet(np.concatenate([prH.swap().val, prQ.swap().val.astype(complex)], axis=1),
               np.concatenate([prH.swap().grad, prQ.swap().grad.astype(complex)], axis=1))
    gam = mj.gamma
    dpsi = J.d_two_form(mj.psi)
    lhs = np.einsum("nijk,nai,nbj->nabk", dpsi, Xs.val, Ys.val)
    # i(X) L_Y gamma = (L_Y gamma)(X, .)
    LYg = J.lie_2tensor(Ys, gam.expand(1))  # (N, b, m, m)
    t1 = np.einsum("nbik,nai->nabk", LYg, Xs.val)
    # L_X i(Y) gamma
    iYg = J.contract("i,ik->k", Ys, gam.expand(1))  # (N, b, m)
    t2 = J.lie_form(Xs.expand(-2), iYg.expand(-3))
    return lhs - sign * (t1 - t2)


def check_crfk_lie(Q: MetricQuadruple, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """Lie-derivative form: classical CRF for both F_pm plus the dpsi identity on H x (H + Q)."""
    pts = np.atleast_2d(points)
    _require_quadruple(Q, pts)
    mj, Fp, Fm = _quad_jets(Q, pts)
    m = Q.dim
    parts = []
    for sign, F in ((1, Fp), (-1, Fm)):
        s = "+" if sign > 0 else "-"
        parts.append(make_report(f"crf{s}", classical_crf_values(F, m), pts, tol))
        parts.append(make_report(f"lie{s}", crfk4_values(mj, F, sign), pts, tol))
    return combine("crfk-lie", parts, tol)


def closure_values(mj: MetricJets, P: J.Jet) -> dict:
    """Residuals of the five bracket closure conditions for (Phi, G) given as jets."""
    n, m2 = P.val.shape[0], P.val.shape[-1]
    m = m2 // 2
    I = J.identity(m2, (n,), m)
    Pc = J.Jet(P.val.astype(complex), P.grad.astype(complex))
    P2 = J.matmul(Pc, Pc)
    prE = (P2 + Pc.scale(1j)).scale(-0.5)
    prS = I + P2
    prp = (I + mj.sharp).scale(0.5)
    prm = (I - mj.sharp).scale(0.5)
    Ep, Em = J.matmul(prE, prp), J.matmul(prE, prm)
    Sp, Sm = J.matmul(prS, prp), J.matmul(prS, prm)
    cols = J.columns
    c = lambda U, V: J.courant_pairs(cols(U), cols(V), m)
    Iv = np.eye(m2)
    out = {}
    out["[E+,E+]"] = J.apply(Iv - Ep.val, c(Ep, Ep))
    out["[E+,S+]"] = J.apply(Iv - Ep.val - Sp.val, c(Ep, Sp))
    out["[E-,E-]"] = J.apply(Iv - Em.val, c(Em, Em))
    out["[E-,S-]"] = J.apply(Iv - Em.val - Sm.val, c(Em, Sm))
    out["[S+,S-]"] = J.apply(Iv - prS.val, c(Sp, Sm))
    return out


def check_bracket_closure(G: GeneralizedMetric, phi: GeneralizedF, points,
                          tol: float = DEFAULT_TOL) -> CheckReport:
    """Closure form, with the verdict of (Phi CRF, Phi^c CRF, [S+,S-] in S) attached."""
    pts = np.atleast_2d(points)
    mj = G.jets(pts)
    P = phi.jet(pts)
    parts = [make_report(k, v, pts, tol) for k, v in closure_values(mj, P).items()]
    rep = combine("crfk-closure", parts, tol)
    m = G.dim
    Pc = J.Jet(J.matmul(mj.sharp, P).val, J.matmul(mj.sharp, P).grad)
    from .genstruct import s_concomitant_values

    E = J.identity(2 * m, (len(pts),), m)
    sc = s_concomitant_values(Pc, J.matmul(Pc, Pc), E, E, m)
    int_c = make_report("integrability-c", sc, pts, tol)
    int_p = check_integrability(phi, pts, tol)
    spsm = rep.details["[S+,S-]"]["pass"]
    equiv = int_p.passed and int_c.passed and spsm
    rep.details.update(phi_integrable=int_p.passed, phic_integrable=int_c.passed,
                       prop_verdict=equiv, agree=equiv == rep.passed)
    return rep


def quadruple_phi_jet(Q: MetricQuadruple, pts) -> Tuple[MetricJets, J.Jet]:
    mj, Fp, Fm = _quad_jets(Q, pts)
    return mj, phi_from_quadruple_jet(mj, Fp, Fm)


def check_crfk_closure_quadruple(Q: MetricQuadruple, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """Closure form evaluated straight from the quadruple (Phi rebuilt on jets)."""
    pts = np.atleast_2d(points)
    _require_quadruple(Q, pts)
    mj, P = quadruple_phi_jet(Q, pts)
    parts = [make_report(k, v, pts, tol) for k, v in closure_values(mj, P).items()]
    return combine("crfk-closure", parts, tol)


def check_crfk(Q: MetricQuadruple, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """All three CRFK formulations; passes iff all pass, and records whether they agree."""
    pts = np.atleast_2d(points)
    reps = [check_crfk_closure_quadruple(Q, pts, tol), check_crfk_lie(Q, pts, tol),
            check_crfk_nabla(Q, pts, tol)]
    out = combine("crfk", reps, tol)
    verdicts = [r.passed for r in reps]
    out.details["agree"] = len(set(verdicts)) == 1
    if not out.details["agree"]:
        out.passed = False
        out.error = "CRFK formulations disagree: " + ", ".join(
            f"{r.name}={'pass' if r.passed else 'fail'}" for r in reps)
    return out


# ------------------------------------------------------------------ Kähler-type criteria


def gualtieri_values(mj: MetricJets, F: J.Jet, sign: int) -> np.ndarray:
    """``dpsi(X,Y,Z) -+ domega(JX,JY,JZ)`` with ``omega(X,Y) = gamma(JX, Y)``."""
    omega = J.contract("ki,kj->ij", F, mj.gamma)
    dom = J.d_two_form(omega)
    Jv = F.val
    pulled = np.einsum("nlpq,nla,npb,nqc->nabc", dom, Jv, Jv, Jv)
    return J.d_two_form(mj.psi) - sign * pulled


def check_gualtieri_kahler(Q: MetricQuadruple, points, tol: float = DEFAULT_TOL) -> CheckReport:
    pts = np.atleast_2d(points)
    mj, Fp, Fm = _quad_jets(Q, pts)
    m = Q.dim
    I = np.eye(m)
    for s, F in (("+", Fp), ("-", Fm)):
        r = float(np.max(np.abs(F.val @ F.val + I)))
        if r > 1e-9:
            raise PreconditionError(f"F{s} is not almost complex (F^2 + Id residual {r:.3e})", r)
    parts = []
    for sign, F in ((1, Fp), (-1, Fm)):
        s = "+" if sign > 0 else "-"
        parts.append(make_report(f"integrable{s}", classical_crf_values(F, m), pts, tol))
        parts.append(make_report(f"gualtieri{s}", gualtieri_values(mj, F, sign), pts, tol))
    return combine("gualtieri", parts, tol)


def check_partial_kahler(Q: MetricQuadruple, points, tol: float = DEFAULT_TOL) -> CheckReport:
    """With ``dpsi = 0``: ``gamma(FX, (nabla_Z F) Y) = 0`` and Q_pm parallel, for both signs."""
    pts = np.atleast_2d(points)
    mj, Fp, Fm = _quad_jets(Q, pts)
    dpsi = J.d_two_form(mj.psi)
    r = float(np.max(np.abs(dpsi))) if dpsi.size else 0.0
    if r > tol:
        raise PreconditionError(f"dpsi != 0 (residual {r:.3e})", r)
    C, _ = J.christoffel(mj.gamma)
    m, n = Q.dim, len(pts)
    I = J.identity(m, (n,), m)
    parts = []
    for sign, F in ((1, Fp), (-1, Fm)):
        s = "+" if sign > 0 else "-"
        D = J.nabla_end(F, C)
        Fv, Gv = F.val, mj.gamma.val
        parts.append(make_report(f"nablaF{s}", np.einsum("nia,nil,nklj->najk", Fv, Gv, D), pts, tol))
        prQ = I + J.matmul(F, F)
        # nabla_k (prQ e_j) = d_k prQ[:, j] + Gamma^i_{kl} prQ[l, j]
        nab = np.einsum("nijk->nkij", prQ.grad) + np.einsum("nikl,nlj->nkij", C, prQ.val)
        out = np.einsum("nil,nklj->nkij", np.eye(m) - prQ.val, nab)
        parts.append(make_report(f"Q{s}-parallel", out, pts, tol))
    return combine("partial-kahler", parts, tol)
