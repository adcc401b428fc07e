import numpy as np
import pytest

from gencrf import catalog
from gencrf.checks import quadruple
from gencrf.exprcore import CoordinateDomain
from gencrf.genmetric import (
    GeneralizedMetric,
    MetricQuadruple,
    check_bracket_closure,
    check_compatibility,
    check_crfk,
    check_crfk_closure_quadruple,
    check_crfk_lie,
    check_crfk_nabla,
    check_gualtieri_kahler,
    check_metric_axioms,
    check_partial_kahler,
    check_quadruple_roundtrip,
    complementary_structure,
    induced_F_pm,
    reconstruct_phi,
    v_pm_lift,
    sharp_G,
)
from gencrf.report import PreconditionError
from gencrf.tensorcalc import EndField, MetricField, TwoFormField, VectorField
from oracles import g_matrix, random_quadruple

DOM2 = CoordinateDomain.cube(2)


def metric(gamma, psi, dim):
    return GeneralizedMetric(MetricField.parse(gamma, dim), TwoFormField.parse(psi, dim),
                             CoordinateDomain.cube(dim))


def test_sharp_G_hand_values():
    # gamma = diag(2, 1), psi = 0: sharp_G (X, a) = (gamma^-1 a, gamma X)
    G = metric([["2", "0"], ["0", "1"]], [["0", "0"], ["0", "0"]], 2)
    S = G.jets(np.zeros((1, 2))).sharp.val[0]
    assert np.allclose(S, [[0, 0, 0.5, 0], [0, 0, 0, 1], [2, 0, 0, 0], [0, 1, 0, 0]])


def test_v_pm_are_eigenvectors_numerically():
    G = metric([["2 + x1^2", "x2"], ["x2", "3"]], [["0", "x1"], ["-x1", "0"]], 2)
    pts = DOM2.sample(20, 0)
    X = VectorField.parse(["1", "x1"], 2)
    for sign in (1, -1):
        v = v_pm_lift(G, X, sign)
        assert np.allclose(sharp_G(G, v, pts), sign * v.evaluate(pts))
    # G(u, u) = 2 g(sharp_G u, u) is positive: numpy eigenvalues of the Gram matrix
    S = G.jets(pts).sharp.val
    Gm = 2 * np.swapaxes(S, 1, 2) @ g_matrix(2)
    assert np.all(np.linalg.eigvalsh(0.5 * (Gm + np.swapaxes(Gm, 1, 2))) > 0)


def test_metric_axioms_on_a_non_constant_metric():
    G = metric([["2 + sin(x1)", "0.3*x2"], ["0.3*x2", "2"]], [["0", "x1*x2"], ["-x1*x2", "0"]], 2)
    assert check_metric_axioms(G, DOM2.sample(50, 1)).passed


def test_indefinite_gamma_fails_positivity():
    G = metric([["1", "0"], ["0", "-1"]], [["0", "0"], ["0", "0"]], 2)
    rep = check_metric_axioms(G, DOM2.sample(5, 1))
    assert not rep.passed


@pytest.mark.parametrize("seed, ranks", [(0, (2, 2)), (1, (2, 0)), (2, (0, 2)), (3, (2, 2))])
def test_reconstruction_against_v_pm_action(seed, ranks):
    rng = np.random.default_rng(seed)
    Q = random_quadruple(rng, 3, *ranks)
    pts = Q.domain.sample(20, seed)
    phi = reconstruct_phi(Q)
    P = phi.values(pts)
    mj = Q.metric.jets(pts)
    # independent oracle: Phi v_pm(X) = v_pm(F_pm X) for all X
    for sign, F in ((1, Q.Fp), (-1, Q.Fm)):
        v = mj.lift(sign).val
        assert np.allclose(P @ v, v @ F.evaluate(pts), atol=1e-10)
    Fp, Fm = induced_F_pm(Q.metric, phi)
    assert np.allclose(Fp.evaluate(pts), Q.Fp.evaluate(pts), atol=1e-10)
    assert np.allclose(Fm.evaluate(pts), Q.Fm.evaluate(pts), atol=1e-10)
    assert check_compatibility(Q.metric, phi, pts).passed
    assert check_quadruple_roundtrip(Q.metric, phi, pts).passed


def test_complementary_quadruple():
    Q = random_quadruple(np.random.default_rng(7), 3, 2, 2)
    pts = Q.domain.sample(15, 0)
    phic = complementary_structure(Q.metric, reconstruct_phi(Q))
    Fp, Fm = induced_F_pm(Q.metric, phic)
    assert np.allclose(Fp.evaluate(pts), Q.Fp.evaluate(pts), atol=1e-10)
    assert np.allclose(Fm.evaluate(pts), -Q.Fm.evaluate(pts), atol=1e-10)


def test_incompatible_structure_detected_by_both_tests():
    d = catalog.get("contact-r3").definition
    G = metric([["1", "0", "0"], ["0", "2", "0"], ["0", "0", "1"]],
               [["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]], 3)
    rep = check_compatibility(G, d.phi, d.domain.sample(10, 0))
    assert not rep.passed and not rep.details["tensor_pass"] and rep.details["agree"]


def test_flat_kahler_all_formulations_pass():
    d = catalog.get("flat-kahler-r2").definition
    Q = quadruple(d)
    pts = d.domain.sample(20, 0)
    for chk in (check_crfk_closure_quadruple, check_crfk_lie, check_crfk_nabla,
                check_gualtieri_kahler, check_partial_kahler):
        assert chk(Q, pts).passed, chk.__name__
    assert check_bracket_closure(d.metric, d.phi, pts).passed


def test_crfk_disagreement_is_reported_for_broken_torus():
    d = catalog.get("crfk-torus-broken").definition
    rep = check_crfk(quadruple(d), d.domain.sample(30, 0))
    assert not rep.passed and rep.details["agree"]


def test_non_kahler_almost_complex_quadruple_fails_gualtieri():
    # F+ = F- = a non-integrable almost complex structure on R^4
    dom = CoordinateDomain.cube(4)
    F = EndField.parse([["0", "-1", "0", "0"], ["1", "0", "0", "0"],
                        ["0", "x1", "0", "-1"], ["x1", "0", "1", "0"]], 4)
    pts = dom.sample(10, 0)
    Fv = F.evaluate(pts)
    assert np.allclose(Fv @ Fv, -np.eye(4))
    # F is not orthogonal for the flat metric, so use the Hermitian average (I + F^T F) / 2
    Q = MetricQuadruple(MetricField.parse(_hermitian(F), 4), TwoFormField.zero(4), F, F, dom)
    rep = check_gualtieri_kahler(Q, pts)
    assert not rep.passed


def _hermitian(F):
    from gencrf import exprcore as ec
    from gencrf.tensorcalc import emat

    I = np.empty((4, 4), dtype=object)
    for i in range(4):
        for j in range(4):
            I[i, j] = ec.ONE if i == j else ec.ZERO
    H = np.vectorize(lambda a, b: ec.mul(ec.HALF, ec.add(a, b)), otypes=[object])(I, emat(F.comp.T, F.comp))
    return np.vectorize(ec.to_str, otypes=[object])(H).tolist()


def test_partial_kahler_requires_closed_psi():
    d = catalog.get("gk-nonclosed-r4").definition
    with pytest.raises(PreconditionError):
        check_partial_kahler(quadruple(d), d.domain.sample(10, 0))
