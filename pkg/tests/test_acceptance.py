"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal output) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import os
import subprocess
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from gencrf import catalog  # noqa: E402
from gencrf import exprcore as ec  # noqa: E402
from gencrf import tensorcalc as tc  # noqa: E402
from gencrf.bigcourant import BigSection, check_axiom_v  # noqa: E402
from gencrf.checks import quadruple  # noqa: E402
from gencrf.contact_sasaki import check_cosymplectic, check_generalized_sasakian  # noqa: E402
from gencrf.genmetric import (  # noqa: E402
    check_bracket_closure,
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
)
from gencrf.genstruct import (  # noqa: E402
    b_field,
    check_LS_torsion,
    check_classical_crf,
    check_integrability,
    check_projectors,
    from_classical_F,
    s_concomitant,
)
from gencrf.tensorcalc import (  # noqa: E402
    BivectorField,
    OneFormField,
    TwoFormField,
    VectorField,
)
from oracles import fd_grad, random_expr, random_poly, random_quadruple, values  # noqa: E402

SAMPLES = 200


def _pts(d, n=SAMPLES, seed=42):
    return d.domain.sample(n, seed)


def _fixtures(pred):
    return [(n, catalog.get(n).definition) for n in catalog.names() if pred(catalog.get(n).definition)]


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))) if a.size else 0.0


def _max(a):
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def _rand_field(cls, m, rng, depth=2):
    c = np.empty((m,) * cls.rank, dtype=object)
    if cls.rank == 1:
        for i in range(m):
            c[i] = random_expr(rng, m, depth)
        return cls(c)
    for i in range(m):
        c[i, i] = ec.ZERO
        for j in range(i + 1, m):
            c[i, j] = random_expr(rng, m, depth)
            c[j, i] = ec.neg(c[i, j])
    return cls(c)


# ------------------------------------------------------------------ criteria


def criterion_1():
    """Calculus kernel on 100 random fields at 100 points."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = {"d2": 0.0, "cartan": 0.0, "fd": 0.0, "schouten": 0.0}
    for k in range(100):
        m = 2 + k % 3
        pts = rng.uniform(-0.9, 0.9, (100, m))
        f = random_expr(rng, m, 3)
        a = _rand_field(OneFormField, m, rng)
        X = _rand_field(VectorField, m, rng)
        w = _rand_field(TwoFormField, m, rng)
        # d^2 = 0 on functions and one-forms
        worst["d2"] = max(worst["d2"], _max(tc.exterior_derivative(tc.differential(f, m)).evaluate(pts)))
        if m >= 3:
            worst["d2"] = max(worst["d2"], _max(tc.exterior_derivative(tc.exterior_derivative(a)).evaluate(pts)))
        # Cartan: L_X = i_X d + d i_X on one-forms and two-forms
        lhs = tc.lie_derivative(X, a).evaluate(pts)
        rhs = (tc.interior_product(X, tc.exterior_derivative(a))
               + tc.differential(a(X), m)).evaluate(pts)
        worst["cartan"] = max(worst["cartan"], _rel(lhs, rhs))
        if m >= 3:
            lhs = tc.lie_derivative(X, w).evaluate(pts)
            rhs = (tc.interior_product(X, tc.exterior_derivative(w))
                   + tc.exterior_derivative(tc.interior_product(X, w))).evaluate(pts)
            worst["cartan"] = max(worst["cartan"], _rel(lhs, rhs))
        # symbolic gradients against central differences
        sym = np.stack([values(np.array([ec.partial(f, i)], dtype=object), pts)[:, 0] for i in range(m)], -1)
        fd = fd_grad(np.array([f], dtype=object), pts)[:, 0, :]
        worst["fd"] = max(worst["fd"], _rel(sym, fd))
        # Schouten: [P, P](df, dg, dh) = 2 * Jacobiator of {u, v} = P(du, dv)
        if m >= 3 and k % 4 == 0:
            P = _rand_field(BivectorField, m, rng, 1)
            fs = [random_expr(rng, m, 2) for _ in range(3)]

            def br(u, v):
                return ec.total(ec.mul(P[i, j], ec.mul(ec.partial(u, i), ec.partial(v, j)))
                                for i in range(m) for j in range(m))

            g0, g1, g2 = fs
            jac = ec.total([br(g0, br(g1, g2)), br(g1, br(g2, g0)), br(g2, br(g0, g1))])
            S = tc.schouten_bracket(P, P)
            d = [np.array([ec.partial(g, i) for i in range(m)], dtype=object) for g in fs]
            Sv = S.evaluate(pts)
            dv = [values(x, pts) for x in d]
            lhs = np.einsum("nijk,ni,nj,nk->n", Sv, *dv)
            worst["schouten"] = max(worst["schouten"], _rel(lhs, 2 * values(np.array([jac]), pts)[:, 0]))
    secs = time.perf_counter() - t0
    ok = (worst["d2"] < 1e-9 and worst["cartan"] < 1e-9 and worst["fd"] < 1e-6
          and worst["schouten"] < 1e-9 and secs < 30)
    return ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f", {secs:.1f} s"


def criterion_2():
    """Courant axiom (v) on 50 random polynomial section triples."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for k in range(50):
        m = 1 + k % 4

        def sec():
            return BigSection(VectorField(np.array([random_poly(rng, m) for _ in range(m)], dtype=object)),
                              OneFormField(np.array([random_poly(rng, m) for _ in range(m)], dtype=object)))

        A, B, C = sec(), sec(), sec()
        worst = max(worst, check_axiom_v(A, B, C, rng.uniform(-1, 1, (100, m))))
    secs = time.perf_counter() - t0
    return worst < 1e-9 and secs < 30, f"max residual {worst:.1e}, {secs:.1f} s"


def criterion_3():
    """Projector algebra and constant ranks for every catalog structure."""
    t0 = time.perf_counter()
    worst, bad = 0.0, []
    fx = _fixtures(lambda d: d.phi is not None)
    for name, d in fx:
        rep = check_projectors(d.phi, _pts(d), 1e-10)
        worst = max(worst, rep.residual)
        if not (rep.passed and rep.details["ranks_constant"]):
            bad.append(name)
    secs = time.perf_counter() - t0
    return not bad and secs < 60, f"{len(fx)} structures, max residual {worst:.1e}, failing {bad}, {secs:.1f} s"


def criterion_4():
    """S_Phi tensoriality, classical/generalized agreement, LS torsion on integrable fixtures."""
    rng = np.random.default_rng(4)
    tens = 0.0
    for name in ("nirenberg-antiholo", "graph-noninvolutive", "contact-nonnormal", "crfk-torus-broken"):
        d = catalog.get(name).definition
        m = d.dim
        pts = _pts(d, 50)
        A = BigSection(_rand_field(VectorField, m, rng), _rand_field(OneFormField, m, rng))
        B = BigSection(_rand_field(VectorField, m, rng), _rand_field(OneFormField, m, rng))
        f = random_expr(rng, m, 2)
        fv = values(np.array([f]), pts)[:, 0][:, None]
        base = s_concomitant(d.phi, A, B, pts)
        tens = max(tens, _max(s_concomitant(d.phi, A.scaled(f), B, pts) - fv * base),
                   _max(s_concomitant(d.phi, A, B.scaled(f), pts) - fv * base))
    classical = _fixtures(lambda d: d.phi is not None and _max(d.phi.pi.evaluate(_pts(d, 16))) == 0
                          and _max(d.phi.sigma.evaluate(_pts(d, 16))) == 0)
    mismatch = []
    for name, d in classical:
        pts = _pts(d)
        a = check_classical_crf(d.phi.A, d.domain, pts).passed
        b = check_integrability(from_classical_F(d.phi.A, d.domain), pts).passed
        if a != b:
            mismatch.append(name)
    ls_bad, n_int = [], 0
    for name, d in _fixtures(lambda d: d.phi is not None):
        pts = _pts(d)
        if check_integrability(d.phi, pts).passed:
            n_int += 1
            if not check_LS_torsion(d.phi, pts).passed:
                ls_bad.append(name)
    ok = tens < 1e-9 and not mismatch and not ls_bad
    return ok, (f"tensoriality {tens:.1e}; {len(classical)} classical fixtures, mismatches {mismatch}; "
                f"LS torsion on {n_int} integrable fixtures, failing {ls_bad}")


def criterion_5():
    """Nirenberg dichotomy."""
    holo = catalog.get("nirenberg-holo").definition
    anti = catalog.get("nirenberg-antiholo").definition
    rh = check_classical_crf(holo.phi.A, holo.domain, _pts(holo))
    ra = check_classical_crf(anti.phi.A, anti.domain, _pts(anti))
    ok = rh.residual < 1e-9 and rh.passed and ra.residual > 1e-3 and not ra.passed
    return ok, f"holo residual {rh.residual:.1e}, antiholo residual {ra.residual:.3f}"


def _closed_B(m):
    """An exact two-form: d(sin(x1) x2 dx_m) for m >= 3, x1 x2 dx1^dx2 for m = 2."""
    if m == 2:
        return TwoFormField.parse([["0", "x1*x2"], ["-x1*x2", "0"]], 2)
    c = ["0"] * m
    c[m - 1] = f"sin(x1)*x2"
    return tc.exterior_derivative(OneFormField.parse(c, m))


def criterion_6():
    """Closed B preserves integrability; a non-closed B flips a verdict."""
    kept = []
    for name in ("nirenberg-holo", "skew-vsigma-r4", "contact-r3", "flat-kahler-r2"):
        d = catalog.get(name).definition
        pts = _pts(d)
        B = _closed_B(d.dim)
        assert _max(tc.exterior_derivative(B).evaluate(pts)) < 1e-12
        before = check_integrability(d.phi, pts).passed
        after = check_integrability(b_field(d.phi, B), pts).passed
        kept.append((name, before, after))
    preserved = all(b == a for _, b, a in kept) and sum(b for _, b, _ in kept) >= 3
    d = catalog.get("symplectic-bfield-r4").definition
    pts = _pts(d)
    dB = _max(tc.exterior_derivative(d.B).evaluate(pts))
    flip = check_integrability(d.phi, pts).passed and not check_integrability(b_field(d.phi, d.B), pts).passed
    return preserved and flip and dB > 0, (f"closed B kept {[(n, b) for n, b, _ in kept]}; "
                                           f"non-closed B (|dB| = {dB:.1f}) flips: {flip}")


def criterion_7():
    """Metric axioms on all catalog metrics."""
    fx = _fixtures(lambda d: d.metric is not None)
    worst, bad = 0.0, []
    for name, d in fx:
        rep = check_metric_axioms(d.metric, _pts(d), 1e-10)
        worst = max(worst, rep.residual)
        if not rep.passed:
            bad.append(name)
    return not bad, f"{len(fx)} metrics, max residual {worst:.1e}, failing {bad}"


def criterion_8():
    """Quadruple round trip on 10 random compatible quadruples, plus the complementary quadruple."""
    worst = 0.0
    ok = True
    specs = [(2, 2, 2), (2, 2, 0), (3, 2, 2), (3, 2, 0), (3, 0, 2), (3, 2, 2),
             (4, 4, 4), (4, 4, 2), (4, 2, 4), (4, 2, 2)]
    for k, (m, rp, rm) in enumerate(specs):
        Q = random_quadruple(np.random.default_rng(100 + k), m, rp, rm)
        pts = Q.domain.sample(SAMPLES, k)
        phi = reconstruct_phi(Q)
        Fp, Fm = induced_F_pm(Q.metric, phi)
        back = max(_max(Fp.evaluate(pts) - Q.Fp.evaluate(pts)), _max(Fm.evaluate(pts) - Q.Fm.evaluate(pts)))
        rep = check_quadruple_roundtrip(Q.metric, phi, pts)
        Cp, Cm = induced_F_pm(Q.metric, complementary_structure(Q.metric, phi))
        comp = max(_max(Cp.evaluate(pts) - Q.Fp.evaluate(pts)), _max(Cm.evaluate(pts) + Q.Fm.evaluate(pts)))
        worst = max(worst, back, rep.residual, comp)
        ok &= rep.passed
    return ok and worst < 1e-9, f"10 quadruples, max residual {worst:.1e}"


CRFK_FIXTURES = ("crfk-torus", "crfk-torus-2-1", "crfk-torus-broken", "warped-r3", "flat-kahler-r2",
                 "gk-flat-r4", "gk-opposite-r4", "gk-rotated-r4", "gk-conformal-r4", "gk-nonclosed-r4")


def criterion_9():
    """Closure, Lie and connection forms of CRFK agree; the torus passes all three quickly."""
    disagree, verdicts = [], {}
    for name in CRFK_FIXTURES:
        d = catalog.get(name).definition
        pts = _pts(d)
        Q = quadruple(d)
        v = (check_crfk_closure_quadruple(Q, pts).passed, check_crfk_lie(Q, pts).passed,
             check_crfk_nabla(Q, pts).passed, check_bracket_closure(d.metric, d.phi, pts).passed)
        verdicts[name] = v[0]
        if len(set(v)) != 1:
            disagree.append(name)
    d = catalog.get("crfk-torus").definition
    t0 = time.perf_counter()
    pts = _pts(d)
    Q = quadruple(d)
    torus = all(f(Q, pts).passed for f in (check_crfk_closure_quadruple, check_crfk_lie, check_crfk_nabla))
    secs = time.perf_counter() - t0
    both = set(verdicts.values()) == {True, False}
    ok = not disagree and torus and secs < 120 and both
    return ok, (f"{len(CRFK_FIXTURES)} fixtures ({sum(verdicts.values())} positive), "
                f"disagreements {disagree}; crfk-torus passes all three in {secs:.2f} s")


def criterion_10():
    """On S = 0 fixtures the connection form equals the Gualtieri conditions."""
    names = ("gk-flat-r4", "gk-opposite-r4", "gk-rotated-r4", "gk-conformal-r4", "gk-nonclosed-r4")
    out = []
    for name in names:
        d = catalog.get(name).definition
        pts = _pts(d)
        Q = quadruple(d)
        out.append((name, check_crfk_nabla(Q, pts, 1e-9).passed, check_gualtieri_kahler(Q, pts, 1e-9).passed))
    ok = all(a == b for _, a, b in out) and {a for _, a, _ in out} == {True, False}
    return ok, "; ".join(f"{n} crfk={'pass' if a else 'fail'} gualtieri={'pass' if b else 'fail'}"
                         for n, a, b in out)


def criterion_11():
    """Partially Kähler criterion: both reductions of the torus pass, the warped metric fails."""
    d = catalog.get("crfk-torus").definition
    rep = check_partial_kahler(quadruple(d), _pts(d))
    parts = {k: v["pass"] for k, v in rep.details.items() if isinstance(v, dict)}
    w = catalog.get("warped-r3").definition
    wrep = check_partial_kahler(quadruple(w), _pts(w))
    wparts = {k: v["pass"] for k, v in wrep.details.items() if isinstance(v, dict)}
    nonparallel = not (wparts.get("Q+-parallel", True) and wparts.get("Q--parallel", True))
    ok = rep.passed and all(parts.values()) and len(parts) == 4 and not wrep.passed and nonparallel
    return ok, f"crfk-torus {parts}; warped-r3 {wparts}"


def criterion_12():
    """Generalized Sasakian fixtures and the cosymplectic conditions."""
    d = catalog.get("sasaki-r3").definition
    S = d.sasaki
    pts = _pts(d)
    zero = _max(S.psi.evaluate(pts)) == 0 and _max(S.kappa.evaluate(pts)) == 0
    rep = check_generalized_sasakian(S, pts)
    b = catalog.get("sasaki-r3-broken").definition
    brep = check_generalized_sasakian(b.sasaki, _pts(b))
    failing = [k for k, v in brep.details.items() if isinstance(v, dict) and not v["pass"]]
    c = catalog.get("cosymplectic-r3").definition
    crep = check_cosymplectic(c.acm(), _pts(c))
    three = {k: v["pass"] for k, v in crep.details.items() if isinstance(v, dict)}
    ok = (zero and rep.passed and rep.details["agree"] and not brep.passed and brep.details["agree"]
          and any(k.startswith("Xi=dxi") for k in failing) and crep.passed and len(three) == 3
          and all(three.values()) and crep.details["agree"])
    return ok, (f"sasaki-r3 {rep.passed} (product agrees: {rep.details['agree']}); broken fails {failing}; "
                f"cosymplectic {three}")


def criterion_13():
    """CLI determinism and exit codes."""
    def run(*args):
        return subprocess.run([sys.executable, "-m", "gencrf", *args], capture_output=True, text=True)

    a = run("check", "catalog:nirenberg-antiholo", "--report", "json", "--seed", "7")
    b = run("check", "catalog:nirenberg-antiholo", "--report", "json", "--seed", "7")
    c = run("check", "catalog:crfk-torus", "--report", "json")
    d = run("check", "catalog:crfk-torus", "--report", "json")
    codes = (run("check", "catalog:nirenberg-holo").returncode, a.returncode,
             run("check", "catalog:missing").returncode,
             run("check", "catalog:crfk-torus", "--checks", "nope").returncode)
    ok = a.stdout == b.stdout and c.stdout == d.stdout and codes == (0, 1, 2, 2) and c.returncode == 0
    return ok, f"identical JSON: {a.stdout == b.stdout and c.stdout == d.stdout}; exit codes {codes}"


CRITERIA = [globals()[f"criterion_{i}"] for i in range(1, 14)]


def _line(i, ok, detail):
    return f"criterion {i:2d}: {'PASS' if ok else 'FAIL'}  {CRITERIA[i - 1].__doc__.strip()} [{detail}]"


@pytest.mark.parametrize("i", range(1, 14))
def test_criterion(i, capsys):
    ok, detail = CRITERIA[i - 1]()
    with capsys.disabled():
        print("\n" + _line(i, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for i in range(1, 14):
        ok, detail = CRITERIA[i - 1]()
        print(_line(i, ok, detail), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
