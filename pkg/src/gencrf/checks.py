"""Named checks over a :class:`Definition`, shared by the catalog and the command line.

The public names are :data:`definition.CHECK_NAMES`; a few extra names
(projectors, normality, graph checks) are used by catalog fixtures only.
A check whose required payload is missing raises :class:`DefinitionError`
(an input error); a violated mathematical precondition yields a failing
report carrying the precondition residual.
"""

from __future__ import annotations

import time
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import contact_sasaki as cs
from .definition import CHECK_NAMES, Definition, DefinitionError
from .genmetric import (
    MetricQuadruple,
    check_bracket_closure,
    check_compatibility,
    check_crfk,
    check_gualtieri_kahler,
    check_metric_axioms,
    check_partial_kahler,
    check_quadruple_roundtrip,
    induced_F_pm,
)
from .genstruct import (
    b_field,
    check_LS_torsion,
    check_axioms,
    check_classical_crf,
    check_complementary_frames,
    check_integrability,
    check_projectors,
    contact_frames,
    lift_to_product,
)
from .report import CheckReport, PreconditionError
from .tensorcalc import exterior_derivative

EXTRA_CHECKS = ("projectors", "normality")


def _phi(d: Definition):
    if d.phi is None:
        raise DefinitionError("this check needs a generalized structure ('fields' or 'almost_contact')",
                              "fields")
    return d.phi


def _metric(d: Definition):
    if d.metric is None:
        raise DefinitionError("this check needs 'metric'", "metric")
    return d.metric


def quadruple(d: Definition) -> MetricQuadruple:
    """``(gamma, psi, F+, F-)`` induced by the metric and the structure of a definition."""
    G, phi = _metric(d), _phi(d)
    Fp, Fm = induced_F_pm(G, phi)
    return MetricQuadruple(G.gamma, G.psi, Fp, Fm, d.domain)


def _is_classical(d: Definition, pts) -> bool:
    phi = _phi(d)
    return all(np.max(np.abs(f.evaluate(pts)), initial=0.0) < 1e-12 for f in (phi.pi, phi.sigma))


def _integrability(d, pts, tol):
    rep = check_integrability(_phi(d), pts, tol)
    if d.contact is not None:
        lifted = lift_to_product(d.contact)
        norm = check_integrability(lifted, _lift_points(d, pts), tol)
        rep.details.update(normal=norm.passed, normal_residual=norm.residual)
    return rep


def _lift_points(d: Definition, pts) -> np.ndarray:
    h = d.contact.h
    t = np.random.default_rng(0).uniform(-0.98, 0.98, (len(pts), h))
    return np.column_stack([pts, t])


def _normality(d, pts, tol):
    if d.contact is None:
        raise DefinitionError("this check needs 'almost_contact'", "almost_contact")
    lifted = lift_to_product(d.contact)
    rep = check_integrability(lifted, _lift_points(d, pts), tol)
    rep.name = "normality"
    return rep


def _classical_crf(d, pts, tol):
    if not _is_classical(d, pts):
        raise DefinitionError("classical-crf needs pi = 0 and sigma = 0", "fields")
    return check_classical_crf(_phi(d).A, d.domain, pts, tol)


def _frames(d, pts, tol):
    if d.contact is None:
        raise DefinitionError("frames needs 'almost_contact' (Z, xi)", "almost_contact")
    neg, pos = contact_frames(d.contact)
    return check_complementary_frames(_phi(d), neg, pos, pts, tol)


def _metric_compat(d, pts, tol):
    return check_compatibility(_metric(d), _phi(d), pts, tol)


def _roundtrip(d, pts, tol):
    return check_quadruple_roundtrip(_metric(d), _phi(d), pts, tol)


def _crfk(d, pts, tol):
    G, phi = _metric(d), _phi(d)
    comp = check_compatibility(G, phi, pts, tol)
    if not comp.passed:
        raise PreconditionError("structure is not compatible with the metric", comp.residual, comp.point)
    rep = check_crfk(quadruple(d), pts, tol)
    direct = check_bracket_closure(G, phi, pts, tol)
    rep.details.update(direct_closure=direct.passed,
                       agree=bool(rep.details.get("agree", True) and direct.passed == rep.passed))
    return rep


def _gualtieri(d, pts, tol):
    return check_gualtieri_kahler(quadruple(d), pts, tol)


def _partial_kahler(d, pts, tol):
    return check_partial_kahler(quadruple(d), pts, tol)


def _cosymplectic(d, pts, tol):
    return cs.check_cosymplectic(d.acm(), pts, tol)


def _sasakian(d, pts, tol):
    if d.sasaki is None:
        raise DefinitionError("this check needs 'sasaki'", "sasaki")
    return cs.check_generalized_sasakian(d.sasaki, pts, tol)


def _bfield(d, pts, tol):
    if d.B is None:
        raise DefinitionError("bfield needs the extra matrix 'fields.B'", "fields.B")
    phi = _phi(d)
    before = check_integrability(phi, pts, tol)
    rep = check_integrability(b_field(phi, d.B), pts, tol)
    rep.name = "bfield"
    dB = exterior_derivative(d.B).evaluate(pts)
    closed = bool(np.max(np.abs(dB), initial=0.0) < tol)
    rep.details.update(original_pass=before.passed, dB_closed=closed,
                       preserved=before.passed == rep.passed)
    return rep


CHECKS: Dict[str, Callable[[Definition, np.ndarray, float], CheckReport]] = {
    "axioms": lambda d, p, t: check_axioms(_phi(d), p, t),
    "integrability": _integrability,
    "ls-torsion": lambda d, p, t: check_LS_torsion(_phi(d), p, t),
    "classical-crf": _classical_crf,
    "frames": _frames,
    "metric-axioms": lambda d, p, t: check_metric_axioms(_metric(d), p, t),
    "metric-compat": _metric_compat,
    "quadruple-roundtrip": _roundtrip,
    "crfk": _crfk,
    "gualtieri": _gualtieri,
    "partial-kahler": _partial_kahler,
    "cosymplectic": _cosymplectic,
    "sasakian": _sasakian,
    "bfield": _bfield,
    "projectors": lambda d, p, t: check_projectors(_phi(d), p, t),
    "normality": _normality,
}
assert set(CHECK_NAMES) <= set(CHECKS)


def run_check(d: Definition, name: str, points, tol: Optional[float] = None) -> CheckReport:
    """Run one named check; precondition failures become failing reports."""
    if name not in CHECKS:
        raise DefinitionError(f"unknown check {name!r}", "checks")
    tol = d.tol if tol is None else tol
    t0 = time.perf_counter()
    try:
        rep = CHECKS[name](d, points, tol)
    except PreconditionError as exc:
        res = exc.residual if np.isfinite(exc.residual) else float("inf")
        rep = CheckReport(name, res, exc.point, False, error=f"precondition: {exc}")
    rep.name = name
    rep.millis = 1000.0 * (time.perf_counter() - t0)
    return rep


def sample_points(d: Definition) -> np.ndarray:
    return d.domain.sample(d.samples, d.seed)


def run_checks(d: Definition, names: Sequence[str]) -> List[CheckReport]:
    pts = sample_points(d)
    return [run_check(d, n, pts) for n in names]
