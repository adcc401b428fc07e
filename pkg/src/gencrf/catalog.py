"""Built-in fixtures: worked examples and counterexamples with their expected verdicts."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import contact_sasaki as cs
from .checks import run_check
from .definition import Definition, DefinitionError, parse_definition
from .exprcore import CoordinateDomain
from .genmetric import GeneralizedMetric, MetricQuadruple, reconstruct_phi
from .genstruct import GeneralizedF, check_graph_theta, from_V_sigma
from .report import CheckReport
from .tensorcalc import (
    EndField,
    MetricField,
    OneFormField,
    TwoFormField,
    VectorField,
)


@dataclass(frozen=True)
class GraphData:
    """A subbundle spanned by vector fields and a 2-form (graph-of-flat_theta fixtures)."""

    V: Tuple[VectorField, ...]
    theta: TwoFormField


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    description: str
    definition: Definition
    expected: Dict[str, bool]
    graph: Optional[GraphData] = None

    @property
    def domain(self) -> CoordinateDomain:
        return self.definition.domain

    @property
    def payload(self):
        """The most specific structure carried by the fixture."""
        d = self.definition
        if d.sasaki is not None:
            return d.sasaki
        if self.graph is not None:
            return self.graph
        if d.metric is not None and d.phi is not None:
            from .checks import quadruple
            return quadruple(d)
        if d.contact is not None:
            return d.contact
        return d.phi if d.phi is not None else d.metric


# ------------------------------------------------------------------ builders


def _box(m: int, lo: float = -1.0, hi: float = 1.0, periodic: bool = False) -> dict:
    return {"dim": m, "box": [[lo, hi]] * m, "periodic": [periodic] * m}


def _zeros(m: int) -> List[List[str]]:
    return [["0"] * m for _ in range(m)]


def _antisym(m: int, entries: Dict[Tuple[int, int], str]) -> List[List[str]]:
    """Antisymmetric matrix from upper entries ``{(i, j): expr}`` with 1-based indices."""
    out = _zeros(m)
    for (i, j), e in entries.items():
        out[i - 1][j - 1] = e
        out[j - 1][i - 1] = f"-({e})"
    return out


def _diag(m: int, entries: Sequence[str]) -> List[List[str]]:
    out = _zeros(m)
    for i, e in enumerate(entries):
        out[i][i] = e
    return out


def _rotation(m: int, pairs: Sequence[Tuple[int, int]]) -> List[List[str]]:
    """``F d_i = d_j``, ``F d_j = -d_i`` for each 1-based pair ``(i, j)``; ``F[row][col] = F^row_col``."""
    out = _zeros(m)
    for i, j in pairs:
        out[j - 1][i - 1] = "1"
        out[i - 1][j - 1] = "-1"
    return out


def _classical(m: int, A, **extra) -> dict:
    return {"fields": {"A": A, "pi": _zeros(m), "sigma": _zeros(m), **extra}}


def _from_quadruple(Q: MetricQuadruple) -> Definition:
    return Definition(Q.domain, phi=reconstruct_phi(Q), metric=Q.metric)


def quadruple_from_strings(manifold: dict, gamma, psi, Fp, Fm) -> MetricQuadruple:
    m = manifold["dim"]
    dom = CoordinateDomain(m, tuple(tuple(b) for b in manifold["box"]), tuple(manifold["periodic"]))
    return MetricQuadruple(MetricField.parse(gamma, m), TwoFormField.parse(psi, m),
                           EndField.parse(Fp, m), EndField.parse(Fm, m), dom)


def crfk_torus_quadruple(n: int = 1, h: int = 1, psi: Optional[List[List[str]]] = None) -> MetricQuadruple:
    """Flat torus ``T^(2n+h)`` with two partially Kähler reductions.

    ``F+`` is the complex structure of ``z^a = x^a + i x^(n+a)`` and ``F-`` that of
    ``w^u = x^u + i y^u`` (``y^u = x^(2n+u)``); ``psi`` defaults to a closed periodic form.
    """
    if not 1 <= h <= 2 * n:
        raise ValueError("need 1 <= h <= 2n")
    m = 2 * n + h
    man = _box(m, 0.0, 1.0, periodic=True)
    Fp = _rotation(m, [(a, n + a) for a in range(1, n + 1)])
    Fm = _rotation(m, [(u, 2 * n + u) for u in range(1, h + 1)])
    if psi is None:
        psi = _antisym(m, {(1, 2): "0.5", (1, m): "0.4*PI*cos(2*PI*x1)"})
    return quadruple_from_strings(man, _diag(m, ["1"] * m), psi, Fp, Fm)


def _heisenberg() -> dict:
    """Normal contact structure on R^3: ``xi = (dx3 - x2 dx1)/2``, ``Z = 2 d_3``."""
    return {
        "F": [["0", "-1", "0"], ["1", "0", "0"], ["0", "-x2", "0"]],
        "Z": ["0", "0", "2"],
        "xi": ["-0.5*x2", "0", "0.5"],
    }


HEISENBERG_GAMMA = [["0.5+0.25*x2^2", "0", "-0.25*x2"], ["0", "0.5", "0"], ["-0.25*x2", "0", "0.25"]]


def _negated(rec: dict) -> dict:
    neg = lambda e: "0" if e == "0" else f"-({e})"
    return {"F": [[neg(e) for e in row] for row in rec["F"]],
            "Z": [neg(e) for e in rec["Z"]], "xi": [neg(e) for e in rec["xi"]]}


def _sasaki(psi, kappa) -> dict:
    rec = _heisenberg()
    return {
        "manifold": _box(3),
        "metric": {"gamma": HEISENBERG_GAMMA, "psi": psi},
        "sasaki": {"plus": rec, "minus": _negated(rec), "kappa": kappa},
    }


def _acm_def(F, Z, xi, gamma) -> dict:
    return {"manifold": _box(3),
            "almost_contact": {"F": F, "Z": [Z], "xi": [xi]},
            "metric": {"gamma": gamma}}


J4 = _rotation(4, [(1, 2), (3, 4)])


def _gk(gamma, psi, Fm) -> Definition:
    return _from_quadruple(quadruple_from_strings(_box(4), gamma, psi, J4, Fm))


# every builder returns (description, definition, expected, graph)
_BUILDERS: Dict[str, Callable[[], tuple]] = {}


def _fixture(name: str):
    def deco(fn):
        _BUILDERS[name] = fn
        return fn
    return deco


CLASSICAL_OK = {"axioms": True, "projectors": True, "integrability": True, "ls-torsion": True,
                "classical-crf": True}


@_fixture("classical-f-r3")
def _():
    d = parse_definition({"manifold": _box(3), **_classical(3, _rotation(3, [(1, 2)]))})
    return "rotation F = J on (x1, x2), kernel d_3; q = 1", d, dict(CLASSICAL_OK)


def _nirenberg(holo: bool):
    b = "x2" if holo else "-x2"
    A = [["0", "-1", b], ["1", "0", "-x1"], ["0", "0", "0"]]
    return parse_definition({"manifold": _box(3), **_classical(3, A)})


@_fixture("nirenberg-holo")
def _():
    return ("CR structure spanned by d_z + lambda d_t with lambda = z (holomorphic)",
            _nirenberg(True), dict(CLASSICAL_OK))


@_fixture("nirenberg-antiholo")
def _():
    return ("CR structure spanned by d_z + lambda d_t with lambda = conj(z) (not closed)",
            _nirenberg(False),
            {"axioms": True, "projectors": True, "integrability": False, "ls-torsion": False,
             "classical-crf": False})


@_fixture("symplectic-bfield-r4")
def _():
    dom = CoordinateDomain.cube(4)
    V = [VectorField.coordinate(i, 4) for i in range(4)]
    phi = from_V_sigma(V, TwoFormField.parse(_antisym(4, {(1, 2): "1", (3, 4): "1"}), 4), dom)
    B = TwoFormField.parse(_antisym(4, {(3, 4): "x1"}), 4)
    return ("symplectic R^4 with the non-closed B-field x1 dx3^dx4",
            Definition(dom, phi=phi, B=B), {"integrability": True, "bfield": False})


def _skew(V, sigma, m: int, desc: str, expected: dict):
    dom = CoordinateDomain.cube(m)
    Vf = tuple(VectorField.parse(v, m) for v in V)
    th = TwoFormField.parse(sigma, m)
    d = Definition(dom, phi=from_V_sigma(list(Vf), th, dom))
    return desc, d, expected, GraphData(Vf, th)


@_fixture("skew-vsigma-r4")
def _():
    return _skew([["1", "0", "0", "0"], ["0", "1", "0", "0"]], _antisym(4, {(1, 2): "1"}), 4,
                 "skew classical structure of V = span(d_1, d_2), sigma = dx1^dx2",
                 {"axioms": True, "projectors": True, "integrability": True, "ls-torsion": True,
                  "graph-theta": True})


@_fixture("symplectic-fibration")
def _():
    # sigma = (dx1 - dx3) ^ (dx2 - x1 dx4): fibres (x1, x2) over (x3, x4)
    sigma = _antisym(4, {(1, 2): "1", (1, 4): "-x1", (2, 3): "1", (3, 4): "x1"})
    return _skew([["1", "0", "0", "0"], ["0", "1", "0", "0"]], sigma, 4,
                 "vertical bundle of a symplectic fibration with a symplectic connection",
                 {"axioms": True, "projectors": True, "integrability": True, "graph-theta": True})


@_fixture("graph-noninvolutive")
def _():
    return _skew([["1", "0", "0"], ["0", "1", "x1"]], _antisym(3, {(1, 2): "1"}), 3,
                 "V = span(d_1, d_2 + x1 d_3) is not involutive",
                 {"axioms": True, "integrability": False, "graph-theta": False})


@_fixture("contact-r3")
def _():
    h = _heisenberg()
    d = parse_definition(_acm_def(h["F"], h["Z"], h["xi"], HEISENBERG_GAMMA))
    return ("normal contact metric structure on R^3 (Heisenberg group)", d,
            {"axioms": True, "projectors": True, "frames": True, "integrability": True,
             "normality": True, "cosymplectic": False})


@_fixture("contact-nonnormal")
def _():
    # e1 = d_1 + x2 d_3, e2 = d_2; F e1 = k e2, F e2 = -e1 / k with k = 1 + x3^2
    F = [["0", "-1/(1+x3^2)", "0"], ["1+x3^2", "0", "0"], ["0", "-x2/(1+x3^2)", "0"]]
    d = parse_definition({"manifold": _box(3),
                          "almost_contact": {"F": F, "Z": [["0", "0", "1"]], "xi": [["-x2", "0", "1"]]}})
    return "almost contact structure whose transverse complex structure varies along Z", d, {
        "axioms": True, "frames": True, "normality": False}


@_fixture("cosymplectic-r3")
def _():
    d = parse_definition(_acm_def(_rotation(3, [(1, 2)]), ["0", "0", "1"], ["0", "0", "1"],
                                  _diag(3, ["1", "1", "1"])))
    return "product of the flat Kähler plane and a line", d, {
        "frames": True, "normality": True, "cosymplectic": True}


@_fixture("cosymplectic-warped")
def _():
    d = parse_definition(_acm_def(_rotation(3, [(1, 2)]), ["0", "0", "1"], ["0", "0", "1"],
                                  _diag(3, ["exp(x3)", "exp(x3)", "1"])))
    return "normal, d xi = 0 but d Xi != 0 (warped plane factor)", d, {
        "normality": True, "cosymplectic": False}


@_fixture("crfk-torus")
def _():
    return ("flat 3-torus with two partially Kähler reductions (n = 1, h = 1) and closed psi",
            _from_quadruple(crfk_torus_quadruple(1, 1)),
            {"axioms": True, "projectors": True, "integrability": True, "metric-axioms": True,
             "metric-compat": True, "quadruple-roundtrip": True, "crfk": True,
             "partial-kahler": True})


@_fixture("crfk-torus-2-1")
def _():
    return ("flat 5-torus with two partially Kähler reductions (n = 2, h = 1)",
            _from_quadruple(crfk_torus_quadruple(2, 1)),
            {"axioms": True, "metric-axioms": True, "metric-compat": True, "crfk": True,
             "partial-kahler": True})


@_fixture("crfk-torus-broken")
def _():
    psi = _antisym(3, {(1, 2): "0.5*sin(2*PI*x3)"})
    return ("torus reductions with a non-closed psi", _from_quadruple(crfk_torus_quadruple(1, 1, psi)),
            {"axioms": True, "metric-axioms": True, "metric-compat": True, "crfk": False,
             "partial-kahler": False})


@_fixture("warped-r3")
def _():
    Q = quadruple_from_strings(_box(3), _diag(3, ["1", "1", "exp(2*x1)"]), _zeros(3),
                               _rotation(3, [(1, 2)]), _rotation(3, [(1, 2)]))
    return ("F = J on (x1, x2) for a warped metric: Q = span(d_3) is not parallel",
            _from_quadruple(Q), {"metric-axioms": True, "metric-compat": True, "crfk": False,
                                 "partial-kahler": False})


@_fixture("flat-kahler-r2")
def _():
    Q = quadruple_from_strings(_box(2), _diag(2, ["1", "1"]), _zeros(2),
                               _rotation(2, [(1, 2)]), _rotation(2, [(1, 2)]))
    return "flat Kähler plane", _from_quadruple(Q), {
        "axioms": True, "integrability": True, "metric-axioms": True, "metric-compat": True,
        "crfk": True, "gualtieri": True, "partial-kahler": True}


GK_EXPECTED = lambda ok: {"metric-axioms": True, "metric-compat": True, "crfk": ok, "gualtieri": ok}


@_fixture("gk-flat-r4")
def _():
    return "flat R^4 with J+ = J- = J0", _gk(_diag(4, ["1"] * 4), _zeros(4), J4), GK_EXPECTED(True)


@_fixture("gk-opposite-r4")
def _():
    Jm = _rotation(4, [(2, 1), (4, 3)])
    return "flat R^4 with J- = -J0", _gk(_diag(4, ["1"] * 4), _zeros(4), Jm), GK_EXPECTED(True)


@_fixture("gk-rotated-r4")
def _():
    # J- = R J0 R^T for the rotation R by 0.7 rad in the (x1, x3) plane
    c, s = np.cos(0.7), np.sin(0.7)
    R = np.array([[c, 0, -s, 0], [0, 1, 0, 0], [s, 0, c, 0], [0, 0, 0, 1]])
    J0 = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
    Jm = [[repr(float(v)) for v in row] for row in R @ J0 @ R.T]
    return "flat R^4 with J- a constant rotation of J0", _gk(_diag(4, ["1"] * 4), _zeros(4), Jm), \
        GK_EXPECTED(True)


@_fixture("gk-conformal-r4")
def _():
    return ("conformally flat metric exp(x1) I with J+ = J- = J0 (not Kähler)",
            _gk(_diag(4, ["exp(x1)"] * 4), _zeros(4), J4), GK_EXPECTED(False))


@_fixture("gk-nonclosed-r4")
def _():
    return ("flat R^4, J+ = J- = J0, psi = x3 dx1^dx2 not closed",
            _gk(_diag(4, ["1"] * 4), _antisym(4, {(1, 2): "x3"}), J4), GK_EXPECTED(False))


@_fixture("sasaki-r3")
def _():
    return ("Heisenberg Sasakian pair (F, Z, xi), (-F, -Z, -xi) with psi = 0, kappa = 0",
            parse_definition(_sasaki(_zeros(3), ["0", "0", "0"])), {"sasakian": True, "metric-axioms": True})


@_fixture("sasaki-r3-closed")
def _():
    return ("Heisenberg Sasakian pair with psi = -d kappa, kappa = x1 dx2",
            parse_definition(_sasaki(_antisym(3, {(1, 2): "-1"}), ["0", "x1", "0"])),
            {"sasakian": True})


@_fixture("sasaki-r3-broken")
def _():
    return ("Heisenberg Sasakian pair with psi = x3 dx1^dx2, so L_Z psi != 0",
            parse_definition(_sasaki(_antisym(3, {(1, 2): "x3"}), ["0", "0", "0"])),
            {"sasakian": False})


# ------------------------------------------------------------------ public API


@functools.lru_cache(maxsize=None)
def get(name: str) -> Fixture:
    if name not in _BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(sorted(_BUILDERS))}")
    out = _BUILDERS[name]()
    desc, d, expected = out[:3]
    graph = out[3] if len(out) > 3 else None
    return Fixture(name, desc, d, expected, graph)


def names() -> List[str]:
    return list(_BUILDERS)


def run_fixture_check(fx: Fixture, check: str, points=None, tol: Optional[float] = None) -> CheckReport:
    d = fx.definition
    pts = d.domain.sample(d.samples, d.seed) if points is None else points
    if check == "graph-theta":
        if fx.graph is None:
            raise DefinitionError("fixture has no graph data", "graph")
        return check_graph_theta(list(fx.graph.V), fx.graph.theta, pts, d.tol if tol is None else tol)
    return run_check(d, check, pts, tol)


def run(name: str, samples: Optional[int] = None) -> List[Tuple[CheckReport, bool]]:
    """Run every expected check of a fixture: ``[(report, expected_pass), ...]``."""
    fx = get(name)
    d = fx.definition if samples is None else fx.definition.with_settings(samples=samples)
    pts = d.domain.sample(d.samples, d.seed)
    return [(run_fixture_check(fx, c, pts), exp) for c, exp in fx.expected.items()]


def run_all(samples: Optional[int] = None) -> Dict[str, List[Tuple[CheckReport, bool]]]:
    return {n: run(n, samples) for n in names()}


def export(name: str) -> str:
    """The fixture in the command line's JSON format (graph data is not part of it)."""
    fx = get(name)
    cli_checks = tuple(c for c in fx.expected if c in _cli_names())
    return fx.definition.with_settings(checks=cli_checks).dumps()


def _cli_names():
    from .definition import CHECK_NAMES
    return CHECK_NAMES
