"""Structure definitions: the JSON input format, its schema and the loader.

A definition names a coordinate box and any of the following payloads:

    fields          generalized F-structure (A, pi, sigma) and an optional B-field
    metric          generalized metric (gamma, psi)
    almost_contact  generalized almost contact data (P, theta, F, Z[], xi[])
    sasaki          two almost contact records and kappa (gamma, psi come from metric)

plus run settings (checks, samples, seed, tol).  Expressions use the exprcore
grammar.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import jsonschema
import numpy as np

from .contact_sasaki import AlmostContactMetric, SasakiInput
from .exprcore import CoordinateDomain, ExprSyntaxError, CoordinateRangeError
from .genmetric import GeneralizedMetric
from .genstruct import AlmostContactData, GeneralizedF, from_almost_contact
from .report import StructureError
from .tensorcalc import (
    BivectorField,
    EndField,
    Field,
    MetricField,
    OneFormField,
    TwoFormField,
    VectorField,
)

DEFAULT_SAMPLES = 200
DEFAULT_SEED = 42
DEFAULT_TOL = 1e-9

CHECK_NAMES = (
    "axioms", "integrability", "ls-torsion", "classical-crf", "frames", "metric-axioms",
    "metric-compat", "quadruple-roundtrip", "crfk", "gualtieri", "partial-kahler",
    "cosymplectic", "sasakian", "bfield",
)


class DefinitionError(ValueError):
    """Invalid structure definition; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


_expr = {"type": ["string", "number"]}
_vector = {"type": "array", "items": _expr}
_matrix = {"type": "array", "items": _vector}

SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["manifold"],
    "anyOf": [{"required": [k]} for k in ("fields", "metric", "almost_contact", "sasaki")],
    "properties": {
        "manifold": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dim"],
            "properties": {
                "dim": {"type": "integer", "minimum": 1},
                "box": {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                                   "minItems": 2, "maxItems": 2}},
                "periodic": {"type": "array", "items": {"type": "boolean"}},
            },
        },
        "fields": {
            "type": "object",
            "additionalProperties": False,
            "required": ["A", "pi", "sigma"],
            "properties": {"A": _matrix, "pi": _matrix, "sigma": _matrix, "B": _matrix},
        },
        "metric": {
            "type": "object",
            "additionalProperties": False,
            "required": ["gamma"],
            "properties": {"gamma": _matrix, "psi": _matrix},
        },
        "almost_contact": {
            "type": "object",
            "additionalProperties": False,
            "required": ["F", "Z", "xi"],
            "properties": {
                "P": _matrix, "theta": _matrix, "F": _matrix,
                "Z": {"type": "array", "items": _vector},
                "xi": {"type": "array", "items": _vector},
            },
        },
        "sasaki": {
            "type": "object",
            "additionalProperties": False,
            "required": ["plus", "minus"],
            "properties": {
                "plus": {"$ref": "#/$defs/acm"},
                "minus": {"$ref": "#/$defs/acm"},
                "kappa": _vector,
            },
        },
        "checks": {"type": "array", "items": {"enum": list(CHECK_NAMES)}},
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "tol": {"type": "number", "exclusiveMinimum": 0},
    },
    "$defs": {
        "acm": {
            "type": "object",
            "additionalProperties": False,
            "required": ["F", "Z", "xi"],
            "properties": {"F": _matrix, "Z": _vector, "xi": _vector},
        },
    },
}


@dataclass(frozen=True, eq=False)
class Definition:
    domain: CoordinateDomain
    phi: Optional[GeneralizedF] = None
    B: Optional[TwoFormField] = None
    metric: Optional[GeneralizedMetric] = None
    contact: Optional[AlmostContactData] = None
    sasaki: Optional[SasakiInput] = None
    checks: Tuple[str, ...] = ()
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL

    @property
    def dim(self) -> int:
        return self.domain.dim

    def with_settings(self, **kw) -> "Definition":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def acm(self) -> AlmostContactMetric:
        """The classical almost contact metric record (h = 1, P = 0, theta = 0) with metric gamma."""
        c = self.contact
        if c is None or self.metric is None:
            raise DefinitionError("needs 'almost_contact' and 'metric.gamma'", "almost_contact")
        if c.h != 1:
            raise DefinitionError(f"needs codimension h = 1, got {c.h}", "almost_contact.Z")
        pts = self.domain.sample(16, seed=7)
        for name, f in (("P", c.P), ("theta", c.theta)):
            if np.max(np.abs(f.evaluate(pts)), initial=0.0) > 1e-12:
                raise DefinitionError("must vanish for a classical almost contact structure",
                                      f"almost_contact.{name}")
        return AlmostContactMetric(c.F, c.Z[0], c.xi[0], self.metric.gamma, self.domain)

    def to_json(self) -> Dict[str, Any]:
        m = self.dim
        out: Dict[str, Any] = {"manifold": {
            "dim": m,
            "box": [list(b) for b in self.domain.box],
            "periodic": list(self.domain.periodic),
        }}
        if self.phi is not None:
            out["fields"] = {"A": self.phi.A.strings(), "pi": self.phi.pi.strings(),
                             "sigma": self.phi.sigma.strings()}
            if self.B is not None:
                out["fields"]["B"] = self.B.strings()
        if self.metric is not None:
            out["metric"] = {"gamma": self.metric.gamma.strings(), "psi": self.metric.psi.strings()}
        if self.contact is not None:
            c = self.contact
            out["almost_contact"] = {"P": c.P.strings(), "theta": c.theta.strings(),
                                     "F": c.F.strings(), "Z": [z.strings() for z in c.Z],
                                     "xi": [x.strings() for x in c.xi]}
        if self.sasaki is not None:
            s = self.sasaki
            rec = lambda a: {"F": a.F.strings(), "Z": a.Z.strings(), "xi": a.xi.strings()}
            out["sasaki"] = {"plus": rec(s.plus), "minus": rec(s.minus), "kappa": s.kappa.strings()}
        if self.checks:
            out["checks"] = list(self.checks)
        out.update(samples=self.samples, seed=self.seed, tol=self.tol)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


# ------------------------------------------------------------------ loading


def _path(err: jsonschema.ValidationError) -> str:
    return ".".join(str(p) for p in err.absolute_path)


def _parse_field(cls, data, m: int, path: str) -> Field:
    shape = (m,) * cls.rank
    arr = np.array(data, dtype=object)
    if arr.shape != shape:
        raise DefinitionError(f"expected shape {shape} for dimension {m}, got {arr.shape}", path)
    try:
        return cls.parse(data, m)
    except (ExprSyntaxError, CoordinateRangeError) as exc:
        raise DefinitionError(str(exc), path) from exc


def _antisymmetric(f: Field, dom: CoordinateDomain, path: str, pts) -> None:
    r = f.antisymmetry_residual(pts)
    if not r < 1e-12:
        raise DefinitionError(f"not antisymmetric (residual {r:.3e})", path)


def parse_definition(data: Dict[str, Any]) -> Definition:
    """Validate against the schema, then parse and check shapes, symmetries and identities."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        e = errors[0]
        raise DefinitionError(f"schema violation: {e.message}", _path(e) or "<root>")
    man = data["manifold"]
    m = man["dim"]
    box = man.get("box", [[-1.0, 1.0]] * m)
    periodic = man.get("periodic", [False] * m)
    if len(box) != m:
        raise DefinitionError(f"expected {m} intervals, got {len(box)}", "manifold.box")
    if len(periodic) != m:
        raise DefinitionError(f"expected {m} flags, got {len(periodic)}", "manifold.periodic")
    try:
        dom = CoordinateDomain(m, tuple(tuple(float(v) for v in b) for b in box), tuple(periodic))
    except ValueError as exc:
        raise DefinitionError(str(exc), "manifold") from exc
    pts = dom.sample(16, seed=7)
    kw: Dict[str, Any] = {}

    if "fields" in data:
        f = data["fields"]
        A = _parse_field(EndField, f["A"], m, "fields.A")
        pi = _parse_field(BivectorField, f["pi"], m, "fields.pi")
        sigma = _parse_field(TwoFormField, f["sigma"], m, "fields.sigma")
        _antisymmetric(pi, dom, "fields.pi", pts)
        _antisymmetric(sigma, dom, "fields.sigma", pts)
        kw["phi"] = GeneralizedF(A, pi, sigma, dom)
        if "B" in f:
            B = _parse_field(TwoFormField, f["B"], m, "fields.B")
            _antisymmetric(B, dom, "fields.B", pts)
            kw["B"] = B

    if "metric" in data:
        g = data["metric"]
        gamma = _parse_field(MetricField, g["gamma"], m, "metric.gamma")
        r = gamma.symmetry_residual(pts)
        if not r < 1e-12:
            raise DefinitionError(f"not symmetric (residual {r:.3e})", "metric.gamma")
        psi = (_parse_field(TwoFormField, g["psi"], m, "metric.psi") if "psi" in g
               else TwoFormField.zero(m))
        _antisymmetric(psi, dom, "metric.psi", pts)
        kw["metric"] = GeneralizedMetric(gamma, psi, dom)

    if "almost_contact" in data:
        c = data["almost_contact"]
        P = _parse_field(BivectorField, c["P"], m, "almost_contact.P") if "P" in c else BivectorField.zero(m)
        theta = (_parse_field(TwoFormField, c["theta"], m, "almost_contact.theta") if "theta" in c
                 else TwoFormField.zero(m))
        _antisymmetric(P, dom, "almost_contact.P", pts)
        _antisymmetric(theta, dom, "almost_contact.theta", pts)
        F = _parse_field(EndField, c["F"], m, "almost_contact.F")
        Z = [_parse_field(VectorField, z, m, f"almost_contact.Z.{k}") for k, z in enumerate(c["Z"])]
        xi = [_parse_field(OneFormField, x, m, f"almost_contact.xi.{k}") for k, x in enumerate(c["xi"])]
        try:
            phi, cd = from_almost_contact(P, theta, F, Z, xi, dom)
        except StructureError as exc:
            raise DefinitionError(str(exc), "almost_contact") from exc
        kw["contact"] = cd
        kw.setdefault("phi", phi)

    if "sasaki" in data:
        s = data["sasaki"]
        if "metric" not in kw:
            raise DefinitionError("a sasaki payload needs 'metric' (gamma, psi)", "sasaki")
        from .contact_sasaki import validate_acm

        recs = {}
        for key in ("plus", "minus"):
            r = s[key]
            acm = AlmostContactMetric(
                _parse_field(EndField, r["F"], m, f"sasaki.{key}.F"),
                _parse_field(VectorField, r["Z"], m, f"sasaki.{key}.Z"),
                _parse_field(OneFormField, r["xi"], m, f"sasaki.{key}.xi"),
                kw["metric"].gamma, dom)
            try:
                recs[key] = validate_acm(acm)
            except StructureError as exc:
                raise DefinitionError(str(exc), f"sasaki.{key}") from exc
        kappa = (_parse_field(OneFormField, s["kappa"], m, "sasaki.kappa") if "kappa" in s
                 else OneFormField.zero(m))
        kw["sasaki"] = SasakiInput(recs["plus"], recs["minus"], kw["metric"].psi, kappa)

    return Definition(
        dom, checks=tuple(data.get("checks", ())), samples=data.get("samples", DEFAULT_SAMPLES),
        seed=data.get("seed", DEFAULT_SEED), tol=float(data.get("tol", DEFAULT_TOL)), **kw)


def load_definition(path: str) -> Definition:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise DefinitionError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DefinitionError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_definition(data)
