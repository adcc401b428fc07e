"""Check reports shared by every checker."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

DEFAULT_TOL = 1e-9


@dataclass
class CheckReport:
    """Outcome of one condition: maximal residual over the sample, worst point, verdict."""

    name: str
    residual: float
    point: Optional[List[float]]
    passed: bool
    millis: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    def to_json(self, timing: bool = False) -> Dict[str, Any]:
        out = {
            "check": self.name,
            "residual": _clean(self.residual),
            "point": self.point,
            "pass": bool(self.passed),
            "millis": round(self.millis, 3) if timing else None,
        }
        if self.error:
            out["error"] = self.error
        return out

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        pt = "" if self.point is None else " at " + "(" + ", ".join(f"{x:.4g}" for x in self.point) + ")"
        msg = f"{verdict} {self.name}: residual {self.residual:.3e}{pt}"
        if self.error:
            msg += f" [{self.error}]"
        return msg


def _clean(x):
    x = float(x)
    return x if np.isfinite(x) else str(x)


def max_residual(values: np.ndarray, points: np.ndarray):
    """Largest absolute entry per point reduced over points; returns (residual, worst point)."""
    v = np.abs(np.asarray(values))
    if v.size == 0:
        return 0.0, None
    per_point = v.reshape(v.shape[0], -1).max(axis=1) if v.ndim > 1 else v
    k = int(np.argmax(per_point))
    return float(per_point[k]), [float(x) for x in points[k]]


def make_report(name: str, values, points, tol: float = DEFAULT_TOL, **details) -> CheckReport:
    r, pt = max_residual(values, points)
    return CheckReport(name, r, pt, bool(r < tol), details=details)


def combine(name: str, parts: List[CheckReport], tol: float = DEFAULT_TOL, **details) -> CheckReport:
    """Worst part decides the residual; all parts must pass."""
    if not parts:
        return CheckReport(name, 0.0, None, True, details=details)
    worst = max(parts, key=lambda r: r.residual)
    errs = [p.error for p in parts if p.error]
    d = {p.name: {"residual": p.residual, "pass": p.passed} for p in parts}
    d.update(details)
    return CheckReport(name, worst.residual, worst.point, all(p.passed for p in parts),
                       details=d, error="; ".join(errs) or None)


@contextmanager
def timed(report_holder: list):
    t0 = time.perf_counter()
    yield
    dt = 1000.0 * (time.perf_counter() - t0)
    for r in report_holder:
        r.millis = dt


class PreconditionError(ValueError):
    """A checker's precondition does not hold; carries the violating residual."""

    def __init__(self, message: str, residual: float = float("nan"), point=None):
        super().__init__(message)
        self.residual = residual
        self.point = point


class StructureError(ValueError):
    """Input data does not define the requested structure."""
