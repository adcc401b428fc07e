"""First-order jets of scalar expressions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nodes as N


@dataclass(frozen=True)
class Jet1:
    value: float
    gradient: np.ndarray


def eval_jet(e: N.Expr, p) -> Jet1:
    """Value and all partials of ``e`` at the single point ``p``.

    Raises :class:`DomainError` naming the innermost singular subexpression.
    """
    p = np.asarray(p, dtype=float).reshape(1, -1)
    m = p.shape[1]
    exprs = [e] + [N.partial(e, i) for i in range(m)]
    vals, _ = N.evaluate_many(exprs, p, strict=True)
    return Jet1(float(vals[0, 0]), vals[1:, 0].copy())


def eval_jets(e: N.Expr, points) -> tuple:
    """Vectorized variant: returns ``(values (N,), gradients (N, m), bad (N,))``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m = pts.shape[1]
    exprs = [e] + [N.partial(e, i) for i in range(m)]
    vals, bad = N.evaluate_many(exprs, pts)
    return vals[0], vals[1:].T, bad
