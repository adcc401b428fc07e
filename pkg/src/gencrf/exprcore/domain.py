"""Coordinate domains and seeded point sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

MAX_RETRIES = 10


@dataclass(frozen=True)
class CoordinateDomain:
    """A box chart ``prod [lo_i, hi_i]`` with per-coordinate periodicity flags."""

    dim: int
    box: Tuple[Tuple[float, float], ...]
    periodic: Tuple[bool, ...] = field(default=())

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("dimension must be positive")
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if len(box) != self.dim:
            raise ValueError(f"box has {len(box)} intervals for dimension {self.dim}")
        for i, (lo, hi) in enumerate(box):
            if not lo < hi:
                raise ValueError(f"empty interval for x{i + 1}: [{lo}, {hi}]")
        per = tuple(bool(p) for p in self.periodic) or (False,) * self.dim
        if len(per) != self.dim:
            raise ValueError("periodic flags do not match the dimension")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "periodic", per)

    @classmethod
    def cube(cls, dim: int, lo: float = -1.0, hi: float = 1.0, periodic: bool = False):
        return cls(dim, ((lo, hi),) * dim, (periodic,) * dim)

    def extended(self, extra: Sequence[Tuple[float, float]]) -> "CoordinateDomain":
        """Product with non-periodic factor intervals (the ``t`` coordinates)."""
        extra = tuple(extra)
        return CoordinateDomain(
            self.dim + len(extra), self.box + extra, self.periodic + (False,) * len(extra)
        )

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return bool(np.all(p >= lo) and np.all(p <= hi))

    def sample(self, n: int, seed: int = 42) -> np.ndarray:
        """``n`` points uniform in the box.

        Non-periodic coordinates are drawn from a slightly shrunk box so that
        finite-difference probes around the points stay inside it; periodic
        coordinates cover the full period.
        """
        rng = np.random.default_rng(np.uint64(seed % 2**64))
        u = rng.random((n, self.dim))
        pts = np.empty_like(u)
        for i, (lo, hi) in enumerate(self.box):
            if self.periodic[i]:
                pts[:, i] = lo + (hi - lo) * u[:, i]
            else:
                margin = 0.02 * (hi - lo)
                pts[:, i] = lo + margin + (hi - lo - 2 * margin) * u[:, i]
        return pts


class SamplingError(RuntimeError):
    pass


def sample_valid(
    domain: CoordinateDomain,
    n: int,
    seed: int,
    bad_mask: Callable[[np.ndarray], np.ndarray],
    max_retries: int = MAX_RETRIES,
) -> np.ndarray:
    """Sample ``n`` points, redrawing those flagged by ``bad_mask``.

    Each degenerate point is replaced by a fresh draw; after ``max_retries``
    rounds with degenerate points left the run fails.
    """
    pts = domain.sample(n, seed)
    bad = np.asarray(bad_mask(pts), dtype=bool)
    for attempt in range(1, max_retries + 1):
        if not bad.any():
            return pts
        fresh = domain.sample(int(bad.sum()), seed + 7919 * attempt)
        pts[bad] = fresh
        sub = np.asarray(bad_mask(fresh), dtype=bool)
        newbad = np.zeros_like(bad)
        newbad[np.flatnonzero(bad)[sub]] = True
        bad = newbad
    if bad.any():
        raise SamplingError(
            f"{int(bad.sum())} sample point(s) still degenerate after {max_retries} retries"
        )
    return pts
