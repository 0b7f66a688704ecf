"""Rate functions of the scaled mixing variable ``W_n / n`` and tabulated rate grids."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ..errors import DomainError
from .extreal import INF, ExtReal

__all__ = [
    "RateGrid",
    "DiracRate",
    "ExponentialRate",
    "UserGrid",
    "MixingRate",
    "mixing_rate_eval",
    "SPEED_KINDS",
]

SPEED_KINDS = ("n", "b_n^2", "n^(p/q)")


@dataclass(frozen=True)
class RateGrid:
    """Rate values on an increasing grid, with the speed they refer to."""

    x: np.ndarray
    rate: np.ndarray
    speed_kind: str = "n"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        r = np.asarray(self.rate, dtype=float)
        if x.ndim != 1 or x.shape != r.shape or x.size < 1:
            raise DomainError("grid and rate arrays must be 1-D of equal, non-zero length")
        if np.any(np.diff(x) <= 0):
            raise DomainError("grid must be strictly increasing")
        if np.any(np.isnan(r)) or np.any(r < 0):
            raise DomainError("rates must lie in [0, inf]")
        if self.speed_kind not in SPEED_KINDS:
            raise DomainError(f"speed_kind must be one of {SPEED_KINDS}, got {self.speed_kind!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "rate", r)


@dataclass(frozen=True)
class DiracRate:
    """Rate of ``W/n`` when ``W = 0``: zero at 0, infinite elsewhere."""


@dataclass(frozen=True)
class ExponentialRate:
    """Rate ``x / p`` on ``[0, inf)`` of ``W/n`` for i.i.d.-sum-like exponential mixing."""

    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise DomainError(f"p must be > 0, got {self.p!r}")


@dataclass(frozen=True)
class UserGrid:
    grid: RateGrid = field()


MixingRate = Union[DiracRate, ExponentialRate, UserGrid]


def mixing_rate_eval(iw: MixingRate, x: float) -> ExtReal:
    x = float(x)
    if isinstance(iw, DiracRate):
        return ExtReal(0.0) if x == 0.0 else INF
    if isinstance(iw, ExponentialRate):
        return ExtReal(x / iw.p) if x >= 0.0 else INF
    if isinstance(iw, UserGrid):
        g = iw.grid
        if not (g.x[0] <= x <= g.x[-1]):
            return INF
        j = int(np.searchsorted(g.x, x, side="right")) - 1
        if j >= g.x.size - 1 or x == g.x[j]:
            return ExtReal(g.rate[min(j, g.x.size - 1)])
        lo, hi = g.rate[j], g.rate[j + 1]
        if math.isinf(lo) or math.isinf(hi):
            return INF
        w = (x - g.x[j]) / (g.x[j + 1] - g.x[j])
        return ExtReal(lo + w * (hi - lo))
    raise DomainError(f"unknown mixing rate {iw!r}")
