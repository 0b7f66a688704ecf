"""LDP rate of ``n^(1/p-1/q) ||Z||_q`` for ``q < p`` via the contraction principle.

The triple ``(mean |Y|^q, mean |Y|^p, W/n)`` obeys an LDP with rate
``conj(t1, t2) + I_W(t3)`` and the statistic is
``F(t1, t2, t3) = t1^(1/q) (t2 + t3)^(-1/p)``. On the level set
``F = x`` we eliminate ``t1 = x^q (t2 + t3)^(q/p)``. The transform is
finite only when ``t2 (1 - x^p) > x^p t3``, so ``x >= 1`` has infinite
rate and the remaining free variable ``t3`` is written as
``theta t2 (1 - x^p) / x^p`` with ``theta in [0, 1)``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from ..errors import DomainError, NumericalError
from .closed import minimize_log_scale
from .conjugate import legendre_fenchel
from .extreal import INF, ExtReal
from .mixing import DiracRate, MixingRate, UserGrid, mixing_rate_eval

__all__ = ["ldp_rate_qltp", "ContractionObjective"]

THETA_MAX = 1.0 - 1e-9


class ContractionObjective:
    """``conj(x^q (t2+t3)^(q/p), t2) + I_W(t3)`` with warm-started conjugate solves."""

    def __init__(self, x: float, p: float, q: float, iw: MixingRate):
        self.x, self.p, self.q, self.iw = x, p, q, iw
        self.xq = x**q
        self.slack = (1.0 - x**p) / x**p
        self.evaluations = 0
        self._warm = None

    def conj(self, t2: float, t3: float) -> float:
        s1 = self.xq * (t2 + t3) ** (self.q / self.p)
        cp = legendre_fenchel(s1, t2, self.p, self.q, t0=self._warm)
        self.evaluations += 1
        if cp.status == "interior":
            self._warm = cp.argmax
        elif not cp.converged and math.isfinite(cp.value):
            # a cold restart before giving up on this point
            cp = legendre_fenchel(s1, t2, self.p, self.q)
            if not cp.converged:
                raise NumericalError(f"conjugate did not converge at s=({s1!r}, {t2!r}): {cp.status}")
        return float(cp.value)

    def __call__(self, log_t2: float, theta: float) -> float:
        t2 = math.exp(log_t2)
        t3 = theta * t2 * self.slack
        iw = float(mixing_rate_eval(self.iw, t3))
        if math.isinf(iw):
            return math.inf
        return self.conj(t2, t3) + iw


def _coordinate_descent(obj, start, sweeps: int):
    u, th = start
    f = obj(u, th)
    for _ in range(sweeps):
        res_u = optimize.minimize_scalar(
            lambda v: obj(v, th), bounds=(u - 3.0, u + 3.0), method="bounded", options={"xatol": 1e-7}
        )
        if res_u.fun < f:
            u, f = res_u.x, res_u.fun
        res_t = optimize.minimize_scalar(
            lambda v: obj(u, v), bounds=(0.0, THETA_MAX), method="bounded", options={"xatol": 1e-9}
        )
        cand = min((res_t.fun, res_t.x), (obj(u, 0.0), 0.0))
        if cand[0] < f:
            f, th = cand
    return np.array([u, th]), f


def ldp_rate_qltp(
    x: float,
    p: float,
    q: float,
    iw: MixingRate,
    n_starts: int = 8,
    sweeps: int = 2,
) -> ExtReal:
    """Rate at speed ``n`` of ``n^(1/p-1/q) ||Z||_q`` for ``q < p`` and mixing rate ``iw``."""
    if not (p > 0 and q > 0 and q < p):
        raise DomainError(f"this branch needs 0 < q < p, got p={p!r}, q={q!r}")
    if not x > 0:
        raise DomainError(f"x must be > 0, got {x!r}")
    if x >= 1.0:
        return INF
    obj = ContractionObjective(x, p, q, iw)

    if isinstance(iw, DiracRate):
        _, best = minimize_log_scale(lambda t2: obj.conj(t2, 0.0), 1e-4, 1e4, n_scan=33)
        return ExtReal(max(best, 0.0)) if math.isfinite(best) else INF

    # multi-start over (log t2, theta): log t2 in {-1, 0, 1, 2}, theta in {0, 1/2}
    starts = [(u, th) for u in (0.0, -1.0, 1.0, 2.0) for th in (0.0, 0.5)][:n_starts]
    best_f, best_z = math.inf, None
    for start in starts:
        if not math.isfinite(obj(*start)):
            continue
        z, f = _coordinate_descent(obj, start, sweeps)
        if f < best_f:
            best_f, best_z = f, z
    if best_z is None:
        return INF
    # quasi-Newton polish in the box theta in [0, 1)
    res = optimize.minimize(
        lambda z: obj(z[0], z[1]),
        best_z,
        method="L-BFGS-B",
        bounds=[(best_z[0] - 2.0, best_z[0] + 2.0), (0.0, THETA_MAX)],
        options={"ftol": 1e-14, "gtol": 1e-10, "eps": 1e-7},
    )
    if res.fun < best_f:
        best_f = float(res.fun)
    return ExtReal(max(best_f, 0.0))
