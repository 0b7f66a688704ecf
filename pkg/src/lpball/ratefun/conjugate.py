"""Legendre-Fenchel transform of the joint log-MGF ``Lambda`` of ``(|Y|^q, |Y|^p)``.

The supremum of ``J(t) = <t, s> - Lambda(t)`` over ``R x (-inf, 1/p)`` falls
into three regimes, decided before any iteration:

* ``s`` outside the open convex hull ``{s1 > 0, s2 > s1^(p/q)}`` of the
  curve ``x -> (x^q, x^p)``: the transform is ``+inf``.
* ``s2 >= M_q(p) s1^(p/q)``: ``Lambda`` stays finite on the edge
  ``t2 = 1/p`` for ``t1 < 0`` and the supremum sits on that edge, where
  the edge problem has a closed-form solution.
* otherwise the supremum is an interior critical point, found by damped
  Newton ascent with a logarithmic barrier ``kappa log(1/p - t2)`` whose
  weight shrinks geometrically to zero, warm-started from a coarse grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..errors import DomainError
from ..specfun import m_p
from .cumulant import lambda_derivatives, lambda_value
from .extreal import INF, ExtReal

__all__ = ["ConjugatePoint", "legendre_fenchel", "conjugate_region"]

GRID_T1 = np.linspace(-20.0, 20.0, 17)
ESCAPE = 1e7


@dataclass(frozen=True)
class ConjugatePoint:
    """One evaluation of the transform.

    ``status`` is ``interior`` (stationary point, gradient below tolerance),
    ``boundary`` (maximiser on the edge ``t2 = 1/p``; the reported gradient
    is the projected one, which vanishes), ``unbounded`` (value ``+inf``)
    or ``maxiter``/``stalled`` (no convergence; ``value`` is a lower bound).
    """

    value: ExtReal
    argmax: tuple[float, float]
    converged: bool
    iterations: int
    status: str = "interior"
    grad_norm: float = 0.0


def conjugate_region(s1: float, s2: float, p: float, q: float) -> str:
    """Classify ``s`` as ``outside``, ``boundary`` or ``interior`` (see module doc)."""
    if not (s1 > 0 and s2 > s1 ** (p / q)):
        return "outside"
    if s2 >= m_p(q, p) * s1 ** (p / q):
        return "boundary"
    return "interior"


def _edge_solution(s1: float, s2: float, p: float, q: float) -> tuple[float, float]:
    # Lambda(t1, 1/p) = lgamma(1 + 1/q) - log(-t1)/q - log(p)/p - lgamma(1 + 1/p), maximised at t1 = -1/(q s1)
    t1 = -1.0 / (q * s1)
    value = (
        -1.0 / q
        + s2 / p
        - gammaln(1.0 + 1.0 / q)
        - math.log(q * s1) / q
        + math.log(p) / p
        + gammaln(1.0 + 1.0 / p)
    )
    return t1, value


def _warm_start(s: np.ndarray, p: float, q: float) -> np.ndarray:
    """Best point of a fixed grid in ``t`` and of a grid scaled to ``s``.

    The second grid lives in the natural coordinates ``(c, a)`` of the
    tilted law, ``t1 = c a^(q/p)``, ``t2 = 1/p - a``, centred at the
    ``a = 1/(p s2)`` that matches ``s2`` when ``c = 0``; it keeps the start
    close to the optimum when ``s`` is very small or very large.
    """
    candidates = [(t1, t2) for t1 in GRID_T1 for t2 in 1.0 / p - np.geomspace(1e-3, 20.0 + 1.0 / p, 13)]
    a0 = 1.0 / (p * s[1])
    for a in a0 * np.geomspace(1e-2, 1e2, 9):
        for c in np.linspace(-8.0, 8.0, 17):
            candidates.append((c * a ** (q / p), 1.0 / p - a))
    best, arg = -math.inf, np.zeros(2)
    for t1, t2 in candidates:
        j = t1 * s[0] + t2 * s[1] - lambda_value(t1, t2, p, q)
        if j > best:
            best, arg = j, np.array([t1, t2])
    return arg


def legendre_fenchel(
    s1: float,
    s2: float,
    p: float,
    q: float,
    t0=None,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> ConjugatePoint:
    """``sup_t <t, s> - Lambda(t)`` for ``q < p``.

    Convergence means a gradient norm below ``tol * max(1, |s|)``.
    """
    if not (p > 0 and q > 0 and q < p):
        raise DomainError(f"the transform is defined here for 0 < q < p, got p={p!r}, q={q!r}")
    region = conjugate_region(s1, s2, p, q)
    if region == "outside":
        return ConjugatePoint(INF, (math.nan, math.nan), False, 0, "unbounded", math.inf)
    if region == "boundary":
        t1, value = _edge_solution(s1, s2, p, q)
        return ConjugatePoint(ExtReal(max(value, 0.0)), (t1, 1.0 / p), True, 0, "boundary", 0.0)

    s = np.array([s1, s2], dtype=float)
    inv_p = 1.0 / p
    t = None
    if t0 is not None:
        t = np.array(t0, dtype=float)
        if not (np.all(np.isfinite(t)) and t[1] < inv_p):
            t = None
    if t is None:
        t = _warm_start(s, p, q)

    kappa = 1e-3 * max(1.0, abs(s2))
    gtol = tol * max(1.0, float(np.hypot(s1, s2)))
    status, it, gnorm = "maxiter", 0, math.inf
    for it in range(1, max_iter + 1):
        d = lambda_derivatives(t[0], t[1], p, q)
        a = inv_p - t[1]
        g_j = s - d.grad
        gnorm = float(np.hypot(*g_j))
        if kappa == 0.0 and gnorm < gtol:
            status = "interior"
            break
        g_b = g_j - np.array([0.0, kappa / a])
        h_b = d.hess + np.diag([0.0, kappa / (a * a)])
        try:
            step = np.linalg.solve(h_b, g_b)
        except np.linalg.LinAlgError:
            step = g_b
        decrement = float(g_b @ step)
        if decrement < 0:  # Hessian numerically indefinite; fall back to gradient ascent
            step, decrement = g_b, float(g_b @ g_b)
        barrier0 = float(t @ s) - d.value + (kappa * math.log(a) if kappa else 0.0)
        alpha = 1.0
        while t[1] + alpha * step[1] >= inv_p:
            alpha *= 0.5
        # below the rounding level of J the Armijo test is noise: take the full step
        exact_zone = decrement < 1e-13 * (1.0 + abs(barrier0))
        while alpha > 1e-14 and not exact_zone:
            cand = t + alpha * step
            lam = lambda_value(cand[0], cand[1], p, q)
            b = float(cand @ s) - lam + (kappa * math.log(inv_p - cand[1]) if kappa else 0.0)
            if b >= barrier0 + 1e-4 * alpha * decrement or (alpha * np.max(np.abs(step)) < 1e-15):
                break
            alpha *= 0.5
        else:
            if kappa == 0.0:
                # no further ascent is representable; accept if stationary to 1e-8
                status = "interior" if gnorm < 1e-8 else "stalled"
                break
        t = t + alpha * step
        if np.max(np.abs(t)) > ESCAPE:
            return ConjugatePoint(INF, (float(t[0]), float(t[1])), False, it, "unbounded", gnorm)
        kappa = 0.0 if kappa < 1e-16 else kappa * 0.1

    value = float(t @ s) - lambda_value(t[0], t[1], p, q)
    converged = status == "interior"
    return ConjugatePoint(ExtReal(max(value, 0.0)), (float(t[0]), float(t[1])), converged, it, status, gnorm)
