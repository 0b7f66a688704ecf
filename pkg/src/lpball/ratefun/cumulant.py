"""The joint log-moment generating function of ``(|Y|^q, |Y|^p)`` and its derivatives.

For ``q < p`` and ``t2 < 1/p``::

    Lambda(t1, t2) = log int_0^inf exp(t1 x^q + (t2 - 1/p) x^p) dx / (p^(1/p) Gamma(1 + 1/p))

With ``a = 1/p - t2`` and ``u = a^(1/p) x`` the integral becomes
``(a p)^(-1/p) E[exp(c V^(q/p))]`` for ``V ~ Gamma(1/p)`` and
``c = t1 a^(-q/p)``. Writing ``u = exp(y)`` turns the remaining integral into
``int exp(c e^(qy) - e^(py) + y) dy`` over the real line: smooth, unimodal,
and decaying exponentially to the left and doubly exponentially to the
right. A uniform trapezoid rule on such integrands converges geometrically
in the step size, so the step is tied to the width of the peak and to the
strip of analyticity, and the window to the points where the integrand has
fallen by ``exp(-TAIL)`` from its maximum. Everything is carried in log space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import gammaln

from ..errors import DomainError, NumericalError
from .extreal import INF, ExtReal

__all__ = ["LambdaDerivatives", "log_mgf_lambda", "lambda_derivatives", "lambda_value"]

TAIL = 46.0  # exp(-46) ~ 1e-20 relative to the peak
MAX_NODES = 400_000


@dataclass(frozen=True)
class LambdaDerivatives:
    value: float
    grad: np.ndarray  # (E x^q, E x^p) under the tilted law
    hess: np.ndarray  # their covariance matrix


def _check(p: float, q: float) -> None:
    if not (p > 0 and q > 0):
        raise DomainError(f"need p, q > 0, got p={p!r}, q={q!r}")
    if not q < p:
        raise DomainError(f"Lambda is finite near the origin only for q < p, got p={p!r}, q={q!r}")


def _expand_root(f, x0: float, direction: float, step: float) -> float:
    """Find ``x`` beyond ``x0`` in ``direction`` where the decreasing-away ``f`` changes sign."""
    x1 = x0 + direction * step
    for _ in range(200):
        if f(x1) < 0:
            lo, hi = (x0, x1) if direction > 0 else (x1, x0)
            return optimize.brentq(f, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps)
        x0, step = x1, step * 2.0
        x1 = x0 + direction * step
    raise NumericalError("could not bracket the integration window")


def _nodes(c: float, p: float, q: float):
    """Trapezoid nodes ``y`` and log-weights ``phi(y) - phi_max`` plus ``phi_max`` and step."""

    def dphi_scaled(y):  # phi'(y) / e^(qy): strictly decreasing in y
        return c * q + math.exp(-q * y) - p * math.exp((p - q) * y)

    lo, hi = -1.0, 1.0
    while dphi_scaled(lo) <= 0:
        lo = 2.0 * lo - 1.0
    while dphi_scaled(hi) >= 0:
        hi = 2.0 * hi + 1.0
    ystar = optimize.brentq(dphi_scaled, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)

    def phi(y):
        return c * math.exp(q * y) - math.exp(p * y) + y

    pmax = phi(ystar)
    curv = p * (p - q) * math.exp(p * ystar) + q
    sigma = 1.0 / math.sqrt(curv)
    y_lo = _expand_root(lambda y: phi(y) - pmax + TAIL, ystar, -1.0, max(sigma, 1.0))
    y_hi = _expand_root(lambda y: phi(y) - pmax + TAIL, ystar, 1.0, max(sigma, 0.1 / p))
    h = min(sigma / 4.0, 0.1 / p)
    m = int(math.ceil((y_hi - y_lo) / h))
    if m > MAX_NODES:
        raise NumericalError(f"Lambda quadrature would need {m} nodes (c={c!r})")
    y = y_lo + h * np.arange(m + 1)
    eq, ep = np.exp(q * y), np.exp(p * y)
    logw = (c * eq - pmax) - ep + y
    return eq, ep, logw, pmax, h


def _tilted(t1: float, t2: float, p: float, q: float, derivatives: bool):
    a = 1.0 / p - t2
    r = q / p
    c = t1 * a ** (-r)
    if not math.isfinite(c):
        return None
    eq, ep, logw, pmax, h = _nodes(c, p, q)
    w = np.exp(logw)
    total = w.sum()
    value = -math.log(a * p) / p + pmax + math.log(h * total) + math.log(p) - gammaln(1.0 / p)
    if not derivatives:
        return value, None, None
    w = w / total
    m1 = float(w @ eq)
    m2 = float(w @ ep)
    d1, d2 = eq - m1, ep - m2
    v11, v12, v22 = float(w @ (d1 * d1)), float(w @ (d1 * d2)), float(w @ (d2 * d2))
    s1, s2 = a ** (-r), 1.0 / a
    grad = np.array([m1 * s1, m2 * s2])
    hess = np.array([[v11 * s1 * s1, v12 * s1 * s2], [v12 * s1 * s2, v22 * s2 * s2]])
    return value, grad, hess


def lambda_value(t1: float, t2: float, p: float, q: float) -> float:
    """``Lambda(t1, t2)`` as a float (``inf`` outside ``t2 < 1/p``)."""
    _check(p, q)
    if not t2 < 1.0 / p:
        return math.inf
    out = _tilted(float(t1), float(t2), p, q, derivatives=False)
    return math.inf if out is None or not math.isfinite(out[0]) else out[0]


def log_mgf_lambda(t1: float, t2: float, p: float, q: float) -> ExtReal:
    """Joint log-MGF of ``(|Y|^q, |Y|^p)``; ``+inf`` when ``t2 >= 1/p``."""
    return ExtReal(lambda_value(t1, t2, p, q))


def lambda_derivatives(t1: float, t2: float, p: float, q: float) -> LambdaDerivatives:
    """Value, gradient and Hessian of ``Lambda`` at an interior point."""
    _check(p, q)
    if not t2 < 1.0 / p:
        raise DomainError(f"derivatives need t2 < 1/p, got t2={t2!r}")
    out = _tilted(float(t1), float(t2), p, q, derivatives=True)
    if out is None or not math.isfinite(out[0]):
        raise NumericalError(f"Lambda overflowed at ({t1!r}, {t2!r})")
    return LambdaDerivatives(*out)
