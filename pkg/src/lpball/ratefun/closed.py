"""Rate functions available in closed form or by one-dimensional minimisation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.special import gamma

from ..errors import DegenerateError, DomainError, NumericalError
from ..specfun import clt_variance, covariance_matrix, holder_conjugate, m_p
from .extreal import INF, ExtReal
from .mixing import DiracRate, MixingRate, mixing_rate_eval

__all__ = [
    "mdp_rate",
    "mdp_rate_bivariate",
    "mdp_rate_bivariate_printed",
    "printed_form_constant",
    "compare_printed_form",
    "PrintedFormReport",
    "ContractionMinimum",
    "mdp_constrained_min",
    "mdp_core_direction",
    "ldp_rate_qgtp",
    "ldp_rate_width",
    "ldp_rate_projection",
    "log_mgf_lambda_tilde",
    "conjugate_lambda_tilde",
    "ldp_rate_p_eq_q",
    "minimize_log_scale",
]

DET_FLOOR = 1e-14


def _require_q_below_p(p: float, q: float) -> None:
    if not (p > 0 and q > 0):
        raise DomainError(f"need p, q > 0, got p={p!r}, q={q!r}")
    if p == q:
        raise DegenerateError("p == q: the limiting variance vanishes and there is no MDP")
    if q > p:
        raise DomainError(f"the MDP needs q < p, got p={p!r}, q={q!r}")


def mdp_rate(t: float, p: float, q: float) -> ExtReal:
    """Quadratic MDP rate ``t^2 / (2 sigma^2)`` of the normalised q-norm."""
    _require_q_below_p(p, q)
    return ExtReal(t * t / (2.0 * clt_variance(p, q)))


def _cov_checked(p: float, q: float):
    _require_q_below_p(p, q)
    c = covariance_matrix(p, q)
    if c.det < DET_FLOOR:
        raise DegenerateError(f"covariance matrix is singular (det={c.det!r})")
    return c


def mdp_rate_bivariate(x: float, y: float, p: float, q: float) -> ExtReal:
    """``0.5 <(x, y), C^-1 (x, y)>`` for the covariance of ``(|Y|^q, |Y|^p)``."""
    c = _cov_checked(p, q)
    return ExtReal(0.5 * (c.c22 * x * x + c.c11 * y * y - 2.0 * c.c12 * x * y) / c.det)


def printed_form_constant(p: float, q: float) -> float:
    """``(p + q^2) G((1+q)/p)^2 - p G(1/p) G((1+2q)/p)`` with ``G`` the gamma function."""
    g1, gq, g2q = gamma(1.0 / p), gamma((1.0 + q) / p), gamma((1.0 + 2.0 * q) / p)
    return (p + q * q) * gq * gq - p * g1 * g2q


def mdp_rate_bivariate_printed(x: float, y: float, p: float, q: float) -> float:
    """The bivariate rate as an explicit gamma-function expression.

    Kept for comparison only; :func:`mdp_rate_bivariate` is authoritative.
    """
    _require_q_below_p(p, q)
    c = printed_form_constant(p, q)
    g1, gq, g2q = gamma(1.0 / p), gamma((1.0 + q) / p), gamma((1.0 + 2.0 * q) / p)
    return (
        -(p ** (1.0 - 2.0 * q / p)) * g1 * g1 / (2.0 * c) * x * x
        - (g1 * g2q - gq * gq) / (2.0 * c) * y * y
        + p ** (-q / p) * g1 * gq / c * x * y
    )


@dataclass(frozen=True)
class PrintedFormReport:
    p: float
    q: float
    constant: float
    max_abs_diff: float
    max_rel_diff: float
    xx_ratio: float
    yy_ratio: float
    xy_ratio: float

    @property
    def agrees(self) -> bool:
        return self.max_rel_diff < 1e-10


def compare_printed_form(p: float, q: float, points) -> PrintedFormReport:
    """Evaluate both forms on ``points`` (shape ``(m, 2)``) and on the unit axes.

    The coefficient ratios printed/authoritative locate a mismatch: a ratio
    of 1 means that coefficient agrees.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    a = np.array([float(mdp_rate_bivariate(x, y, p, q)) for x, y in pts])
    b = np.array([mdp_rate_bivariate_printed(x, y, p, q) for x, y in pts])
    diff = np.abs(a - b)
    rel = diff / np.maximum(np.abs(a), 1e-300)

    def coef(f, x, y):
        return float(f(x, y, p, q))

    xx = coef(mdp_rate_bivariate_printed, 1, 0) / coef(mdp_rate_bivariate, 1, 0)
    yy = coef(mdp_rate_bivariate_printed, 0, 1) / coef(mdp_rate_bivariate, 0, 1)
    # xy coefficient = f(1,1) - f(1,0) - f(0,1)
    xy_printed = coef(mdp_rate_bivariate_printed, 1, 1) - coef(mdp_rate_bivariate_printed, 1, 0) - coef(
        mdp_rate_bivariate_printed, 0, 1
    )
    xy_true = coef(mdp_rate_bivariate, 1, 1) - coef(mdp_rate_bivariate, 1, 0) - coef(mdp_rate_bivariate, 0, 1)
    return PrintedFormReport(
        p, q, printed_form_constant(p, q), float(diff.max()), float(rel.max()), xx, yy, xy_printed / xy_true
    )


def mdp_core_direction(p: float, q: float) -> np.ndarray:
    """Gradient ``(1/(q M_p(q)), -1/p)`` of the linear map ``G`` onto the core term."""
    return np.array([1.0 / (q * m_p(p, q)), -1.0 / p])


@dataclass(frozen=True)
class ContractionMinimum:
    value: float
    x: float
    y: float
    multiplier: float


def mdp_constrained_min(t: float, p: float, q: float) -> ContractionMinimum:
    """Minimise the bivariate MDP rate over the line ``G(x, y) = t``.

    Solves the stationarity system ``C^-1 z + lambda g = 0``, ``<g, z> = t``
    of the Lagrangian ``I(z) + lambda (<g, z> - t)`` as one 3x3 linear system.
    """
    c = _cov_checked(p, q)
    cinv = np.linalg.inv(c.as_array())
    g = mdp_core_direction(p, q)
    kkt = np.zeros((3, 3))
    kkt[:2, :2] = cinv
    kkt[:2, 2] = g
    kkt[2, :2] = g
    sol = np.linalg.solve(kkt, np.array([0.0, 0.0, t]))
    z = sol[:2]
    value = 0.5 * float(z @ cinv @ z)
    return ContractionMinimum(value, float(z[0]), float(z[1]), float(sol[2]))


def _excess(a: float, b: float, power: float) -> float:
    """``a - b`` with differences at rounding level set to 0.

    The rates below are ``(a - b)^(p/q)`` with ``p/q < 1``, which would blow
    a rounding error of ``1e-16`` at the zero of the rate up to ``1e-8``.
    ``a`` is ``x^power`` with ``x`` near ``b^(1/power)``. Rounding ``x`` and
    ``1/power`` gives ``a`` a relative error of order ``power + |log b|``
    units of ``eps``, hence the width of the band.
    """
    d = a - b
    band = 2.0 * (power + abs(math.log(b)) + 2.0) * np.finfo(float).eps * abs(b)
    return 0.0 if d <= band else d


def ldp_rate_qgtp(x: float, p: float, q: float) -> ExtReal:
    """LDP rate at speed ``n^(p/q)`` of ``n^(1/p-1/q) ||Z||_q`` when ``p < q``."""
    if not (p > 0 and q > 0):
        raise DomainError(f"need p, q > 0, got p={p!r}, q={q!r}")
    if not p < q:
        raise DomainError(f"this branch needs p < q, got p={p!r}, q={q!r}")
    m = m_p(p, q)
    if x < m ** (1.0 / q):
        return INF
    return ExtReal(_excess(x**q, m, q) ** (p / q) / p)


def ldp_rate_width(x: float, q: float) -> ExtReal:
    """LDP rate of the half-width ``n^(1/q-1/2) ||theta||_{q*}`` of a 1-D projection of B_q^n.

    Speed ``n^(2 - 2/q)``; valid when the Hoelder conjugate exceeds 2, i.e. ``1 < q < 2``.
    """
    qs = holder_conjugate(q)
    if not qs > 2.0:
        raise DomainError(f"closed-form width LDP needs q* > 2 (1 < q < 2), got q={q!r}")
    return ldp_rate_qgtp(x, 2.0, qs)


def ldp_rate_projection(y: float, p: float, lam: float) -> ExtReal:
    """LDP rate at speed ``n^(p/2)`` of ``n^(1/p-1/2) ||P_E X||_2`` for uniform X in B_p^n.

    ``(1/p) (y^2/lam - M_p(2))^(p/2)`` above ``sqrt(lam M_p(2))``, infinite below.
    """
    if not 0.0 < lam <= 1.0:
        raise DomainError(f"lambda must lie in (0, 1], got {lam!r}")
    m2 = m_p(p, 2.0)
    if y < math.sqrt(lam * m2):
        return INF
    return ExtReal(_excess(y * y / lam, m2, 2.0) ** (p / 2.0) / p)


def log_mgf_lambda_tilde(t: float, p: float) -> ExtReal:
    """Log-MGF of ``|Y|^p``: ``-(1/p) log(1 - p t)`` for ``t < 1/p``, else ``+inf``."""
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p!r}")
    if t >= 1.0 / p:
        return INF
    return ExtReal(-math.log1p(-p * t) / p)


def conjugate_lambda_tilde(s: float, p: float) -> ExtReal:
    """Legendre transform ``(s - 1)/p - log(s)/p`` of :func:`log_mgf_lambda_tilde`."""
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p!r}")
    if s <= 0:
        return INF
    return ExtReal(((s - 1.0) - math.log(s)) / p)


def minimize_log_scale(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    n_scan: int = 41,
    xatol: float = 1e-11,
) -> tuple[float, float]:
    """Minimise ``f`` on ``[lo, hi]`` (``lo > 0``) by a log-spaced scan and bounded Brent.

    ``f`` may return ``inf``. Returns ``(argmin, min)``; ``(nan, inf)`` when
    ``f`` is infinite on the whole scan.
    """
    u = np.linspace(math.log(lo), math.log(hi), n_scan)
    vals = np.array([float(f(math.exp(v))) for v in u])
    if not np.any(np.isfinite(vals)):
        return math.nan, math.inf
    j = int(np.argmin(vals))
    a, b = u[max(j - 1, 0)], u[min(j + 1, n_scan - 1)]
    res = optimize.minimize_scalar(
        lambda v: float(f(math.exp(v))), bounds=(a, b), method="bounded", options={"xatol": xatol}
    )
    if res.fun <= vals[j]:
        return math.exp(res.x), float(res.fun)
    return math.exp(u[j]), float(vals[j])


def ldp_rate_p_eq_q(x: float, p: float, iw: MixingRate) -> ExtReal:
    """LDP rate at speed ``n`` of ``||Z||_p`` (the ``p == q`` case).

    Minimises ``conj(t1) + I_W(t2)`` over the level set ``t1 / (t1 + t2) = x^p``,
    i.e. ``t2 = t1 (x^-p - 1)``.
    """
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p!r}")
    if not 0.0 < x <= 1.0:
        return INF
    k = x ** (-p) - 1.0
    if isinstance(iw, DiracRate):
        return ExtReal(0.0) if k == 0.0 else INF

    def objective(t1: float) -> float:
        return float(conjugate_lambda_tilde(t1, p)) + float(mixing_rate_eval(iw, t1 * k))

    _, best = minimize_log_scale(objective, 1e-8, 1e8, n_scan=161)
    if math.isinf(best):
        return INF
    if not math.isfinite(best):
        raise NumericalError(f"p == q rate minimisation failed at x={x!r}")
    return ExtReal(max(best, 0.0))
