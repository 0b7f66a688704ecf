"""Closed-form constants for q-norms of random points in l_p^n balls.

Every gamma-function ratio is evaluated through ``gammaln`` and exponentiated
differences, so that exponents as small as p = 0.25 (where Gamma(1/p) is
astronomically large) remain accurate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConsistencyError, DomainError

__all__ = [
    "BallParams",
    "CovMatrix2",
    "m_p",
    "moment_cov",
    "clt_variance",
    "clt_variance_from_cov",
    "gen_clt_variance",
    "gen_clt_variance_from_cov",
    "proj_variance_random",
    "proj_variance_det",
    "covariance_matrix",
    "holder_conjugate",
    "width_constant",
    "width_constant_closed_form",
    "width_variance",
    "NEG_CLAMP",
]

# Round-off allowance below zero for quantities that are variances.
NEG_CLAMP = 1e-12


@dataclass(frozen=True)
class BallParams:
    """Ball exponent ``p``, statistic exponent ``q`` and dimension ``n``."""

    p: float
    q: float
    n: int = 1

    def __post_init__(self):
        _check_positive(p=self.p, q=self.q)
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    def with_n(self, n: int) -> "BallParams":
        return BallParams(self.p, self.q, n)


@dataclass(frozen=True)
class CovMatrix2:
    """Symmetric 2x2 covariance matrix ``[[c11, c12], [c12, c22]]``."""

    c11: float
    c12: float
    c22: float

    @property
    def det(self) -> float:
        return self.c11 * self.c22 - self.c12 * self.c12

    def is_psd(self, tol: float = 1e-12) -> bool:
        return self.c11 >= -tol and self.c22 >= -tol and self.det >= -tol

    def as_array(self) -> np.ndarray:
        return np.array([[self.c11, self.c12], [self.c12, self.c22]])

    def quad_form(self, a: float, b: float) -> float:
        """Return ``(a, b) C (a, b)^T``."""
        return a * a * self.c11 + 2.0 * a * b * self.c12 + b * b * self.c22


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value)):
            raise DomainError(f"{name} must be a finite real, got {value!r}")
        if value <= 0:
            raise DomainError(f"{name} must be > 0, got {value!r}")


def _clamp_variance(value: float, what: str) -> float:
    if value >= 0:
        return value
    if value > -NEG_CLAMP:
        return 0.0
    raise ConsistencyError(f"{what} evaluated to {value!r} < 0")


def _log_gamma_ratio(p: float, q: float) -> float:
    """log of Gamma(1/p) Gamma((2q+1)/p) / Gamma((q+1)/p)^2."""
    return gammaln(1.0 / p) + gammaln((2.0 * q + 1.0) / p) - 2.0 * gammaln((q + 1.0) / p)


def m_p(p: float, q: float) -> float:
    """Absolute moment ``E|Y|^q`` of a p-generalized Gaussian.

    Parameters
    ----------
    p, q : float
        Positive exponents.

    Returns
    -------
    float
        ``p**(q/p) * Gamma((q+1)/p) / Gamma(1/p)``. Equal to 1 when q == p.
    """
    _check_positive(p=p, q=q)
    if p == q:
        return 1.0
    return math.exp((q / p) * math.log(p) + gammaln((q + 1.0) / p) - gammaln(1.0 / p))


def moment_cov(p: float, r: float, s: float) -> float:
    """``Cov(|Y|^r, |Y|^s) = M_p(r+s) - M_p(r) M_p(s)``."""
    _check_positive(p=p, r=r, s=s)
    return m_p(p, r + s) - m_p(p, r) * m_p(p, s)


def covariance_matrix(p: float, q: float) -> CovMatrix2:
    """Covariance of the centred pair ``(|Y|^q - M_p(q), |Y|^p - 1)``."""
    _check_positive(p=p, q=q)
    mq = m_p(p, q)
    return CovMatrix2(
        c11=m_p(p, 2.0 * q) - mq * mq,
        c12=m_p(p, p + q) - mq,
        c22=m_p(p, 2.0 * p) - 1.0,
    )


def clt_variance(p: float, q: float) -> float:
    """Limiting variance of the normalised q-norm of a random point in B_p^n.

    Vanishes when ``p == q``.
    """
    _check_positive(p=p, q=q)
    if p == q:
        return 0.0
    value = (math.exp(_log_gamma_ratio(p, q)) - 1.0) / (q * q) - 1.0 / p
    return _clamp_variance(value, f"clt_variance({p}, {q})")


def clt_variance_from_cov(p: float, q: float) -> float:
    """Same quantity as :func:`clt_variance`, assembled from the covariance matrix.

    ``Var(xi / (q M_p(q)) - eta / p)`` with ``(xi, eta)`` Gaussian with
    covariance :func:`covariance_matrix`.
    """
    cov = covariance_matrix(p, q)
    value = cov.quad_form(1.0 / (q * m_p(p, q)), -1.0 / p)
    return _clamp_variance(value, f"clt_variance_from_cov({p}, {q})")


def gen_clt_variance(p: float, q: float, mu: float, tau2: float) -> float:
    """Limiting variance when the mixing variable grows like ``mu * n``.

    ``tau2`` is the variance of the Gaussian limit of ``(W_n - mu_n)/sqrt(n)``.
    """
    _check_positive(p=p, q=q)
    if not (math.isfinite(mu) and mu >= 0):
        raise DomainError(f"mu must be finite and >= 0, got {mu!r}")
    if not (math.isfinite(tau2) and tau2 >= 0):
        raise DomainError(f"tau2 must be finite and >= 0, got {tau2!r}")
    one_mu = 1.0 + mu
    # the gamma ratio is exactly p + 1 on the diagonal
    ratio = p + 1.0 if p == q else math.exp(_log_gamma_ratio(p, q))
    value = (
        (ratio - 1.0) / (q * q)
        + 1.0 / (p * one_mu**2)
        - 2.0 / (p * one_mu)
        + tau2 / (p * p * one_mu**2)
    )
    return _clamp_variance(value, f"gen_clt_variance({p}, {q}, {mu}, {tau2})")


def gen_clt_variance_from_cov(p: float, q: float, mu: float, tau2: float) -> float:
    cov = covariance_matrix(p, q)
    one_mu = 1.0 + mu
    value = cov.quad_form(1.0 / (q * m_p(p, q)), -1.0 / (p * one_mu)) + tau2 / (p * p * one_mu**2)
    return _clamp_variance(value, "gen_clt_variance_from_cov")


def _proj_ratio(p: float) -> float:
    return math.exp(gammaln(1.0 / p) + gammaln(5.0 / p) - 2.0 * gammaln(3.0 / p))


def proj_variance_random(p: float, lam: float) -> float:
    """Limiting variance for the Euclidean norm of a Haar-random projection.

    ``lam`` is the limiting ratio k_n / n, in [0, 1].
    """
    _check_positive(p=p)
    if not (0.0 <= lam <= 1.0):
        raise DomainError(f"lambda must lie in [0, 1], got {lam!r}")
    value = 0.25 * lam * _proj_ratio(p) - lam * (0.75 + 1.0 / p) + 0.5
    return _clamp_variance(value, f"proj_variance_random({p}, {lam})")


def proj_variance_det(p: float, lam: float) -> float:
    """Limiting variance for the projection onto the first k_n coordinates."""
    _check_positive(p=p)
    if not (0.0 < lam <= 1.0):
        raise DomainError(f"lambda must lie in (0, 1], got {lam!r}")
    value = 0.25 * (_proj_ratio(p) - 1.0) - lam / p
    return _clamp_variance(value, f"proj_variance_det({p}, {lam})")


def holder_conjugate(q: float) -> float:
    if not q > 1:
        raise DomainError(f"Hoelder conjugate needs q > 1, got {q!r}")
    return q / (q - 1.0)


def width_constant(q: float) -> float:
    """``M_2(q*)^(1/q*)``, the centring constant of projection widths."""
    qs = holder_conjugate(q)
    return m_p(2.0, qs) ** (1.0 / qs)


def width_constant_closed_form(q: float) -> float:
    """``sqrt(2 pi^((1-q)/q)) * Gamma((2q-1)/(2q-2))^(1-1/q)``."""
    if not q > 1:
        raise DomainError(f"needs q > 1, got {q!r}")
    return math.sqrt(2.0 * math.pi ** ((1.0 - q) / q)) * math.exp(
        (1.0 - 1.0 / q) * gammaln((2.0 * q - 1.0) / (2.0 * q - 2.0))
    )


def width_variance(q: float) -> float:
    """Variance of the width CLT for projections of B_q^n onto a random line."""
    qs = holder_conjugate(q)
    value = (
        math.sqrt(math.pi) * math.exp(gammaln((2.0 * qs + 1.0) / 2.0) - 2.0 * gammaln((qs + 1.0) / 2.0)) - 1.0
    ) / (qs * qs) - 0.5
    return _clamp_variance(value, f"width_variance({q})")
