"""Samplers and densities for the measures P_{W,n,p} on l_p^n balls.

A point is drawn through the representation ``Y / (||Y||_p^p + W)^(1/p)``
where ``Y`` has i.i.d. p-generalized Gaussian coordinates (density
proportional to ``exp(-|x|^p / p)``) and ``W`` is an independent draw from
the mixing law. Exponential(rate 1/p) mixing gives the uniform
distribution on the ball, Dirac0 gives the cone measure on the sphere, and
Gamma(alpha, 1/p) gives beta-type densities.

All samplers take an explicit :class:`numpy.random.Generator`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import ContractViolation, DomainError, NumericalError
from .specfun import BallParams

__all__ = [
    "Dirac0",
    "Exponential",
    "Gamma",
    "External",
    "MixingLaw",
    "BallPoint",
    "GGVector",
    "uniform_law",
    "law_from_dict",
    "law_to_dict",
    "sample_pgg",
    "sample_mixing",
    "sample_ball",
    "density_h",
    "project_coordinates",
    "project_haar",
    "haar_projection_factor",
    "lp_norm",
]


@dataclass(frozen=True)
class Dirac0:
    """Point mass at zero (cone probability measure)."""

    @property
    def atom_at_zero(self) -> float:
        return 1.0


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DomainError(f"exponential rate must be > 0, got {self.rate!r}")

    @property
    def atom_at_zero(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Gamma:
    shape: float
    rate: float

    def __post_init__(self):
        for name in ("shape", "rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"gamma {name} must be > 0, got {value!r}")

    @property
    def atom_at_zero(self) -> float:
        return 0.0


@dataclass(frozen=True)
class External:
    """User-supplied mixing law.

    ``sampler(rng, size)`` must return non-negative draws (a scalar when
    ``size`` is None). ``density`` is the Lebesgue density of the absolutely
    continuous part, needed only by :func:`density_h`; ``atom_at_zero`` is
    the mass ``W({0})``. Tail assumptions of the limit theorems are the
    caller's responsibility.
    """

    sampler: Callable = field(compare=False)
    density: Optional[Callable[[float], float]] = field(default=None, compare=False)
    atom_at_zero: float = 0.0
    name: str = "external"


MixingLaw = Union[Dirac0, Exponential, Gamma, External]


def uniform_law(p: float) -> Exponential:
    """Mixing law under which P_{W,n,p} is the uniform distribution on B_p^n."""
    return Exponential(1.0 / p)


def law_from_dict(data: dict) -> MixingLaw:
    """Parse ``{"variant": "Gamma", "shape": ..., "rate": ...}`` and friends."""
    try:
        variant = data["variant"]
    except (KeyError, TypeError):
        raise DomainError(f"mixing law needs a 'variant' key: {data!r}") from None
    keys = set(data) - {"variant"}
    if variant == "Dirac0" and not keys:
        return Dirac0()
    if variant == "Exponential" and keys == {"rate"}:
        return Exponential(float(data["rate"]))
    if variant == "Gamma" and keys == {"shape", "rate"}:
        return Gamma(float(data["shape"]), float(data["rate"]))
    raise DomainError(f"unsupported mixing law specification {data!r}")


def law_to_dict(law: MixingLaw) -> dict:
    if isinstance(law, Dirac0):
        return {"variant": "Dirac0"}
    if isinstance(law, Exponential):
        return {"variant": "Exponential", "rate": law.rate}
    if isinstance(law, Gamma):
        return {"variant": "Gamma", "shape": law.shape, "rate": law.rate}
    return {"variant": "External", "name": law.name}


def lp_norm(x: np.ndarray, p: float, axis: int = -1) -> np.ndarray:
    """``(sum |x_i|^p)^(1/p)`` along ``axis`` with correctly rounded sums."""
    a = np.abs(np.asarray(x, dtype=float)) ** p
    return _fsum_along(a, axis) ** (1.0 / p)


def _fsum_along(a: np.ndarray, axis: int = -1) -> np.ndarray:
    a = np.moveaxis(a, axis, -1)
    if a.ndim == 1:
        return np.float64(math.fsum(a))
    flat = a.reshape(-1, a.shape[-1])
    return np.array([math.fsum(row) for row in flat]).reshape(a.shape[:-1])


@dataclass
class GGVector:
    """Independent p-generalized Gaussian coordinates (last axis)."""

    coords: np.ndarray
    p: float

    def power_sum(self, q: float) -> np.ndarray:
        return _fsum_along(np.abs(self.coords) ** q)


@dataclass
class BallPoint:
    """Point(s) of B_p^n; the coordinate axis is the last one."""

    coords: np.ndarray
    p: float

    def norm(self, q: Optional[float] = None) -> np.ndarray:
        return lp_norm(self.coords, self.p if q is None else q)


def sample_pgg(p: float, n: int, rng: np.random.Generator, size: Optional[int] = None) -> GGVector:
    """Draw ``n`` i.i.d. p-generalized Gaussians (``size`` independent rows).

    Uses the exact transform ``Y = s (p G)^(1/p)``, ``G ~ Gamma(1/p, 1)``,
    ``s`` a fair random sign.
    """
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p!r}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    shape = (n,) if size is None else (size, n)
    g = rng.standard_gamma(1.0 / p, size=shape)
    sign = np.where(rng.random(size=shape) < 0.5, -1.0, 1.0)
    return GGVector(sign * (p * g) ** (1.0 / p), p)


def sample_mixing(law: MixingLaw, rng: np.random.Generator, size: Optional[int] = None):
    """One draw (or ``size`` draws) from the mixing law."""
    if isinstance(law, Dirac0):
        return 0.0 if size is None else np.zeros(size)
    if isinstance(law, Exponential):
        return rng.exponential(1.0 / law.rate, size=size)
    if isinstance(law, Gamma):
        return rng.gamma(law.shape, 1.0 / law.rate, size=size)
    if isinstance(law, External):
        w = law.sampler(rng, size)
        arr = np.asarray(w, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr < 0):
            raise ContractViolation(f"external sampler {law.name!r} returned a negative or non-finite draw")
        if size is None:
            return float(arr)
        if arr.shape != (size,):
            raise ContractViolation(f"external sampler returned shape {arr.shape}, expected {(size,)}")
        return arr
    raise DomainError(f"unknown mixing law {law!r}")


def sample_ball(
    params: BallParams,
    law: MixingLaw,
    rng: np.random.Generator,
    size: Optional[int] = None,
    validate: bool = False,
) -> BallPoint:
    """Draw from P_{W,n,p}.

    With ``validate=True`` every draw is checked against ``||Z||_p <= 1``
    (and ``== 1`` for Dirac0) to 1e-12.
    """
    p, n = params.p, params.n
    y = sample_pgg(p, n, rng, size).coords
    w = sample_mixing(law, rng, size)
    denom = _fsum_along(np.abs(y) ** p) + w
    if np.any(denom <= 0):
        raise NumericalError("||Y||_p^p + W vanished; cannot normalise")
    scale = denom ** (-1.0 / p)
    z = y * (scale if size is None else scale[:, None])
    point = BallPoint(z, p)
    if validate:
        norms = np.atleast_1d(point.norm())
        if np.any(norms > 1.0 + 1e-12):
            raise NumericalError(f"sampled point outside the ball: max norm {norms.max()!r}")
        if isinstance(law, Dirac0) and np.any(np.abs(norms - 1.0) > 1e-12):
            raise NumericalError("cone-measure draw is off the sphere")
    return point


def _log_ball_prefactor(n: int, p: float) -> float:
    return (n / p) * math.log(p) + gammaln(1.0 + n / p)


def density_h(r: float, params: BallParams, law: MixingLaw, epsrel: float = 1e-10) -> float:
    """Radial factor ``h(r)`` of the density of P_{W,n,p} w.r.t. the uniform law.

    Closed forms are used for Dirac0 (h = 0), Exponential and Gamma;
    External laws are integrated numerically and need ``law.density``.
    """
    p, n = params.p, params.n
    if not (0.0 <= r < 1.0):
        raise DomainError(f"h is defined on [0, 1); got r={r!r}")
    if isinstance(law, Dirac0):
        return 0.0
    rp = r**p
    a = rp / (p * (1.0 - rp))  # exponential tilt in the s-integral
    m = n / p
    log_front = -_log_ball_prefactor(n, p) - (1.0 + m) * math.log1p(-rp)
    if isinstance(law, Exponential):
        shape, rate = 1.0, law.rate
    elif isinstance(law, Gamma):
        shape, rate = law.shape, law.rate
    elif isinstance(law, External):
        if law.density is None:
            raise DomainError("density_h needs a density for an External law, not only a sampler")
        return math.exp(log_front) * _external_s_integral(law.density, m, a, epsrel)
    else:
        raise DomainError(f"unknown mixing law {law!r}")
    # int s^m exp(-a s) rate^shape s^(shape-1) exp(-rate s) / Gamma(shape) ds
    log_int = shape * math.log(rate) + gammaln(shape + m) - gammaln(shape) - (shape + m) * math.log(a + rate)
    return math.exp(log_front + log_int)


def _external_s_integral(density, m, a, epsrel):
    def f(s):
        return s**m * math.exp(-a * s) * density(s) if s > 0 else 0.0

    val, err = 0.0, 0.0
    # split at a few scales so quad sees both the bulk and the tail
    edges = [0.0, 1.0, 10.0, 100.0, math.inf]
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=epsrel, limit=200)
        val += v
        err += e
    if not math.isfinite(val) or err > max(1e-8 * abs(val), 1e-300):
        raise NumericalError(f"h(r) quadrature did not converge (value {val!r}, error {err!r})")
    return val


def project_coordinates(point, k: int) -> np.ndarray:
    """First ``k`` coordinates (last axis)."""
    coords = point.coords if isinstance(point, BallPoint) else np.asarray(point)
    n = coords.shape[-1]
    if not (1 <= k <= n):
        raise DomainError(f"need 1 <= k <= n = {n}, got k={k}")
    return coords[..., :k]


def project_haar(x, k: int, rng: np.random.Generator, max_retries: int = 8) -> float:
    """Euclidean norm of the projection of ``x`` onto a Haar-random k-subspace.

    The subspace is spanned by the rows of a k x n standard Gaussian matrix,
    orthonormalised by QR.
    """
    x = np.asarray(x.coords if isinstance(x, BallPoint) else x, dtype=float)
    n = x.shape[-1]
    if not (1 <= k <= n):
        raise DomainError(f"need 1 <= k <= n = {n}, got k={k}")
    for _ in range(max_retries):
        g = rng.standard_normal((k, n))
        q, r = np.linalg.qr(g.T)
        if np.min(np.abs(np.diag(r))) > 1e-10 * math.sqrt(n):
            return float(np.linalg.norm(q.T @ x))
    raise NumericalError("Gaussian matrix repeatedly rank deficient")


def haar_projection_factor(n: int, k: int, rng: np.random.Generator, size: Optional[int] = None):
    """Draw ``||P_E x||_2 / ||x||_2`` for a Haar-random k-subspace E of R^n.

    By rotation invariance the squared ratio is Beta(k/2, (n-k)/2),
    independently of ``x``.
    """
    if not (1 <= k <= n):
        raise DomainError(f"need 1 <= k <= n = {n}, got k={k}")
    if k == n:
        return 1.0 if size is None else np.ones(size)
    return np.sqrt(rng.beta(k / 2.0, (n - k) / 2.0, size=size))
