"""Normalised q-norm statistics, streaming moment summaries and tail estimates."""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError
from .specfun import BallParams, m_p

__all__ = [
    "StatisticKind",
    "MomentSummary",
    "stat_vn",
    "stat_vn_general",
    "stat_un",
    "stat_raw_norm",
    "stat_mdp_scaled",
    "vn_from_sums",
    "raw_norm_from_sums",
    "summarize",
    "merge",
    "tail_logprob",
    "tail_counts",
    "summaries_to_csv",
    "mdp_scale",
]


class StatisticKind(enum.Enum):
    VN = "Vn"                  # sqrt(n) (n^(1/p-1/q) ||Z||_q / M_p(q)^(1/q) - 1)
    VN_GENERAL = "VnGeneral"   # same with the extra (1 + mu_n/n)^(1/p) factor
    UN = "Un"                  # (sum |Y_i|^q / n)^(1/q)
    MDP_SCALED = "MdpScaled"   # V_n / b_n
    RAW_NORM = "RawNorm"       # n^(1/p-1/q) ||Z||_q


def stat_vn(norm_q, params: BallParams):
    """CLT normalisation of ``||Z_n||_q``. Vectorised over ``norm_q``."""
    return stat_vn_general(norm_q, params, 0.0)


def stat_vn_general(norm_q, params: BallParams, mu_n: float):
    """CLT normalisation with the growing-mixing correction ``(1 + mu_n/n)^(1/p)``."""
    p, q, n = params.p, params.q, params.n
    if mu_n < 0:
        raise DomainError(f"mu_n must be >= 0, got {mu_n!r}")
    log_scale = (1.0 / p - 1.0 / q) * math.log(n) + math.log1p(mu_n / n) / p - math.log(m_p(p, q)) / q
    norm_q = np.asarray(norm_q, dtype=float)
    with np.errstate(divide="ignore"):
        out = math.sqrt(n) * np.expm1(log_scale + np.log(norm_q))
    return out[()] if out.ndim == 0 else out


def stat_raw_norm(norm_q, params: BallParams):
    return params.n ** (1.0 / params.p - 1.0 / params.q) * np.asarray(norm_q, dtype=float)


def stat_mdp_scaled(norm_q, params: BallParams, b_n: float):
    return stat_vn(norm_q, params) / b_n


def stat_un(sum_q, n: int, q: float):
    """``(sum_q / n)^(1/q)``; the LLN-scale statistic built from the Y's alone."""
    return (np.asarray(sum_q, dtype=float) / n) ** (1.0 / q)


def mdp_scale(n: int, beta: float = 0.25) -> float:
    """Moderate-deviation scale ``b_n = n^beta``, beta in (0, 1/2)."""
    if not 0.0 < beta < 0.5:
        raise DomainError(f"beta must lie in (0, 1/2), got {beta!r}")
    return float(n) ** beta


def raw_norm_from_sums(sum_q, sum_p, w, params: BallParams):
    """``n^(1/p-1/q) ||Z||_q`` from ``sum |Y|^q``, ``sum |Y|^p`` and ``W``."""
    n, p, q = params.n, params.p, params.q
    return (np.asarray(sum_q) / n) ** (1.0 / q) / ((np.asarray(sum_p) + w) / n) ** (1.0 / p)


def vn_from_sums(sum_q, sum_p, w, params: BallParams, mu_n: float = 0.0):
    """:func:`stat_vn_general` evaluated directly from the power sums.

    Works in log space, so that ``p == q`` with ``W = 0`` gives exactly 0.
    """
    n, p, q = params.n, params.p, params.q
    log_ratio = (
        (np.log(np.asarray(sum_q) / n) - math.log(m_p(p, q))) / q
        - np.log((np.asarray(sum_p) + w) / n) / p
        + math.log1p(mu_n / n) / p
    )
    return math.sqrt(n) * np.expm1(log_ratio)


@dataclass(frozen=True)
class MomentSummary:
    """Count, mean, sum of squared deviations and extremes of a scalar stream."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    min: float = math.inf
    max: float = -math.inf

    @property
    def variance(self) -> float:
        if self.count < 2:
            return math.nan
        return self.m2 / (self.count - 1)

    @property
    def stderr(self) -> float:
        """Standard error of the mean."""
        return math.sqrt(self.variance / self.count) if self.count > 1 else math.nan

    @property
    def variance_stderr(self) -> float:
        """Normal-theory standard error of the sample variance."""
        return self.variance * math.sqrt(2.0 / (self.count - 1)) if self.count > 1 else math.nan

    def push(self, x: float) -> "MomentSummary":
        """Welford update with a single value."""
        x = float(x)
        n = self.count + 1
        delta = x - self.mean
        mean = self.mean + delta / n
        return MomentSummary(n, mean, self.m2 + delta * (x - mean), min(self.min, x), max(self.max, x))

    def merge(self, other: "MomentSummary") -> "MomentSummary":
        return merge(self, other)

    @classmethod
    def from_array(cls, values) -> "MomentSummary":
        a = np.asarray(values, dtype=float).ravel()
        if a.size == 0:
            return cls()
        mean = float(a.mean())
        return cls(int(a.size), mean, float(np.sum((a - mean) ** 2)), float(a.min()), float(a.max()))


def merge(a: MomentSummary, b: MomentSummary) -> MomentSummary:
    """Parallel-variance combination; symmetric in its arguments."""
    if a.count == 0:
        return b
    if b.count == 0:
        return a
    n = a.count + b.count
    delta = b.mean - a.mean
    mean = (a.count * a.mean + b.count * b.mean) / n
    m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / n)
    return MomentSummary(n, mean, m2, min(a.min, b.min), max(a.max, b.max))


def summarize(values: Iterable[float]) -> MomentSummary:
    """Streaming summary of ``values``; arrays take a vectorised two-pass path."""
    if isinstance(values, np.ndarray):
        return MomentSummary.from_array(values)
    s = MomentSummary()
    for v in values:
        s = s.push(v)
    return s


def tail_counts(values, thresholds, presorted: bool = False) -> np.ndarray:
    """Number of values ``>= t`` for each threshold ``t``."""
    v = np.asarray(values, dtype=float)
    if not presorted:
        v = np.sort(v)
    return v.size - np.searchsorted(v, np.asarray(thresholds, dtype=float), side="left")


def tail_logprob(values, threshold: float, presorted: bool = True) -> float:
    """``log(#{v >= threshold} / count)``; ``-inf`` when nothing exceeds."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise DomainError("tail_logprob needs a non-empty sample")
    k = int(tail_counts(v, [threshold], presorted=presorted)[0])
    return math.log(k / v.size) if k else -math.inf


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def summaries_to_csv(summaries: Mapping[str, MomentSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["stat", "count", "mean", "variance", "min", "max"])
    for name, s in summaries.items():
        w.writerow([name, s.count, _fmt(s.mean), _fmt(s.variance), _fmt(s.min), _fmt(s.max)])
    return buf.getvalue()
