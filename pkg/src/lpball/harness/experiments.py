"""Monte Carlo experiments checking the limit theorems against their targets.

Every runner simulates power sums per dimension with :mod:`.engine`, turns
them into the relevant statistic, and writes one row per (n, statistic)
into an :class:`ExperimentReport`. Verdicts are issued at the largest n of
the grid; trend checks across n use the Spearman correlation of the error
with n.
"""
from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np
from scipy import stats

from ..distributions import Dirac0, Exponential, Gamma, MixingLaw
from ..errors import ConfigError
from ..ratefun import (
    DiracRate,
    ExponentialRate,
    ldp_rate_p_eq_q,
    ldp_rate_projection,
    ldp_rate_qgtp,
    ldp_rate_qltp,
    mdp_rate,
)
from ..specfun import (
    BallParams,
    clt_variance,
    gen_clt_variance,
    holder_conjugate,
    m_p,
    proj_variance_det,
    proj_variance_random,
    width_variance,
)
from ..statistics import mdp_scale, raw_norm_from_sums, stat_un, vn_from_sums
from .config import ExperimentConfig
from .engine import STREAM_HAAR, PowerSums, chunk_generator, chunk_layout, chunked_summary, map_chunks, simulate_power_sums
from .report import FAIL, INFO, INSUFFICIENT, PASS, ExperimentReport, ReportRow

__all__ = [
    "run_clt",
    "run_gen_clt",
    "run_mdp",
    "run_ldp",
    "run_proj_compare",
    "run_width_1d",
    "run_experiment",
    "spearman_trend",
    "mixing_rate_for_law",
]


# ---------------------------------------------------------------- helpers


def _variance_with_se(values: np.ndarray, n: int) -> tuple[float, float, float, float]:
    """``(mean, se_mean, variance, se_variance)``; the variance SE uses the 4th central moment."""
    s = chunked_summary(values, n)
    var = s.variance
    m4 = float(np.mean((values - s.mean) ** 4))
    se_var = math.sqrt(max(m4 - var * var, 0.0) / s.count)
    return s.mean, s.stderr, var, se_var


def spearman_trend(ns, errors) -> float:
    """Spearman correlation of ``errors`` with ``ns``; ``nan`` for fewer than 2 finite points."""
    ns, errors = np.asarray(ns, dtype=float), np.asarray(errors, dtype=float)
    ok = np.isfinite(errors)
    if ok.sum() < 2:
        return math.nan
    if np.ptp(errors[ok]) == 0.0:
        return 0.0
    return float(stats.spearmanr(ns[ok], errors[ok]).statistic)


def _rel_status(empirical: float, target: float, tol: float) -> tuple[str, float]:
    """Relative error check; an absolute band is used when the target is 0."""
    if not math.isfinite(empirical):
        return INSUFFICIENT, math.inf
    err = abs(empirical - target) / abs(target) if target != 0 else abs(empirical)
    return (PASS if err <= tol else FAIL), err


def mixing_rate_for_law(law: MixingLaw):
    """Rate function of ``W/n`` at speed n for a fixed mixing law."""
    if isinstance(law, Dirac0):
        return DiracRate()
    if isinstance(law, (Exponential, Gamma)):
        # a fixed law with exponential tail e^{-rate w}: W/n has rate ``rate * t`` at speed n
        return ExponentialRate(1.0 / law.rate)
    raise ConfigError(f"no LDP rate is known for mixing law {law!r}")


class _Simulations:
    """Lazily simulated power sums per dimension, shared by the checks of one run."""

    def __init__(self, cfg: ExperimentConfig, p: float, q: float, threads: int,
                 law: Optional[Callable[[int], MixingLaw]] = None, k: Optional[Callable[[int], int]] = None):
        self.cfg, self.p, self.q, self.threads = cfg, p, q, threads
        self._law = law or (lambda n: cfg.law)
        self._k = k or (lambda n: None)
        self._cache: dict[int, PowerSums] = {}

    def __call__(self, n: int) -> PowerSums:
        if n not in self._cache:
            self._cache[n] = simulate_power_sums(
                self.cfg.seed, n, self.cfg.samples_per_n, self.p, self.q, self._law(n), k=self._k(n), threads=self.threads
            )
        return self._cache[n]


# ---------------------------------------------------------------- CLT


def _clt_block(report: ExperimentReport, values_at: Callable[[int], np.ndarray], dims: Callable[[int], int],
               target: float, prefix: str, degenerate: bool = False, ks: bool = True) -> None:
    cfg = report.config
    tol = cfg.tolerances
    per_n, errs = [], []
    last = cfg.n_grid[-1]
    for n in cfg.n_grid:
        v = values_at(n)
        mean, se_mean, var, se_var = _variance_with_se(v, dims(n))
        ks_d = math.nan
        if not degenerate and target > 0:
            ks_d = float(stats.kstest(v, "norm", args=(0.0, math.sqrt(target))).statistic)
        errs.append(abs(var - target))
        per_n.append({"n": n, "mean": mean, "variance": var, "variance_se": se_var, "ks": ks_d})
        final = n == last
        var_status = INFO
        if final:
            if degenerate:
                # the limit is the point mass at 0: the variance must be tiny on the scale 1/n
                var_status = PASS if var <= 10.0 / n else FAIL
                report.add_verdict(f"{prefix}variance_degenerate", var_status, var, 0.0, 10.0 / n, se_var,
                                   "p == q: limit is degenerate")
            else:
                var_status, rel = _rel_status(var, target, tol.clt_variance)
                report.add_verdict(f"{prefix}variance", var_status, var, target, tol.clt_variance, se_var,
                                   f"relative error {rel:.4g}")
        report.rows.append(ReportRow(n, f"{prefix}mean", mean, 0.0, se_mean))
        report.rows.append(ReportRow(n, f"{prefix}variance", var, target, se_var, var_status))
        if not math.isnan(ks_d):
            ks_status = INFO
            if final and ks:
                ks_status = PASS if ks_d <= tol.ks_distance else FAIL
                report.add_verdict(f"{prefix}ks", ks_status, ks_d, 0.0, tol.ks_distance,
                                   1.0 / math.sqrt(v.size), "Kolmogorov-Smirnov distance to the target normal")
            report.rows.append(ReportRow(n, f"{prefix}ks", ks_d, 0.0, None, ks_status))
    rho = spearman_trend(cfg.n_grid, errs)
    report.rows.append(ReportRow("all", f"{prefix}variance_error_trend", rho, None, None))
    report.diagnostics[f"{prefix}clt"] = {"target_variance": target, "degenerate": degenerate,
                                          "per_n": per_n, "spearman_error_vs_n": rho}


def run_clt(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Variance, mean and KS distance of the CLT statistic against ``N(0, sigma^2)``."""
    p, q = cfg.params.p, cfg.params.q
    degenerate = p == q
    target = clt_variance(p, q)
    report = ExperimentReport(cfg)
    sims = _Simulations(cfg, p, q, threads)

    def values(n):
        s = sims(n)
        return vn_from_sums(s.sum_q, s.sum_p, s.w, BallParams(p, q, n))

    _clt_block(report, values, lambda n: n, target, "", degenerate=degenerate)
    return report


def run_gen_clt(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """CLT with a dimension-dependent mixing law and the ``mu_n`` correction."""
    p, q = cfg.params.p, cfg.params.q
    rule, k_rule = cfg.mu_n_rule, cfg.k_rule
    mu, tau2 = rule.limits(p, k_rule)
    target = gen_clt_variance(p, q, mu, tau2)
    report = ExperimentReport(cfg)
    report.diagnostics["limits"] = {"mu": mu, "tau2": tau2}
    dim = lambda n: rule.dimension(n, k_rule)  # noqa: E731

    def values(n):
        d = dim(n)
        s = simulate_power_sums(cfg.seed, d, cfg.samples_per_n, p, q, rule.law(n, p, cfg.law, k_rule), threads=threads)
        return vn_from_sums(s.sum_q, s.sum_p, s.w, BallParams(p, q, d), rule.mu_n(n, p, k_rule))

    _clt_block(report, values, dim, target, "", ks=False)
    return report


# ---------------------------------------------------------------- MDP


def _tail_cell(values: np.ndarray, threshold: float, upper: bool) -> tuple[int, float, float]:
    """``(count, log P_hat, relative SE of P_hat)`` for ``v >= t`` (upper) or ``v <= t``."""
    count = int(np.count_nonzero(values >= threshold if upper else values <= threshold))
    if count == 0:
        return 0, -math.inf, math.inf
    ph = count / values.size
    return count, math.log(ph), math.sqrt((1.0 - ph) / (values.size * ph))


def _mdp_block(report: ExperimentReport, values_at: Callable[[int], np.ndarray], p: float, q: float,
               prefix: str) -> None:
    cfg = report.config
    tol = cfg.tolerances.tail_slope
    sigma2 = clt_variance(p, q)
    cells = {}
    for t in cfg.thresholds:
        target = -float(mdp_rate(t, p, q))
        ys, errs = [], []
        for n in cfg.n_grid:
            b = mdp_scale(n, cfg.beta)
            speed = b * b
            v = values_at(n) / b
            count, logp, rel_se = _tail_cell(v, t, upper=t >= 0)
            y = logp / speed
            se = rel_se / speed
            predicted = speed * target
            feasible = predicted >= math.log(10.0 / cfg.samples_per_n)
            ys.append(y)
            errs.append(abs(y - target))
            status = INFO
            if n == cfg.n_grid[-1]:
                status = INSUFFICIENT if count == 0 else _rel_status(y, target, tol)[0]
                report.add_verdict(f"{prefix}mdp_t={t:g}", status, y, target, tol, se,
                                   f"speed b_n^2={speed:.6g}, exceedances={count}"
                                   + ("" if feasible else ", target tail below 10/samples"))
            report.rows.append(ReportRow(n, f"{prefix}mdp_y[t={t:g}]", y, target, se,
                                         INSUFFICIENT if count == 0 else status))
            cells[(t, n)] = {"t": t, "n": n, "speed_kind": "b_n^2", "speed": speed, "count": count, "y": y,
                             "target": target, "predicted_logprob": predicted, "feasible": feasible}
        if len(cfg.n_grid) >= 2:
            _trend_verdict(report, f"{prefix}mdp_trend_t={t:g}", cfg.n_grid, errs)
    # evenness of the rate: y(n, t) against y(n, -t)
    for t in cfg.thresholds:
        if t > 0 and -t in cfg.thresholds:
            for n in cfg.n_grid:
                a, b = cells[(t, n)]["y"], cells[(-t, n)]["y"]
                report.rows.append(ReportRow(n, f"{prefix}mdp_symmetry[t={t:g}]", a - b, 0.0, None))
    report.diagnostics[f"{prefix}mdp"] = {"sigma2": sigma2, "beta": cfg.beta, "cells": list(cells.values())}


def _trend_verdict(report: ExperimentReport, check: str, ns, errs) -> None:
    if not all(math.isfinite(e) for e in errs):
        report.add_verdict(check, INSUFFICIENT, math.nan, -1.0, 0.0, math.nan, "empty tail at some n")
        report.rows.append(ReportRow("all", check, math.nan, None, None, INSUFFICIENT))
        return
    rho = spearman_trend(ns, errs)
    status = PASS if rho < 0 else FAIL
    report.add_verdict(check, status, rho, -1.0, 0.0, math.nan, "Spearman correlation of |y - target| with n")
    report.rows.append(ReportRow("all", check, rho, -1.0, None, status))


def run_mdp(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Moderate deviations: ``(1/b_n^2) log P[V_n / b_n >= t]`` against ``-t^2 / (2 sigma^2)``."""
    p, q = cfg.params.p, cfg.params.q
    report = ExperimentReport(cfg)
    sims = _Simulations(cfg, p, q, threads)

    def values(n):
        s = sims(n)
        return vn_from_sums(s.sum_q, s.sum_p, s.w, BallParams(p, q, n))

    _mdp_block(report, values, p, q, "")
    return report


# ---------------------------------------------------------------- LDP


def _ldp_block(report: ExperimentReport, sims: Callable[[int], PowerSums], p: float, q: float,
               rate: Callable[[float], float], prefix: str) -> None:
    cfg = report.config
    tol = cfg.tolerances.tail_slope
    if p < q:
        speed_kind, center = "n^(p/q)", m_p(p, q) ** (1.0 / q)
    elif p > q:
        speed_kind, center = "n", m_p(p, q) ** (1.0 / q)
    else:
        speed_kind, center = "n", 1.0
    with_un = p < q
    targets = {x: float(rate(x)) for x in cfg.thresholds}
    gaps, cells = [], []
    for n in cfg.n_grid:
        speed = n ** (p / q) if p < q else float(n)
        s = sims(n)
        z = raw_norm_from_sums(s.sum_q, s.sum_p, s.w, BallParams(p, q, n))
        u = stat_un(s.sum_q, n, q) if with_un else None
        gap = 0.0
        for x in cfg.thresholds:
            upper = x >= center and p != q
            count, logp, rel_se = _tail_cell(z, x, upper)
            y = -logp / speed
            cells.append({"x": x, "n": n, "speed_kind": speed_kind, "speed": speed, "count": count, "y": y,
                          "target": targets[x], "upper_tail": upper})
            report.rows.append(ReportRow(n, f"{prefix}ldp_y[x={x:.6g}]", y, targets[x], rel_se / speed,
                                         INSUFFICIENT if count == 0 else INFO))
            if with_un:
                cu, logpu, rel_seu = _tail_cell(u, x, upper)
                yu = -logpu / speed
                report.rows.append(ReportRow(n, f"{prefix}ldp_y_un[x={x:.6g}]", yu, targets[x], rel_seu / speed,
                                             INSUFFICIENT if cu == 0 else INFO))
                if math.isfinite(targets[x]):
                    gap = max(gap, abs(y - yu)) if count and cu else math.inf
        if with_un:
            gaps.append(gap)
            report.rows.append(ReportRow(n, f"{prefix}ldp_equivalence_gap", gap, 0.0, None))

    last = cfg.n_grid[-1]
    for x in cfg.thresholds:
        mine = [c for c in cells if c["x"] == x]
        final = mine[-1]
        target = targets[x]
        se = next(r.stderr for r in reversed(report.rows) if r.n == last and r.statistic == f"{prefix}ldp_y[x={x:.6g}]")
        if math.isinf(target):
            status = INFO  # no finite rate to compare with at this speed
        elif final["count"] == 0:
            status = INSUFFICIENT
        else:
            status = _rel_status(final["y"], target, tol)[0]
        if status != INFO:
            report.add_verdict(f"{prefix}ldp_x={x:.6g}", status, final["y"], target, tol, se,
                               f"speed {speed_kind}, exceedances={final['count']}")
        if len(cfg.n_grid) >= 2 and math.isfinite(target):
            _trend_verdict(report, f"{prefix}ldp_trend_x={x:.6g}", cfg.n_grid, [abs(c["y"] - target) for c in mine])
    if with_un and len(gaps) >= 2:
        check = f"{prefix}ldp_equivalence_gap_decreasing"
        if not all(math.isfinite(g) for g in gaps):
            report.add_verdict(check, INSUFFICIENT, math.nan, 0.0, 0.0, math.nan, "empty tail at some n")
        else:
            ok = all(b < a for a, b in zip(gaps, gaps[1:]))
            report.add_verdict(check, PASS if ok else FAIL, gaps[-1], 0.0, 0.0, math.nan,
                               "max_x |y_Z - y_U| strictly decreasing in n: " + ", ".join(f"{g:.4g}" for g in gaps))
    report.diagnostics[f"{prefix}ldp"] = {"speed_kind": speed_kind, "lln_point": center, "cells": cells,
                                          "equivalence_gaps": gaps if with_un else None}


def run_ldp(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Large deviations of ``n^(1/p-1/q) ||Z||_q`` for the three orderings of p and q."""
    p, q = cfg.params.p, cfg.params.q
    if p < q:
        rate = lambda x: ldp_rate_qgtp(x, p, q)  # noqa: E731
    elif p > q:
        iw = mixing_rate_for_law(cfg.law)
        rate = lambda x: ldp_rate_qltp(x, p, q, iw)  # noqa: E731
    else:
        iw = mixing_rate_for_law(cfg.law)
        rate = lambda x: ldp_rate_p_eq_q(x, p, iw)  # noqa: E731
    report = ExperimentReport(cfg)
    _ldp_block(report, _Simulations(cfg, p, q, threads), p, q, rate, "")
    return report


# ---------------------------------------------------------------- projections


def _haar_factors(cfg: ExperimentConfig, n: int, k: int, threads: int) -> np.ndarray:
    def work(index, rows):
        gen = chunk_generator(cfg.seed, STREAM_HAAR, n, index)
        return np.sqrt(gen.beta(k / 2.0, (n - k) / 2.0, size=rows)) if k < n else np.ones(rows)

    return np.concatenate(map_chunks(work, chunk_layout(n, cfg.samples_per_n), threads))


def run_proj_compare(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Euclidean norm of Haar-random versus coordinate projections of a point of ``B_p^n``.

    The statistic is ``n^(1/p) / sqrt(M_p(2)) ||P X||_2 - sqrt(k_n)``. The
    Haar projection is simulated through its norm ratio, a square-rooted
    Beta(k/2, (n-k)/2) variable independent of ``X``.
    """
    p = cfg.params.p
    k_rule = cfg.k_rule
    lam = k_rule.limit
    tol = cfg.tolerances
    targets = {"haar": proj_variance_random(p, lam), "coord": proj_variance_det(p, lam)}
    report = ExperimentReport(cfg)
    m2 = m_p(p, 2.0)
    per_n = []
    finals = {}
    for n in cfg.n_grid:
        k = k_rule.k(n)
        s = simulate_power_sums(cfg.seed, n, cfg.samples_per_n, p, 2.0, cfg.law, k=k, threads=threads)
        radial = (s.sum_p + s.w) ** (1.0 / p)
        scale = n ** (1.0 / p) / math.sqrt(m2)
        values = {
            "haar": scale * _haar_factors(cfg, n, k, threads) * np.sqrt(s.sum_q) / radial - math.sqrt(k),
            "coord": scale * np.sqrt(s.sum_head) / radial - math.sqrt(k),
        }
        entry = {"n": n, "k": k}
        for name, v in values.items():
            mean, se_mean, var, se_var = _variance_with_se(v, n)
            status = INFO
            if n == cfg.n_grid[-1]:
                status, rel = _rel_status(var, targets[name], tol.projection_variance)
                report.add_verdict(f"proj_{name}_variance", status, var, targets[name], tol.projection_variance,
                                   se_var, f"lambda={lam:g}, relative error {rel:.4g}")
                finals[name] = (var, se_var)
            report.rows.append(ReportRow(n, f"proj_{name}_mean", mean, None, se_mean))
            report.rows.append(ReportRow(n, f"proj_{name}_variance", var, targets[name], se_var, status))
            entry[name] = {"mean": mean, "variance": var, "variance_se": se_var}
        per_n.append(entry)

        if cfg.thresholds and p < 2.0 and lam == 1.0:
            # tail of n^(1/p - 1/2) ||Pi_k X||_2 at speed n^(p/2)
            norm = n ** (1.0 / p - 0.5) * np.sqrt(s.sum_head) / radial
            speed = n ** (p / 2.0)
            for x in cfg.thresholds:
                count, logp, rel_se = _tail_cell(norm, x, upper=True)
                report.rows.append(ReportRow(n, f"proj_coord_ldp_y[x={x:.6g}]", -logp / speed,
                                             float(ldp_rate_projection(x, p, 1.0)), rel_se / speed,
                                             INSUFFICIENT if count == 0 else INFO))

    if lam == 1.0:
        (vh, sh), (vc, sc) = finals["haar"], finals["coord"]
        band = tol.joint_se * math.hypot(sh, sc)
        diff = abs(vh - vc)
        report.add_verdict("proj_agreement", PASS if diff <= band else FAIL, vh - vc, 0.0, band, math.hypot(sh, sc),
                           f"|var_haar - var_coord| within {tol.joint_se:g} joint standard errors")
    report.diagnostics["proj"] = {"lambda": lam, "targets": targets, "per_n": per_n}
    return report


# ---------------------------------------------------------------- width


def run_width_1d(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Width of a random 1-D projection of ``B_q^n``, i.e. ``2 ||theta||_{q*}`` on the sphere.

    ``theta`` is uniform on the Euclidean sphere (``p = 2``, no mixing), so
    the CLT is the one of ``||theta||_{q*}``; the tail check is MDP when
    ``q* < 2`` and LDP at speed ``n^(2/q*)`` when ``q* > 2``.
    """
    q = cfg.params.q
    qs = holder_conjugate(q)
    report = ExperimentReport(cfg)
    sims = _Simulations(cfg, 2.0, qs, threads, law=lambda n: Dirac0())

    def values(n):
        s = sims(n)
        return vn_from_sums(s.sum_q, s.sum_p, s.w, BallParams(2.0, qs, n))

    _clt_block(report, values, lambda n: n, width_variance(q), "width_", ks=False)
    branch = "mdp" if qs < 2.0 else "ldp"
    report.diagnostics["width"] = {"q_star": qs, "branch": branch}
    if cfg.thresholds:
        if branch == "mdp":
            _mdp_block(report, values, 2.0, qs, "width_")
        else:
            _ldp_block(report, sims, 2.0, qs, lambda x: ldp_rate_qgtp(x, 2.0, qs), "width_")
    return report


RUNNERS = {
    "clt": run_clt,
    "gen_clt": run_gen_clt,
    "mdp": run_mdp,
    "ldp": run_ldp,
    "proj_compare": run_proj_compare,
    "width_1d": run_width_1d,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Dispatch on ``cfg.kind``."""
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads!r}")
    return RUNNERS[cfg.kind](cfg, threads=threads)
