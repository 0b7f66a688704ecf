"""Experiment configuration: JSON schema, validation and the n-dependent rules."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from ..distributions import Dirac0, Gamma, MixingLaw, law_from_dict, law_to_dict
from ..errors import ConfigError, DomainError
from ..specfun import BallParams

__all__ = [
    "KINDS",
    "Tolerances",
    "MuRule",
    "KRule",
    "ExperimentConfig",
    "load_config",
    "config_from_dict",
]

KINDS = ("clt", "gen_clt", "mdp", "ldp", "proj_compare", "width_1d")
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class Tolerances:
    """Relative and absolute bands used by the verdicts."""

    clt_variance: float = 0.10
    ks_distance: float = 0.02
    tail_slope: float = 0.25
    projection_variance: float = 0.15
    joint_se: float = 2.0


@dataclass(frozen=True)
class KRule:
    """Projection dimension ``k_n``: ``identity``, ``fraction`` (``ceil(lam n)``) or ``minus_sqrt``."""

    kind: str
    lam: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("identity", "fraction", "minus_sqrt"):
            raise ConfigError(f"unknown k_rule kind {self.kind!r}")
        if self.kind == "fraction" and not (self.lam is not None and 0.0 < self.lam <= 1.0):
            raise ConfigError(f"k_rule 'fraction' needs lam in (0, 1], got {self.lam!r}")

    def k(self, n: int) -> int:
        if self.kind == "identity":
            return n
        if self.kind == "fraction":
            return min(n, max(1, math.ceil(self.lam * n)))
        return max(1, n - math.ceil(math.sqrt(n)))

    @property
    def limit(self) -> float:
        """``lim k_n / n``."""
        return self.lam if self.kind == "fraction" else 1.0


@dataclass(frozen=True)
class MuRule:
    """Mixing law that changes with the dimension, with its centring ``mu_n``.

    ``zero``: the configured law for every n, ``mu_n = 0``.
    ``gamma_fraction``: ``W_n ~ Gamma(shape_per_n * n, rate)``.
    ``gamma_power``: ``W_n ~ Gamma(scale * n^exponent, rate)``; exponents above
    1 make ``mu_n / n`` diverge and are rejected.
    ``projection``: coordinate projection onto ``k_n`` of a uniform point of
    ``B_p^n``, i.e. dimension ``k_n`` with ``W ~ Gamma((n - k_n)/p + 1, 1/p)``.
    """

    kind: str
    shape_per_n: Optional[float] = None
    scale: Optional[float] = None
    exponent: Optional[float] = None
    rate: Optional[float] = None

    def __post_init__(self):
        k = self.kind
        if k not in ("zero", "gamma_fraction", "gamma_power", "projection"):
            raise ConfigError(f"unknown mu_n_rule kind {k!r}")
        if k == "gamma_fraction" and not (_pos(self.shape_per_n) and _pos(self.rate)):
            raise ConfigError("gamma_fraction needs shape_per_n > 0 and rate > 0")
        if k == "gamma_power":
            if not (_pos(self.scale) and _pos(self.rate) and self.exponent is not None):
                raise ConfigError("gamma_power needs scale > 0, rate > 0 and an exponent")
            if self.exponent > 1.0:
                raise ConfigError(f"mu_n / n diverges for exponent {self.exponent!r} > 1")

    def limits(self, p: float, k_rule: Optional[KRule]) -> tuple[float, float]:
        """``(mu, tau2)`` = limits of ``mu_n / n`` and ``Var(W_n) / n``."""
        if self.kind == "zero":
            return 0.0, 0.0
        if self.kind == "gamma_fraction":
            return self.shape_per_n / self.rate, self.shape_per_n / self.rate**2
        if self.kind == "gamma_power":
            if self.exponent < 1.0:
                return 0.0, 0.0
            return self.scale / self.rate, self.scale / self.rate**2
        lam = _need_k(k_rule).limit
        return (1.0 - lam) / lam, p * (1.0 - lam) / lam

    def dimension(self, n: int, k_rule: Optional[KRule]) -> int:
        """Dimension in which the ball point is sampled."""
        return _need_k(k_rule).k(n) if self.kind == "projection" else n

    def law(self, n: int, p: float, base: MixingLaw, k_rule: Optional[KRule]) -> MixingLaw:
        if self.kind == "zero":
            return base
        if self.kind == "gamma_fraction":
            return Gamma(self.shape_per_n * n, self.rate)
        if self.kind == "gamma_power":
            return Gamma(self.scale * n**self.exponent, self.rate)
        k = _need_k(k_rule).k(n)
        return Gamma((n - k) / p + 1.0, 1.0 / p)

    def mu_n(self, n: int, p: float, k_rule: Optional[KRule]) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "gamma_fraction":
            return self.shape_per_n * n / self.rate
        if self.kind == "gamma_power":
            return self.scale * n**self.exponent / self.rate
        return float(n - _need_k(k_rule).k(n)) + p


def _pos(x) -> bool:
    return x is not None and x > 0


def _need_k(k_rule: Optional[KRule]) -> KRule:
    if k_rule is None:
        raise ConfigError("this rule needs a k_rule")
    return k_rule


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment. JSON keys are exactly these field names."""

    kind: str
    params: BallParams
    law: MixingLaw = field(default_factory=Dirac0)
    n_grid: tuple[int, ...] = (1024,)
    samples_per_n: int = 10_000
    seed: int = 0
    beta: float = 0.25
    thresholds: tuple[float, ...] = ()
    mu_n_rule: Optional[MuRule] = None
    k_rule: Optional[KRule] = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(n < 1 for n in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"n_grid must be a non-empty strictly increasing list of positive integers: {grid}")
        object.__setattr__(self, "n_grid", grid)
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        if int(self.samples_per_n) < MIN_SAMPLES:
            raise ConfigError(f"samples_per_n must be >= {MIN_SAMPLES}, got {self.samples_per_n}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not 0.0 < self.beta < 0.5:
            raise ConfigError(f"beta must lie in (0, 1/2), got {self.beta!r}")
        p, q = self.params.p, self.params.q
        if self.kind == "gen_clt" and self.mu_n_rule is None:
            raise ConfigError("gen_clt needs a mu_n_rule")
        if self.kind == "mdp" and not q < p:
            raise ConfigError(f"mdp needs q < p, got p={p}, q={q}")
        if self.kind in ("mdp", "ldp") and not self.thresholds:
            raise ConfigError(f"{self.kind} needs at least one threshold")
        if self.kind == "proj_compare" and self.k_rule is None:
            raise ConfigError("proj_compare needs a k_rule")
        if self.kind == "width_1d" and not (q > 1.0 and q != 2.0):
            raise ConfigError(f"width_1d needs q > 1 and q != 2, got q={q}")
        if self.mu_n_rule is not None and self.mu_n_rule.kind == "projection":
            _need_k(self.k_rule)
        if self.k_rule is not None:
            for n in self.n_grid:
                if self.k_rule.k(n) > n:
                    raise ConfigError(f"k_n > n at n={n}")

    @property
    def name(self) -> str:
        return self.label or self.kind

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "params": {"p": self.params.p, "q": self.params.q},
            "law": law_to_dict(self.law),
            "n_grid": list(self.n_grid),
            "samples_per_n": int(self.samples_per_n),
            "seed": int(self.seed),
            "beta": self.beta,
            "thresholds": list(self.thresholds),
            "mu_n_rule": None if self.mu_n_rule is None else _drop_none(asdict(self.mu_n_rule)),
            "k_rule": None if self.k_rule is None else _drop_none(asdict(self.k_rule)),
            "tolerances": asdict(self.tolerances),
            "label": self.label,
        }
        return d

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return config_from_dict({**self.to_dict(), "seed": seed})


def _drop_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


_FIELDS = {
    "kind",
    "params",
    "law",
    "n_grid",
    "samples_per_n",
    "seed",
    "beta",
    "thresholds",
    "mu_n_rule",
    "k_rule",
    "tolerances",
    "label",
}


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(d) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("kind", "params"):
        if key not in d:
            raise ConfigError(f"config is missing {key!r}")
    try:
        pr = d["params"]
        params = BallParams(float(pr["p"]), float(pr["q"]), int(pr.get("n", 1)))
        kwargs = dict(kind=d["kind"], params=params)
        if "law" in d:
            kwargs["law"] = law_from_dict(d["law"])
        for key in ("n_grid", "thresholds"):
            if key in d:
                kwargs[key] = tuple(d[key])
        for key, cast in (("samples_per_n", int), ("seed", int), ("beta", float), ("label", str)):
            if key in d:
                kwargs[key] = cast(d[key])
        if d.get("mu_n_rule") is not None:
            kwargs["mu_n_rule"] = MuRule(**d["mu_n_rule"])
        if d.get("k_rule") is not None:
            kwargs["k_rule"] = KRule(**d["k_rule"])
        if d.get("tolerances") is not None:
            kwargs["tolerances"] = Tolerances(**d["tolerances"])
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)
