"""Sampling and limit theorems for random vectors in l_p^n balls.

Subpackages: ``specfun`` (moments and limit variances), ``distributions``
(mixing laws and samplers), ``statistics`` (norm statistics and streaming
summaries), ``ratefun`` (MDP and LDP rate functions) and ``harness``
(seeded Monte Carlo experiments with verdicts).
"""
from .distributions import Dirac0, Exponential, External, Gamma, sample_ball
from .errors import ConfigError, DegenerateError, DomainError, LpBallError, NumericalError
from .harness import load_config, run_experiment
from .kernels import BACKEND
from .specfun import BallParams, clt_variance, gen_clt_variance, m_p

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BallParams",
    "ConfigError",
    "DegenerateError",
    "Dirac0",
    "DomainError",
    "Exponential",
    "External",
    "Gamma",
    "LpBallError",
    "NumericalError",
    "clt_variance",
    "gen_clt_variance",
    "load_config",
    "m_p",
    "run_experiment",
    "sample_ball",
]
