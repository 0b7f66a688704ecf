"""Monte Carlo experiments: configuration, deterministic sampling, runners and reports."""
from .config import KINDS, ExperimentConfig, KRule, MuRule, Tolerances, config_from_dict, load_config
from .engine import CHUNK_VARIATES, PowerSums, chunk_layout, simulate_power_sums
from .experiments import (
    mixing_rate_for_law,
    run_clt,
    run_experiment,
    run_gen_clt,
    run_ldp,
    run_mdp,
    run_proj_compare,
    run_width_1d,
    spearman_trend,
)
from .report import FAIL, INFO, INSUFFICIENT, PASS, ExperimentReport, ReportRow, Verdict

__all__ = [
    "CHUNK_VARIATES",
    "ExperimentConfig",
    "ExperimentReport",
    "FAIL",
    "INFO",
    "INSUFFICIENT",
    "KINDS",
    "KRule",
    "MuRule",
    "PASS",
    "PowerSums",
    "ReportRow",
    "Tolerances",
    "Verdict",
    "chunk_layout",
    "config_from_dict",
    "load_config",
    "mixing_rate_for_law",
    "run_clt",
    "run_experiment",
    "run_gen_clt",
    "run_ldp",
    "run_mdp",
    "run_proj_compare",
    "run_width_1d",
    "simulate_power_sums",
    "spearman_trend",
]
