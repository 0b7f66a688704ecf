"""Rate functions: closed forms, the joint log-MGF, its conjugate and contractions."""
from .closed import (
    ContractionMinimum,
    PrintedFormReport,
    compare_printed_form,
    conjugate_lambda_tilde,
    ldp_rate_p_eq_q,
    ldp_rate_projection,
    ldp_rate_qgtp,
    ldp_rate_width,
    log_mgf_lambda_tilde,
    mdp_constrained_min,
    mdp_core_direction,
    mdp_rate,
    mdp_rate_bivariate,
    mdp_rate_bivariate_printed,
    printed_form_constant,
)
from .conjugate import ConjugatePoint, conjugate_region, legendre_fenchel
from .contraction import ldp_rate_qltp
from .cumulant import LambdaDerivatives, lambda_derivatives, lambda_value, log_mgf_lambda
from .extreal import INF, ExtReal, ext, ext_min, format_ext
from .mixing import DiracRate, ExponentialRate, MixingRate, RateGrid, UserGrid, mixing_rate_eval

__all__ = [
    "ConjugatePoint",
    "ContractionMinimum",
    "DiracRate",
    "ExponentialRate",
    "ExtReal",
    "INF",
    "LambdaDerivatives",
    "MixingRate",
    "PrintedFormReport",
    "RateGrid",
    "UserGrid",
    "compare_printed_form",
    "conjugate_lambda_tilde",
    "conjugate_region",
    "ext",
    "ext_min",
    "format_ext",
    "lambda_derivatives",
    "lambda_value",
    "ldp_rate_p_eq_q",
    "ldp_rate_projection",
    "ldp_rate_qgtp",
    "ldp_rate_qltp",
    "ldp_rate_width",
    "legendre_fenchel",
    "log_mgf_lambda",
    "log_mgf_lambda_tilde",
    "mdp_constrained_min",
    "mdp_core_direction",
    "mdp_rate",
    "mdp_rate_bivariate",
    "mdp_rate_bivariate_printed",
    "mixing_rate_eval",
    "printed_form_constant",
]
