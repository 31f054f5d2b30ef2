"""
Collapsed Gibbs sampling of the hierarchical Dirichlet process through its
Chinese restaurant franchise representation.
"""

from .categorical import normalize_log_weights, sample_log_categorical
from .concentrations import (
    HDPConcentrations,
    draw_concentrations,
    resample_concentrations,
    resolve_concentrations,
)
from .likelihood import ConjugateLikelihood, ConstantLikelihood
from .sampler import (
    dish_prior_log_weights,
    gibbs_sweep,
    init_state,
    run_chain,
    sample_dish,
    sample_table,
)
from .state import REFRESH_INTERVAL, CRFState

__all__ = [
    "CRFState",
    "ConjugateLikelihood",
    "ConstantLikelihood",
    "HDPConcentrations",
    "REFRESH_INTERVAL",
    "dish_prior_log_weights",
    "draw_concentrations",
    "gibbs_sweep",
    "init_state",
    "normalize_log_weights",
    "resample_concentrations",
    "resolve_concentrations",
    "run_chain",
    "sample_dish",
    "sample_log_categorical",
    "sample_table",
]
