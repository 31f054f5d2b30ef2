"""
Conjugate Normal-Wishart machinery shared by every sampler conditional.
"""

from .normal_wishart import (
    NormalWishartParams,
    StudentT,
    log_marginal_set,
    log_partition,
    log_predictive,
    posterior_params,
    predictive_t,
)
from .suffstats import GaussianSuffStats, stats_add, stats_remove

__all__ = [
    "GaussianSuffStats",
    "NormalWishartParams",
    "StudentT",
    "log_marginal_set",
    "log_partition",
    "log_predictive",
    "posterior_params",
    "predictive_t",
    "stats_add",
    "stats_remove",
]
