"""
Collapsed likelihood terms of the Chinese restaurant franchise conditionals.

``ConjugateLikelihood`` evaluates the Normal-Wishart predictive densities
f_k(x) of a single instance and the joint densities of a table's instances
under every live dish, caching one posterior per dish. ``ConstantLikelihood``
replaces every density by 1, which reduces the conditionals to the bare
Chinese restaurant process.
"""

from dataclasses import dataclass

import numpy as np

from bayes import (
    GaussianSuffStats,
    StudentT,
    log_partition,
    posterior_params,
    predictive_t,
)
from bayes.normal_wishart import LOG_PI


@dataclass(frozen=True, eq=False)
class _DishPosterior:
    params: object
    predictive: StudentT
    log_z: float


class ConjugateLikelihood:
    """Normal-Wishart likelihood with cached per-dish posteriors."""

    def __init__(self, prior):
        self.prior = prior
        self._prior_posterior = self._build(GaussianSuffStats.empty(prior.d))
        self._cache = {}

    def _build(self, stats):
        params = posterior_params(self.prior, stats)
        return _DishPosterior(
            params=params,
            predictive=predictive_t(params),
            log_z=float(log_partition(params)),
        )

    def invalidate(self, dish):
        self._cache.pop(dish, None)

    def reset(self):
        self._cache.clear()

    def _posterior(self, dish, stats):
        cached = self._cache.get(dish)
        if cached is None:
            cached = self._build(stats)
            self._cache[dish] = cached
        return cached

    def log_predictive(self, x, dishes, dish_stats):
        """
        Log f_k(x) for every dish in ``dishes`` and for a brand-new dish.

        Returns ``(array over dishes, new-dish value)``.
        """
        existing = np.fromiter(
            (
                self._posterior(k, dish_stats[k]).predictive.logpdf(x)
                for k in dishes
            ),
            dtype=float,
            count=len(dishes),
        )
        return existing, self._prior_posterior.predictive.logpdf(x)

    def log_marginal(self, table_stats, dishes, dish_stats):
        """
        Log joint density of a table's instances under every dish in
        ``dishes`` and under a brand-new dish.
        """
        offset = 0.5 * table_stats.n * self.prior.d * LOG_PI

        def joint(post):
            updated = posterior_params(post.params, table_stats)
            return log_partition(updated) - post.log_z - offset

        existing = np.fromiter(
            (joint(self._posterior(k, dish_stats[k])) for k in dishes),
            dtype=float,
            count=len(dishes),
        )
        return existing, float(joint(self._prior_posterior))


class ConstantLikelihood:
    """Likelihood stub with every density equal to one."""

    def invalidate(self, dish):
        pass

    def reset(self):
        pass

    def log_predictive(self, x, dishes, dish_stats):
        return np.zeros(len(dishes)), 0.0

    def log_marginal(self, table_stats, dishes, dish_stats):
        return np.zeros(len(dishes)), 0.0
