"""
Concentration parameters of the hierarchical Dirichlet process.

By default the top-level concentration gamma and the group-level alpha0 are
fixed at the means of their gamma priors. Resampling after every sweep is
opt-in and uses auxiliary-variable Gibbs updates.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import bernoulli, beta, gamma

from osr_project.exceptions import InvalidInputError


@dataclass(frozen=True)
class HDPConcentrations:
    """Concentrations (gamma, alpha0) and their (shape, rate) gamma priors."""

    gamma: float | None = None
    alpha0: float | None = None
    gamma_prior: tuple = (100.0, 1.0)
    alpha0_prior: tuple = (10.0, 1.0)
    sample_initial: bool = False
    resample: bool = False

    def __post_init__(self):
        if any(v is not None and not v > 0 for v in (self.gamma, self.alpha0)):
            raise InvalidInputError(
                f"Concentrations must be positive, got gamma={self.gamma}, "
                f"alpha0={self.alpha0}."
            )
        for name in ("gamma_prior", "alpha0_prior"):
            prior = tuple(float(v) for v in getattr(self, name))
            if len(prior) != 2 or min(prior) <= 0:
                raise InvalidInputError(
                    f"{name} must be a positive (shape, rate) pair, got {prior}."
                )
            object.__setattr__(self, name, prior)

    @property
    def resolved(self):
        return self.gamma is not None and self.alpha0 is not None

    def as_dict(self):
        return {
            "gamma": self.gamma,
            "alpha0": self.alpha0,
            "gamma_prior": list(self.gamma_prior),
            "alpha0_prior": list(self.alpha0_prior),
            "sample_initial": self.sample_initial,
            "resample": self.resample,
        }


def draw_concentrations(conc, rng, sample=False):
    """
    Values for (gamma, alpha0).

    The default returns the prior means; with ``sample=True`` both are drawn
    from their Gamma(shape, rate) priors.
    """
    (g_shape, g_rate), (a_shape, a_rate) = conc.gamma_prior, conc.alpha0_prior
    if not sample:
        return g_shape / g_rate, a_shape / a_rate
    return (
        float(gamma.rvs(g_shape, scale=1.0 / g_rate, random_state=rng)),
        float(gamma.rvs(a_shape, scale=1.0 / a_rate, random_state=rng)),
    )


def resample_gamma(value, num_dishes, num_tables, prior, rng):
    """Escobar-West update of the top-level concentration."""
    a, b = prior
    if num_tables == 0:
        return float(gamma.rvs(a, scale=1.0 / b, random_state=rng))

    eta = beta.rvs(a=value + 1.0, b=num_tables, random_state=rng)
    shape = a + num_dishes - 1.0
    rate = b - np.log(eta)
    x = shape / (num_tables * rate)
    shape += bernoulli.rvs(x / (1.0 + x), random_state=rng)
    new_value = gamma.rvs(shape, scale=1.0 / rate, random_state=rng)

    return max(float(new_value), 1e-10)  # Catch numerical error


def resample_alpha0(value, group_sizes, num_tables, prior, rng):
    """Auxiliary-variable update of the group-level concentration."""
    a, b = prior
    sizes = np.asarray([n for n in group_sizes if n > 0], dtype=float)
    if sizes.size == 0:
        return float(gamma.rvs(a, scale=1.0 / b, random_state=rng))

    w = beta.rvs(a=value + 1.0, b=sizes, random_state=rng)
    s = bernoulli.rvs(sizes / (sizes + value), random_state=rng)
    shape = a + num_tables - np.sum(s)
    rate = b - np.sum(np.log(w))
    new_value = gamma.rvs(shape, scale=1.0 / rate, random_state=rng)

    return max(float(new_value), 1e-10)


def resample_concentrations(state, rng):
    """Resample both concentrations given the current state's counts."""
    conc = state.conc
    return replace(
        conc,
        gamma=resample_gamma(
            conc.gamma, state.K, state.total_tables, conc.gamma_prior, rng
        ),
        alpha0=resample_alpha0(
            conc.alpha0,
            [len(x) for x in state.groups.groups],
            state.total_tables,
            conc.alpha0_prior,
            rng,
        ),
    )


def resolve_concentrations(conc, rng):
    """
    Fill unset concentrations from their priors.

    Values given explicitly are kept; missing ones come from
    ``draw_concentrations`` (prior means unless ``sample_initial`` is set).
    """
    if conc.resolved:
        return conc
    gamma_value, alpha0_value = draw_concentrations(
        conc, rng, sample=conc.sample_initial
    )
    return replace(
        conc,
        gamma=conc.gamma if conc.gamma is not None else gamma_value,
        alpha0=conc.alpha0 if conc.alpha0 is not None else alpha0_value,
    )
