"""
Normal-Wishart prior over Gaussian component parameters.

Parameterisation: the component precision has a Wishart prior with ``nu``
degrees of freedom and inverse scale ``sigma0`` (equivalently the component
covariance is inverse-Wishart(nu, sigma0)), and the component mean given the
precision is Normal(mu0, (beta * precision)^-1).

All densities are evaluated in log space from Cholesky factors; no explicit
determinant or matrix inverse is ever formed.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular
from scipy.special import gammaln, multigammaln

from osr_project.exceptions import DimensionMismatchError, InvalidInputError

from .suffstats import GaussianSuffStats

LOG_PI = np.log(np.pi)


def _lower_cholesky(matrix, what):
    try:
        return cholesky(matrix, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise InvalidInputError(f"{what} is not positive definite.") from exc


@dataclass(frozen=True, eq=False)
class NormalWishartParams:
    """
    Hyperparameters (mu0, beta, sigma0, nu) of a Normal-Wishart distribution.

    The lower Cholesky factor of ``sigma0`` is computed once on construction;
    it doubles as the positive-definiteness check.
    """

    mu0: np.ndarray
    beta: float
    sigma0: np.ndarray
    nu: float
    chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mu0 = np.atleast_1d(np.asarray(self.mu0, dtype=float))
        sigma0 = np.atleast_2d(np.asarray(self.sigma0, dtype=float))
        d = mu0.shape[0]

        if mu0.ndim != 1 or sigma0.shape != (d, d):
            raise DimensionMismatchError(
                f"mu0 has shape {mu0.shape} but sigma0 has shape {sigma0.shape}."
            )
        if not self.beta > 0:
            raise InvalidInputError(f"beta must be positive, got {self.beta}.")
        if not self.nu > d - 1:
            raise InvalidInputError(
                f"nu must exceed d - 1 = {d - 1} for a proper Wishart, got {self.nu}."
            )
        if not np.allclose(sigma0, sigma0.T, rtol=1e-10, atol=1e-12):
            raise InvalidInputError("sigma0 must be symmetric.")

        object.__setattr__(self, "mu0", mu0)
        object.__setattr__(self, "sigma0", sigma0)
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "chol", _lower_cholesky(sigma0, "sigma0"))

    @property
    def d(self):
        return self.mu0.shape[0]

    @property
    def log_det_sigma0(self):
        return 2.0 * np.sum(np.log(np.diag(self.chol)))

    def as_dict(self):
        return {
            "mu0": self.mu0.tolist(),
            "beta": self.beta,
            "sigma0": self.sigma0.tolist(),
            "nu": self.nu,
        }


@dataclass(frozen=True, eq=False)
class StudentT:
    """
    Multivariate Student-t given by location, lower Cholesky factor of its
    shape matrix and degrees of freedom.
    """

    loc: np.ndarray
    chol: np.ndarray
    df: float
    log_norm: float = field(init=False)

    def __post_init__(self):
        d = self.loc.shape[0]
        log_norm = (
            gammaln((self.df + d) / 2.0)
            - gammaln(self.df / 2.0)
            - 0.5 * d * (np.log(self.df) + LOG_PI)
            - np.sum(np.log(np.diag(self.chol)))
        )
        object.__setattr__(self, "log_norm", float(log_norm))

    @property
    def d(self):
        return self.loc.shape[0]

    def logpdf(self, x):
        z = solve_triangular(self.chol, x - self.loc, lower=True, check_finite=False)
        maha = float(z @ z)
        return self.log_norm - 0.5 * (self.df + self.d) * np.log1p(maha / self.df)


def _check_stats(prior, stats):
    if stats.d != prior.d:
        raise DimensionMismatchError(
            f"Statistics of dimension {stats.d} do not match prior dimension {prior.d}."
        )


def posterior_params(prior, stats):
    """
    Conjugate update of ``prior`` given the points summarized by ``stats``.

    Uses the centered scatter so the update is stable for data far from the
    origin.
    """
    _check_stats(prior, stats)
    if stats.n == 0:
        return prior

    n = stats.n
    beta_n = prior.beta + n
    xbar = stats.sum / n
    diff = xbar - prior.mu0
    sigma_n = (
        prior.sigma0
        + stats.centered_scatter()
        + (prior.beta * n / beta_n) * np.outer(diff, diff)
    )
    sigma_n = (sigma_n + sigma_n.T) / 2
    mu_n = (prior.beta * prior.mu0 + stats.sum) / beta_n

    return NormalWishartParams(
        mu0=mu_n, beta=beta_n, sigma0=sigma_n, nu=prior.nu + n
    )


def predictive_t(prior, context=None):
    """
    Posterior-predictive Student-t of a new point given ``context``.

    With empty or missing context this is the prior predictive.
    """
    if context is None:
        context = GaussianSuffStats.empty(prior.d)
    post = posterior_params(prior, context)
    df = post.nu - post.d + 1.0
    scale = np.sqrt((post.beta + 1.0) / (post.beta * df))
    return StudentT(loc=post.mu0, chol=post.chol * scale, df=df)


def log_partition(params):
    """
    Log normalizer of the Normal-Wishart, up to terms that cancel between a
    prior and its posterior.
    """
    return (
        multigammaln(params.nu / 2.0, params.d)
        - 0.5 * params.nu * params.log_det_sigma0
        - 0.5 * params.d * np.log(params.beta)
    )


def _finite_point(x, d):
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise DimensionMismatchError(
            f"Expected a vector of length {d}, got shape {x.shape}."
        )
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("Input coordinates must be finite.")
    return x


def log_predictive(x, prior, context=None):
    """Log posterior-predictive density of ``x`` given the ``context`` points."""
    x = _finite_point(x, prior.d)
    return predictive_t(prior, context).logpdf(x)


def log_marginal_set(points, prior, context=None):
    """
    Log joint predictive density of a set of points given ``context``.

    Computed as a ratio of Normal-Wishart normalizers, so it is exactly
    exchangeable in the points. The empty set has log density 0.
    """
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return 0.0
    points = np.atleast_2d(points)
    if points.shape[1] != prior.d:
        raise DimensionMismatchError(
            f"Expected points of dimension {prior.d}, got {points.shape[1]}."
        )
    if not np.all(np.isfinite(points)):
        raise InvalidInputError("Input coordinates must be finite.")

    if context is None:
        context = GaussianSuffStats.empty(prior.d)
    base = posterior_params(prior, context)
    updated = posterior_params(base, GaussianSuffStats.from_points(points))
    m = points.shape[0]
    return float(
        log_partition(updated) - log_partition(base) - 0.5 * m * prior.d * LOG_PI
    )
