"""
Tests for the conjugate Normal-Wishart machinery.

Covers sufficient statistics, posterior updates and predictive densities.
"""

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import gamma, norm, wishart

from bayes import (
    GaussianSuffStats,
    NormalWishartParams,
    log_marginal_set,
    log_predictive,
    posterior_params,
    predictive_t,
    stats_add,
    stats_remove,
)
from osr_project.exceptions import DimensionMismatchError, InvalidInputError


def _random_prior_1d(rng):
    return NormalWishartParams(
        mu0=[rng.normal(0, 2)],
        beta=rng.uniform(0.2, 3.0),
        sigma0=[[rng.uniform(0.2, 3.0)]],
        nu=rng.uniform(1.0, 6.0),
    )


def _quadrature_predictive(x, prior, context):
    """Predictive density at x by integrating the posterior over the precision."""
    post = posterior_params(prior, context)
    mean, beta, nu, s = post.mu0[0], post.beta, post.nu, post.sigma0[0, 0]

    def integrand(lam):
        # Mean integrated out analytically: x | lam ~ N(mean, (1 + 1/beta) / lam).
        var = (1.0 + 1.0 / beta) / lam
        return norm.pdf(x, mean, np.sqrt(var)) * gamma.pdf(
            lam, a=nu / 2.0, scale=2.0 / s
        )

    value, _ = integrate.quad(integrand, 0, np.inf, limit=200)
    return value


class TestSuffStats:
    """Test incremental sufficient statistics."""

    def test_single_point(self):
        """Test adding one point to empty statistics."""
        stats = stats_add(GaussianSuffStats.empty(2), np.array([1.0, 2.0]))

        assert stats.n == 1
        np.testing.assert_array_equal(stats.sum, [1.0, 2.0])
        np.testing.assert_array_equal(stats.scatter, [[1.0, 2.0], [2.0, 4.0]])

    def test_two_points_hand_arithmetic(self):
        """Test adding (1,0) then (3,0)."""
        stats = GaussianSuffStats.empty(2)
        stats = stats_add(stats, [1.0, 0.0])
        stats = stats_add(stats, [3.0, 0.0])

        assert stats.n == 2
        np.testing.assert_array_equal(stats.sum, [4.0, 0.0])
        np.testing.assert_array_equal(stats.scatter, [[10.0, 0.0], [0.0, 0.0]])

    def test_add_then_remove_restores(self, rng):
        """Test that removing an added point restores the statistics."""
        base = GaussianSuffStats.from_points(rng.normal(size=(5, 3)))
        x = rng.normal(size=3)

        restored = stats_remove(stats_add(base, x), x)

        assert restored.n == base.n
        np.testing.assert_allclose(restored.sum, base.sum, atol=1e-12)
        np.testing.assert_allclose(restored.scatter, base.scatter, atol=1e-12)

    def test_remove_last_point_gives_empty(self):
        """Test removing the only point."""
        stats = stats_remove(stats_add(GaussianSuffStats.empty(2), [1.0, 1.0]), [1.0, 1.0])

        assert stats.n == 0
        assert not stats.sum.any()
        assert not stats.scatter.any()

    def test_order_of_updates_irrelevant(self):
        """Test that (add a, add b, remove a) equals (add b)."""
        a, b = np.array([1.0, -2.0]), np.array([0.5, 4.0])
        empty = GaussianSuffStats.empty(2)

        left = stats_remove(stats_add(stats_add(empty, a), b), a)
        right = stats_add(empty, b)

        assert left.allclose(right, atol=1e-12)

    def test_random_interleavings_match_recomputation(self, rng):
        """Test 1000 random adds and removes against from-scratch statistics."""
        points = rng.normal(5.0, 3.0, size=(200, 3))
        members = []
        stats = GaussianSuffStats.empty(3)

        for _ in range(1000):
            if members and rng.random() < 0.45:
                i = members.pop(int(rng.integers(len(members))))
                stats = stats_remove(stats, points[i])
            else:
                i = int(rng.integers(len(points)))
                members.append(i)
                stats = stats_add(stats, points[i])

        fresh = GaussianSuffStats.from_points(points[members], d=3)
        assert stats.allclose(fresh, atol=1e-9)

    def test_dimension_mismatch_rejected(self):
        """Test adding a point of the wrong length."""
        with pytest.raises(DimensionMismatchError):
            stats_add(GaussianSuffStats.empty(2), [1.0, 2.0, 3.0])

    def test_remove_from_empty_rejected(self):
        """Test removing from empty statistics."""
        with pytest.raises(InvalidInputError):
            stats_remove(GaussianSuffStats.empty(2), [1.0, 2.0])


class TestNormalWishartParams:
    """Test hyperparameter validation."""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"beta": 0.0},
            {"nu": 0.5},
            {"sigma0": [[1.0, 0.5], [0.0, 1.0]]},
            {"sigma0": [[1.0, 2.0], [2.0, 1.0]]},
        ],
    )
    def test_invalid_hyperparameters_rejected(self, kwargs):
        """Test non-positive beta, too few degrees of freedom and bad scale matrices."""
        params = {"mu0": [0.0, 0.0], "beta": 1.0, "sigma0": np.eye(2), "nu": 2.0}
        params.update(kwargs)

        with pytest.raises(InvalidInputError):
            NormalWishartParams(**params)

    def test_shape_mismatch_rejected(self):
        """Test mu0 and sigma0 of different dimensions."""
        with pytest.raises(DimensionMismatchError):
            NormalWishartParams(mu0=[0.0, 0.0], beta=1.0, sigma0=np.eye(3), nu=3.0)


class TestPosteriorParams:
    """Test the conjugate update."""

    def test_empty_stats_return_prior(self, prior_2d):
        """Test that no data leaves the prior unchanged."""
        assert posterior_params(prior_2d, GaussianSuffStats.empty(2)) is prior_2d

    def test_single_observation_1d(self):
        """Test the update for one observation x=2."""
        prior = NormalWishartParams(mu0=[0.0], beta=1.0, sigma0=[[1.0]], nu=1.0)

        post = posterior_params(prior, GaussianSuffStats.from_points([[2.0]]))

        assert post.mu0[0] == pytest.approx(1.0)
        assert post.beta == pytest.approx(2.0)
        assert post.nu == pytest.approx(2.0)
        # sigma0 + (beta n / (beta + n)) (x - mu0)^2 = 1 + 0.5 * 4
        assert post.sigma0[0, 0] == pytest.approx(3.0)

    def test_symmetric_observations_keep_mean(self, prior_2d):
        """Test that points mirrored around mu0 leave the mean at mu0."""
        c = np.array([1.5, -0.5])
        post = posterior_params(prior_2d, GaussianSuffStats.from_points([c, -c]))

        np.testing.assert_allclose(post.mu0, prior_2d.mu0, atol=1e-12)

    def test_sequential_update_matches_joint(self, prior_2d, rng):
        """Test that updating on A then B predicts like updating on A and B."""
        a, b = rng.normal(size=(4, 2)), rng.normal(size=(6, 2))
        x = rng.normal(size=2)

        joint = posterior_params(prior_2d, GaussianSuffStats.from_points(np.vstack([a, b])))
        staged = posterior_params(
            posterior_params(prior_2d, GaussianSuffStats.from_points(a)),
            GaussianSuffStats.from_points(b),
        )

        assert log_predictive(x, joint) == pytest.approx(log_predictive(x, staged), abs=1e-9)


class TestLogPredictive:
    """Test the posterior-predictive density."""

    def test_symmetric_around_mean(self, prior_1d):
        """Test symmetry of the prior predictive around mu0."""
        for delta in (0.1, 1.0, 7.5):
            assert log_predictive([delta], prior_1d) == pytest.approx(
                log_predictive([-delta], prior_1d), abs=1e-12
            )

    def test_integrates_to_one(self, prior_1d):
        """Test that the prior predictive integrates to one on [-50, 50]."""
        grid = np.linspace(-50, 50, 20_001)
        predictive = predictive_t(prior_1d)
        density = np.exp([predictive.logpdf(np.array([x])) for x in grid])

        assert integrate.trapezoid(density, grid) == pytest.approx(1.0, abs=1e-4)

    def test_matches_quadrature_oracle(self):
        """Test pointwise agreement with integration over the posterior for random priors."""
        rng = np.random.default_rng(2024)
        for _ in range(10):
            prior = _random_prior_1d(rng)
            points = rng.normal(0, 2, size=(rng.integers(0, 6), 1))
            context = GaussianSuffStats.from_points(points, d=1)
            for x in rng.normal(0, 3, size=5):
                expected = _quadrature_predictive(x, prior, context)
                assert np.exp(log_predictive([x], prior, context)) == pytest.approx(
                    expected, abs=1e-3
                )

    def test_random_priors_normalized(self):
        """Test normalization for random priors and contexts."""
        rng = np.random.default_rng(99)
        grid = np.linspace(-200, 200, 40_001)
        for _ in range(10):
            prior = _random_prior_1d(rng)
            context = GaussianSuffStats.from_points(rng.normal(0, 1, size=(3, 1)))
            predictive = predictive_t(prior, context)
            density = np.exp([predictive.logpdf(np.array([x])) for x in grid])

            assert integrate.trapezoid(density, grid) == pytest.approx(1.0, abs=1e-4)

    def test_non_finite_input_rejected(self, prior_2d):
        """Test NaN and infinite coordinates."""
        with pytest.raises(InvalidInputError):
            log_predictive([np.nan, 0.0], prior_2d)
        with pytest.raises(InvalidInputError):
            log_predictive([np.inf, 0.0], prior_2d)

    def test_wrong_dimension_rejected(self, prior_2d):
        """Test a point of the wrong dimension."""
        with pytest.raises(DimensionMismatchError):
            log_predictive([0.0, 0.0, 0.0], prior_2d)

    def test_ill_conditioned_prior_stays_finite(self):
        """Test finiteness at d=64 with condition number 1e8."""
        d = 64
        rng = np.random.default_rng(5)
        q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        sigma0 = q @ np.diag(np.logspace(-4, 4, d)) @ q.T
        sigma0 = (sigma0 + sigma0.T) / 2
        prior = NormalWishartParams(mu0=np.zeros(d), beta=1.0, sigma0=sigma0, nu=d)
        context = GaussianSuffStats.from_points(rng.normal(size=(10, d)))

        value = log_predictive(rng.normal(size=d) * 100, prior, context)

        assert np.isfinite(value)

    def test_duplicated_points_context(self, prior_2d):
        """Test a context of identical points (zero scatter)."""
        context = GaussianSuffStats.from_points(np.ones((20, 2)))

        assert np.isfinite(log_predictive([1.0, 1.0], prior_2d, context))

    @pytest.mark.slow
    def test_matches_monte_carlo_2d(self, prior_2d):
        """Test the d=2 predictive against 10^6 Monte-Carlo posterior draws."""
        rng = np.random.default_rng(11)
        context = GaussianSuffStats.from_points(rng.normal(1.0, 1.0, size=(5, 2)))
        post = posterior_params(prior_2d, context)
        x = np.array([0.7, 1.4])
        n = 1_000_000

        precisions = wishart.rvs(
            df=post.nu, scale=np.linalg.inv(post.sigma0), size=n, random_state=rng
        )
        mean_chol = np.linalg.cholesky(np.linalg.inv(post.beta * precisions))
        means = post.mu0 + np.einsum("nij,nj->ni", mean_chol, rng.normal(size=(n, 2)))
        diff = x - means
        maha = np.einsum("ni,nij,nj->n", diff, precisions, diff)
        densities = np.sqrt(np.linalg.det(precisions)) / (2 * np.pi) * np.exp(-0.5 * maha)

        estimate = densities.mean()
        stderr = densities.std() / np.sqrt(n)
        assert abs(np.exp(log_predictive(x, prior_2d, context)) - estimate) < 3 * stderr


class TestLogMarginalSet:
    """Test joint predictive densities of point sets."""

    def test_empty_set_is_zero(self, prior_2d):
        """Test the empty set."""
        assert log_marginal_set(np.empty((0, 2)), prior_2d) == 0.0

    def test_singleton_matches_predictive(self, prior_2d, rng):
        """Test that a single point gives the predictive density."""
        x = rng.normal(size=2)
        context = GaussianSuffStats.from_points(rng.normal(size=(3, 2)))

        assert log_marginal_set([x], prior_2d, context) == pytest.approx(
            log_predictive(x, prior_2d, context), abs=1e-9
        )

    def test_chain_rule(self, prior_2d, rng):
        """Test p(x1, x2) = p(x1) p(x2 | x1)."""
        x1, x2 = rng.normal(size=2), rng.normal(size=2)
        context = GaussianSuffStats.from_points(rng.normal(size=(4, 2)))

        expected = log_predictive(x1, prior_2d, context) + log_predictive(
            x2, prior_2d, stats_add(context, x1)
        )

        assert log_marginal_set([x1, x2], prior_2d, context) == pytest.approx(expected, abs=1e-9)

    def test_exchangeable(self, prior_2d, rng):
        """Test invariance under permutations of the points."""
        points = rng.normal(size=(8, 2))
        reference = log_marginal_set(points, prior_2d)

        for _ in range(5):
            shuffled = points[rng.permutation(len(points))]
            assert log_marginal_set(shuffled, prior_2d) == pytest.approx(reference, abs=1e-9)
