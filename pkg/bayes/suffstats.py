"""
Sufficient statistics for Gaussian observations.

Statistics are immutable; every update returns a new instance so that the
sampler can hold them in dictionaries without aliasing surprises.
"""

from dataclasses import dataclass

import numpy as np

from osr_project.exceptions import DimensionMismatchError, InvalidInputError


def _as_point(x, d):
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise DimensionMismatchError(
            f"Expected a vector of length {d}, got shape {x.shape}."
        )
    return x


@dataclass(frozen=True, eq=False)
class GaussianSuffStats:
    """
    Count, sum and raw scatter (sum of outer products) of a set of points.
    """

    n: int
    sum: np.ndarray
    scatter: np.ndarray

    @classmethod
    def empty(cls, d):
        return cls(0, np.zeros(d), np.zeros((d, d)))

    @classmethod
    def from_points(cls, points, d=None):
        """Compute statistics from scratch for an (n, d) array of points."""
        points = np.asarray(points, dtype=float)
        if points.size == 0:
            if d is None:
                d = points.shape[-1] if points.ndim == 2 else 0
            return cls.empty(d)

        points = np.atleast_2d(points)
        if d is not None and points.shape[1] != d:
            raise DimensionMismatchError(
                f"Expected points of dimension {d}, got {points.shape[1]}."
            )
        return cls(len(points), points.sum(axis=0), points.T @ points)

    @property
    def d(self):
        return self.sum.shape[0]

    @property
    def mean(self):
        if self.n == 0:
            raise InvalidInputError("Mean of an empty set of points is undefined.")
        return self.sum / self.n

    def centered_scatter(self):
        """Scatter about the sample mean, i.e. sum of (x - mean)(x - mean)^T."""
        if self.n == 0:
            return np.zeros_like(self.scatter)
        centered = self.scatter - np.outer(self.sum, self.sum) / self.n
        return (centered + centered.T) / 2

    def merge(self, other):
        if other.d != self.d:
            raise DimensionMismatchError(
                f"Cannot merge statistics of dimension {self.d} and {other.d}."
            )
        return GaussianSuffStats(
            self.n + other.n, self.sum + other.sum, self.scatter + other.scatter
        )

    def subtract(self, other):
        """Remove a subset of points previously merged in."""
        if other.d != self.d:
            raise DimensionMismatchError(
                f"Cannot subtract statistics of dimension {other.d} from {self.d}."
            )
        if other.n > self.n:
            raise InvalidInputError(
                f"Cannot remove {other.n} points from a set of {self.n}."
            )
        if other.n == self.n:
            return GaussianSuffStats.empty(self.d)
        return GaussianSuffStats(
            self.n - other.n, self.sum - other.sum, self.scatter - other.scatter
        )

    def allclose(self, other, atol=1e-9):
        return (
            self.n == other.n
            and np.allclose(self.sum, other.sum, rtol=0, atol=atol)
            and np.allclose(self.scatter, other.scatter, rtol=0, atol=atol)
        )


def stats_add(stats, x):
    """Return the statistics with the point ``x`` added."""
    x = _as_point(x, stats.d)
    return GaussianSuffStats(
        stats.n + 1, stats.sum + x, stats.scatter + np.outer(x, x)
    )


def stats_remove(stats, x):
    """Return the statistics with the previously added point ``x`` removed."""
    if stats.n == 0:
        raise InvalidInputError("Cannot remove a point from empty statistics.")
    x = _as_point(x, stats.d)
    if stats.n == 1:
        return GaussianSuffStats.empty(stats.d)
    return GaussianSuffStats(
        stats.n - 1, stats.sum - x, stats.scatter - np.outer(x, x)
    )
