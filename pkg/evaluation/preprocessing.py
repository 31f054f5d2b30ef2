"""
Feature scaling and PCA projection fitted on training rows only.
"""

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.decomposition import PCA
from sklearn.preprocessing import StandardScaler

from osr_project.exceptions import InvalidInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Projection:
    """Centered linear projection onto the leading ``k`` principal axes."""

    mean: np.ndarray
    components: np.ndarray
    retained: float

    @property
    def k(self):
        return self.components.shape[0]

    def transform(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.size == 0:
            return np.empty((0, self.k))
        return (matrix - self.mean) @ self.components.T


def standardize(train, *others):
    """Scale every matrix with the training mean and standard deviation."""
    scaler = StandardScaler().fit(train)
    scaled = [scaler.transform(train)]
    for matrix in others:
        matrix = np.asarray(matrix, dtype=float)
        scaled.append(scaler.transform(matrix) if matrix.size else matrix.reshape(0, train.shape[1]))
    return scaled


def pca_fit_transform(train, apply=(), retain=0.95):
    """
    Fit PCA on ``train`` and project it and every matrix in ``apply``.

    Keeps the smallest number of components whose cumulative explained
    variance reaches ``retain``. Returns ``(projected train, [projected
    apply...], Projection)``.
    """
    train = np.asarray(train, dtype=float)
    if not 0 < retain <= 1:
        raise InvalidInputError(f"retain must lie in (0, 1], got {retain}.")
    if train.ndim != 2 or train.shape[0] == 0:
        raise InvalidInputError("PCA needs a non-empty training matrix.")

    pca = PCA(svd_solver="full").fit(train)
    total = float(np.sum(pca.explained_variance_))
    if total <= 0:
        logger.warning("Training data has zero variance; keeping a single component.")
        k, retained = 1, 1.0
    else:
        cumulative = np.cumsum(pca.explained_variance_) / total
        # A fraction equal to retain up to rounding counts as reaching it.
        k = int(np.searchsorted(cumulative, retain - 1e-12) + 1)
        k = min(k, len(cumulative))
        retained = float(cumulative[k - 1])

    projection = Projection(mean=pca.mean_, components=pca.components_[:k], retained=retained)
    logger.info(f"PCA keeps {k} of {train.shape[1]} dimensions ({retained:.2%} of the variance).")
    return (
        projection.transform(train),
        [projection.transform(matrix) for matrix in apply],
        projection,
    )


def prepare_features(train, others, scale=True, retain=None):
    """Optional standardization followed by optional PCA, both fitted on ``train``."""
    others = list(others)
    if scale:
        train, *others = standardize(train, *others)
    if retain is not None:
        train, others, _ = pca_fit_transform(train, others, retain)
    return train, others
