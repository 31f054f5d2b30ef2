"""
Grouping of training classes and the test batch, and the pooled prior built
from the training groups.

Every known class becomes one group (in increasing class-id order) and the
whole test batch becomes one more group appended last.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh

from bayes import NormalWishartParams
from osr_project.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    EmptyGroupError,
    InvalidInputError,
)

logger = logging.getLogger(__name__)

JITTER_SCALE = 1e-8


def _feature_matrix(features, what):
    features = np.asarray(features, dtype=float)
    if features.ndim != 2:
        raise DimensionMismatchError(
            f"{what} must be a 2-d (instances, features) array, got shape {features.shape}."
        )
    if not np.all(np.isfinite(features)):
        raise InvalidInputError(f"{what} contains non-finite values.")
    return features


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Instances with one integer class label each."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = _feature_matrix(self.features, "Features")
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise DimensionMismatchError(
                f"Got {features.shape[0]} instances but labels of shape {labels.shape}."
            )
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels.astype(np.int64))

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def classes(self):
        return np.unique(self.labels)

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.features[indices], self.labels[indices])

    def of_classes(self, class_ids):
        """Indices of the instances belonging to any of ``class_ids``."""
        return np.flatnonzero(np.isin(self.labels, list(class_ids)))


@dataclass(frozen=True, eq=False)
class GroupedDataset:
    """
    J groups of d-dimensional instances: J - 1 known classes then the test batch.

    ``origins[j]`` maps the rows of group j back to row indices of the
    training set (known groups) or of the test batch (last group).
    """

    groups: list
    labels: tuple
    d: int
    origins: list

    @property
    def J(self):
        return len(self.groups)

    @property
    def n_known(self):
        return len(self.labels)

    @property
    def test_index(self):
        return self.J - 1

    @property
    def known_groups(self):
        return self.groups[: self.n_known]

    @property
    def test_group(self):
        return self.groups[-1]


def build_groups(train, test_batch):
    """
    Group the training instances by class and append the test batch.

    ``test_batch`` may be empty; instance order inside every group follows
    the input order.
    """
    if train.n == 0 or len(train.classes) == 0:
        raise EmptyGroupError("Training data has no classes.")

    test_batch = np.asarray(test_batch, dtype=float)
    if test_batch.size == 0:
        test_batch = np.empty((0, train.d))
    test_batch = _feature_matrix(test_batch, "Test batch")
    if test_batch.shape[1] != train.d:
        raise DimensionMismatchError(
            f"Test batch has {test_batch.shape[1]} features, training data has {train.d}."
        )

    groups, origins, labels = [], [], []
    for label in train.classes:
        rows = np.flatnonzero(train.labels == label)
        if rows.size == 0:
            raise EmptyGroupError(f"Class {label} has no instances.")
        groups.append(train.features[rows])
        origins.append(rows)
        labels.append(int(label))

    groups.append(test_batch)
    origins.append(np.arange(test_batch.shape[0]))

    return GroupedDataset(groups=groups, labels=tuple(labels), d=train.d, origins=origins)


def pooled_covariance(known_groups):
    """Within-class covariance pooled over the groups, with N - C degrees of freedom."""
    total = sum(len(x) for x in known_groups)
    if total <= len(known_groups):
        raise InvalidInputError(
            f"Pooled covariance needs more instances ({total}) than classes "
            f"({len(known_groups)})."
        )
    d = known_groups[0].shape[1]
    scatter = np.zeros((d, d))
    for x in known_groups:
        centered = x - x.mean(axis=0)
        scatter += centered.T @ centered
    return scatter / (total - len(known_groups))


def pooled_prior(groups, varsigma, nu=None, beta=1.0):
    """
    Normal-Wishart prior from the known-class groups.

    mu0 is the mean of all training instances and sigma0 is ``varsigma``
    times the pooled within-class covariance. ``nu`` defaults to d.
    """
    d = groups.d
    nu = float(d) if nu is None else float(nu)
    if nu < d:
        raise ConfigurationError(
            f"nu must be at least the feature dimension {d}, got {nu}.",
            details={"nu": nu, "d": d},
        )

    known = groups.known_groups
    pooled = pooled_covariance(known)
    mu0 = np.vstack(known).mean(axis=0)

    eigenvalues = eigvalsh(pooled)
    mean_diag = float(np.mean(np.diag(pooled)))
    if eigenvalues[0] <= JITTER_SCALE * max(mean_diag, 0.0):
        jitter = JITTER_SCALE * (mean_diag if mean_diag > 0 else 1.0)
        logger.warning(
            f"Pooled covariance is singular (smallest eigenvalue {eigenvalues[0]:.3g}); "
            f"adding {jitter:.3g} to the diagonal."
        )
        pooled = pooled + jitter * np.eye(d)

    return NormalWishartParams(mu0=mu0, beta=beta, sigma0=varsigma * pooled, nu=nu)
