"""
Pytest configuration and fixtures for the open set recognition toolkit.
"""

import numpy as np
import pytest

from bayes import NormalWishartParams
from evaluation import make_open_set_blobs
from hdp import HDPConcentrations
from recognition import HyperConfig, LabeledDataset


class Groups:
    """Minimal grouped data for driving the sampler directly."""

    def __init__(self, *groups):
        self.groups = [np.asarray(g, dtype=float) for g in groups]
        self.d = self.groups[0].shape[1]


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def prior_1d():
    """One-dimensional prior with a proper Student-t predictive."""
    return NormalWishartParams(mu0=[0.0], beta=1.0, sigma0=[[1.0]], nu=3.0)


@pytest.fixture
def prior_2d():
    """Two-dimensional prior centered at the origin."""
    return NormalWishartParams(mu0=np.zeros(2), beta=1.0, sigma0=np.eye(2), nu=3.0)


@pytest.fixture
def conc():
    """Concentrations fixed at the prior means."""
    return HDPConcentrations(gamma=100.0, alpha0=10.0)


@pytest.fixture
def small_groups(rng):
    """Two known groups and a test group of 2-d points."""
    return Groups(
        rng.normal(0, 1, size=(12, 2)),
        rng.normal(6, 1, size=(9, 2)),
        rng.normal(3, 2, size=(7, 2)),
    )


@pytest.fixture
def blobs():
    """Five well-separated 2-d classes of 100 instances."""
    return make_open_set_blobs(5, n_per_class=100, separation=8.0, seed=7)


@pytest.fixture
def open_set_split(blobs):
    """Classes 0-2 known (60 training instances each), classes 3-4 unknown."""
    known = blobs.of_classes([0, 1, 2])
    rng = np.random.default_rng(3)
    train_rows, test_rows = [], []
    for c in (0, 1, 2):
        rows = rng.permutation(np.flatnonzero(blobs.labels == c))
        train_rows.extend(rows[:60])
        test_rows.extend(rows[60:])
    test_rows.extend(np.setdiff1d(np.arange(blobs.n), known))
    train = blobs.subset(np.sort(train_rows))
    test = blobs.subset(np.sort(test_rows))
    return train, test


@pytest.fixture
def fast_config():
    """Short chains for quick end-to-end tests."""
    return HyperConfig(T=10, init_components=5, seed=1)


@pytest.fixture
def tiny_train():
    """Two one-dimensional classes."""
    return LabeledDataset(np.array([[0.0], [2.0], [10.0], [12.0]]), np.array([0, 0, 1, 1]))


@pytest.fixture
def dataset_file(tmp_path, blobs):
    """The five-class blobs written as a comma-separated file with the label first."""
    path = tmp_path / "blobs.csv"
    rows = np.column_stack([blobs.labels, blobs.features])
    np.savetxt(path, rows, delimiter=",", fmt=["%d", "%.8f", "%.8f"])
    return path


@pytest.fixture
def make_groups():
    """Factory building sampler groups from arrays."""
    return Groups
