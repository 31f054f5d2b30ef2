"""
Dataset loading, subsampling and synthetic open-set data.

Two on-disk formats are read: delimited dense text with the integer class
label in the first column, and sparse ``label index:value ...`` rows.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.datasets import load_svmlight_file, make_blobs
from sklearn.model_selection import train_test_split

from osr_project.exceptions import DatasetError, InvalidInputError
from recognition import LabeledDataset

logger = logging.getLogger(__name__)

FORMATS = ("auto", "dense", "sparse")
SYNTHETIC_PREFIX = "synthetic:"


def _first_data_line(path):
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line and not line.startswith("#"):
                return line
    raise DatasetError(f"Dataset {path} has no data rows.")


def detect_format(path):
    return "sparse" if ":" in _first_data_line(path) else "dense"


def _integer_labels(values, path):
    labels = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(labels)) or not np.all(labels == np.round(labels)):
        raise DatasetError(f"Dataset {path} has non-integer class labels.")
    return labels.astype(np.int64)


def _load_dense(path):
    frame = pd.read_csv(path, sep=None, engine="python", header=None, comment="#")
    frame = frame.apply(pd.to_numeric, errors="coerce")

    # A non-numeric first row is a header.
    if len(frame) > 1 and frame.iloc[0].isna().any() and not frame.iloc[1:].isna().any().any():
        frame = frame.iloc[1:]
    if frame.shape[1] < 2:
        raise DatasetError(f"Dataset {path} needs a label column and at least one feature.")
    if frame.isna().any().any():
        raise DatasetError(f"Dataset {path} contains non-numeric or missing values.")

    values = frame.to_numpy(dtype=float)
    return values[:, 1:], _integer_labels(values[:, 0], path)


def _load_sparse(path):
    features, labels = load_svmlight_file(str(path), zero_based="auto")
    return features.toarray(), _integer_labels(labels, path)


def load_dataset(path, fmt="auto"):
    """
    Read a labeled dataset from ``path``.

    ``fmt`` is ``dense``, ``sparse`` or ``auto`` (sparse when the first data
    line contains ``:``).
    """
    if fmt not in FORMATS:
        raise DatasetError(f"Unknown dataset format {fmt!r}; expected one of {FORMATS}.")
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"Dataset file {path} does not exist.")

    try:
        if fmt == "auto":
            fmt = detect_format(path)
        features, labels = _load_sparse(path) if fmt == "sparse" else _load_dense(path)
        dataset = LabeledDataset(features, labels)
    except DatasetError:
        raise
    except (OSError, UnicodeDecodeError, ValueError, pd.errors.ParserError) as exc:
        raise DatasetError(f"Could not read dataset {path}: {exc}") from exc

    logger.info(
        f"Loaded {dataset.n} instances with {dataset.d} features and "
        f"{len(dataset.classes)} classes from {path} ({fmt})."
    )
    return dataset


def make_open_set_blobs(n_classes, n_per_class=100, d=2, separation=8.0, sigma=1.0, seed=0):
    """
    Spherical Gaussian classes with means on a ring.

    Adjacent class means lie ``separation`` standard deviations apart; labels
    are 0 .. n_classes - 1.
    """
    if n_classes < 1 or n_per_class < 1 or d < 2:
        raise InvalidInputError(
            "Synthetic data needs at least one class, one instance per class and d >= 2."
        )
    angles = 2 * np.pi * np.arange(n_classes) / n_classes
    radius = 0.0 if n_classes == 1 else separation * sigma / (2 * np.sin(np.pi / n_classes))
    centers = np.zeros((n_classes, d))
    centers[:, 0] = radius * np.cos(angles)
    centers[:, 1] = radius * np.sin(angles)

    features, labels = make_blobs(
        n_samples=[n_per_class] * n_classes,
        centers=centers,
        cluster_std=sigma,
        random_state=seed,
    )
    return LabeledDataset(features, labels)


def open_dataset(source, fmt="auto", seed=0):
    """A dataset file path, or ``synthetic:<classes>`` for ring-shaped blobs."""
    source = str(source)
    if source.startswith(SYNTHETIC_PREFIX):
        try:
            n_classes = int(source[len(SYNTHETIC_PREFIX):])
        except ValueError as exc:
            raise DatasetError(f"Malformed synthetic dataset name {source!r}.") from exc
        return make_open_set_blobs(n_classes, seed=seed)
    return load_dataset(source, fmt)


def subsample(dataset, size, seed=0):
    """Stratified subsample of ``size`` instances (the dataset itself if not larger)."""
    if size is None or size >= dataset.n:
        return dataset
    try:
        indices, _ = train_test_split(
            np.arange(dataset.n),
            train_size=size,
            stratify=dataset.labels,
            random_state=seed,
        )
    except ValueError as exc:
        raise InvalidInputError(f"Cannot subsample {size} instances: {exc}") from exc
    return dataset.subset(np.sort(indices))
