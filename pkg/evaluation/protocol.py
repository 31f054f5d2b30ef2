"""
Randomized train/test and fitting/validation partitioning.

Known classes are split 60/40 into training and testing instances; every
instance of the remaining classes is a candidate unknown test instance.
Within the training set about half of the classes act as "known" during
parameter fitting and the rest as "unknown", giving a closed-set and an
open-set simulation on the validation instances.
"""

import math
from dataclasses import dataclass

import numpy as np

from osr_project.exceptions import ConfigurationError, EmptyGroupError

MIN_CLASS_SIZE = 5
TRAIN_FRACTION = 0.6


def split_count(n, fraction=TRAIN_FRACTION):
    """Number of instances in the larger part, rounded half up."""
    return math.floor(fraction * n + 0.5)


def fitting_class_count(omega):
    return math.floor(omega / 2 + 0.5)


@dataclass(frozen=True, eq=False)
class SplitPlan:
    """Index sets of one randomized partition; all indices refer to the dataset rows."""

    seed: int
    known_classes: tuple
    unknown_classes: tuple
    train: np.ndarray
    test_known: np.ndarray
    test: np.ndarray
    fit_known_classes: tuple
    fit_unknown_classes: tuple
    fitting: np.ndarray
    validation: np.ndarray
    closed_sim: np.ndarray
    open_sim: np.ndarray

    @property
    def omega(self):
        return len(self.known_classes)

    def test_with_unknown(self, dataset, n_unknown):
        """Known test instances plus every instance of the first ``n_unknown`` unknown classes."""
        if not 0 <= n_unknown <= len(self.unknown_classes):
            raise ConfigurationError(
                f"Cannot add {n_unknown} unknown classes; only "
                f"{len(self.unknown_classes)} are available.",
                details={"unknown_counts": n_unknown},
            )
        extra = dataset.of_classes(self.unknown_classes[:n_unknown])
        return np.sort(np.concatenate([self.test_known, extra]))


def _split_classes(labels, indices, classes, rng):
    """Per-class 60/40 split of ``indices`` (rows of ``labels``)."""
    first, second = [], []
    for c in classes:
        rows = rng.permutation(indices[labels[indices] == c])
        cut = split_count(len(rows))
        first.append(rows[:cut])
        second.append(rows[cut:])
    return np.sort(np.concatenate(first)), np.sort(np.concatenate(second))


def split_protocol(dataset, omega, seed):
    """Randomized partition of ``dataset`` with ``omega`` known classes."""
    classes = dataset.classes
    if omega < 1 or len(classes) <= omega:
        raise ConfigurationError(
            f"Need more than omega={omega} classes, the dataset has {len(classes)}.",
            details={"omega": omega},
        )

    rng = np.random.default_rng(seed)
    known = np.sort(rng.choice(classes, size=omega, replace=False))
    unknown = rng.permutation(np.setdiff1d(classes, known))

    sizes = {int(c): int(np.sum(dataset.labels == c)) for c in known}
    small = {c: n for c, n in sizes.items() if n < MIN_CLASS_SIZE}
    if small:
        raise EmptyGroupError(
            f"Classes {small} have fewer than {MIN_CLASS_SIZE} instances; "
            "they cannot be split into fitting, validation and test parts."
        )

    all_rows = np.arange(dataset.n)
    train, test_known = _split_classes(dataset.labels, all_rows, known, rng)
    test = np.sort(np.concatenate([test_known, dataset.of_classes(unknown)]))

    fit_known = np.sort(rng.choice(known, size=fitting_class_count(omega), replace=False))
    fit_unknown = np.setdiff1d(known, fit_known)
    fitting, closed_sim = _split_classes(dataset.labels, train, fit_known, rng)
    unknown_train = train[np.isin(dataset.labels[train], fit_unknown)]
    open_sim = np.sort(np.concatenate([closed_sim, unknown_train]))

    return SplitPlan(
        seed=seed,
        known_classes=tuple(int(c) for c in known),
        unknown_classes=tuple(int(c) for c in unknown),
        train=train,
        test_known=test_known,
        test=test,
        fit_known_classes=tuple(int(c) for c in fit_known),
        fit_unknown_classes=tuple(int(c) for c in fit_unknown),
        fitting=fitting,
        validation=open_sim,
        closed_sim=closed_sim,
        open_sim=open_sim,
    )
