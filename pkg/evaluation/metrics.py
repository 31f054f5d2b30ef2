"""
Openness and the micro-averaged F-measure over known classes.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.metrics import precision_recall_fscore_support

from osr_project.exceptions import ConfigurationError, InvalidInputError


def openness(n_training, n_target, n_testing):
    """1 - sqrt(2 * training / (testing + target)); 0 for a closed set."""
    if min(n_training, n_target, n_testing) < 1:
        raise ConfigurationError("Class counts for openness must be at least 1.")
    ratio = 2 * n_training / (n_testing + n_target)
    if ratio > 1:
        raise ConfigurationError(
            f"Malformed openness setting: training={n_training}, target={n_target}, "
            f"testing={n_testing}."
        )
    return 1 - math.sqrt(ratio)


@dataclass(frozen=True)
class Score:
    precision: float
    recall: float
    f: float


def micro_f(y_true, y_pred, known_classes):
    """
    Precision, recall and F pooled over the known classes.

    A known instance predicted unknown is a false negative of its class and
    an unknown instance predicted as class c is a false positive of c.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.size == 0 or y_true.shape != y_pred.shape:
        raise InvalidInputError(
            f"Need aligned, non-empty labels; got {y_true.shape} and {y_pred.shape}."
        )
    precision, recall, f, _ = precision_recall_fscore_support(
        y_true,
        y_pred,
        labels=sorted(known_classes),
        average="micro",
        zero_division=0,
    )
    return Score(float(precision), float(recall), float(f))


@dataclass(frozen=True)
class MetricsReport:
    """Scores of all repeats at one point of a study."""

    axis: str
    value: float
    scenario: str
    n_unknown: int
    openness: float
    seed: int
    method: str = "cdosr"
    scores: tuple = field(default_factory=tuple)

    @property
    def repeats(self):
        return len(self.scores)

    def _values(self, name):
        return np.array([getattr(s, name) for s in self.scores], dtype=float)

    @property
    def mean_f(self):
        return float(np.mean(self._values("f")))

    @property
    def std_f(self):
        return float(np.std(self._values("f")))

    @property
    def mean_precision(self):
        return float(np.mean(self._values("precision")))

    @property
    def mean_recall(self):
        return float(np.mean(self._values("recall")))

    def as_row(self):
        return {
            self.axis: self.value,
            "scenario": self.scenario,
            "method": self.method,
            "n_unknown": self.n_unknown,
            "openness": self.openness,
            "mean_f": self.mean_f,
            "std_f": self.std_f,
            "mean_precision": self.mean_precision,
            "mean_recall": self.mean_recall,
            "repeats": self.repeats,
            "seed": self.seed,
        }
