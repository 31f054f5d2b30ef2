"""
Categorical draws from unnormalized log weights.
"""

import numpy as np
from scipy.special import logsumexp

from osr_project.exceptions import SamplerStateError


def normalize_log_weights(log_weights):
    """Turn unnormalized log weights into probabilities with the log-sum-exp trick."""
    log_weights = np.asarray(log_weights, dtype=float)
    if log_weights.ndim != 1 or log_weights.size == 0:
        raise SamplerStateError("Categorical draw needs a non-empty 1-d weight vector.")
    if np.any(np.isnan(log_weights)) or not np.any(np.isfinite(log_weights)):
        raise SamplerStateError(f"Invalid categorical log weights: {log_weights}")
    return np.exp(log_weights - logsumexp(log_weights))


def sample_log_categorical(log_weights, rng):
    """
    Draw an index with probability proportional to ``exp(log_weights)``.

    Weights may span hundreds of orders of magnitude; entries equal to -inf
    are never chosen.
    """
    p = normalize_log_weights(log_weights)
    cdf = np.cumsum(p)
    u = rng.random() * cdf[-1]
    index = int(np.searchsorted(cdf, u, side="right"))
    return min(index, len(p) - 1)
