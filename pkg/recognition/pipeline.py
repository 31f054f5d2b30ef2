"""
End-to-end collective recognition of a test batch.
"""

import logging
from dataclasses import replace

import numpy as np

from hdp import run_chain

from .decision import estimate_unknown_count, predict, prune_subclasses
from .groups import build_groups, pooled_prior

logger = logging.getLogger(__name__)


def resolve_prior(groups, config):
    """``config`` with its prior built from the training groups unless already set."""
    if config.prior is not None:
        return config
    return config.with_prior(
        pooled_prior(groups, config.varsigma, nu=config.nu, beta=config.beta)
    )


def co_cluster(train, test_batch, config, rng=None, likelihood=None):
    """
    Group the data and run the sampler.

    Returns ``(groups, resolved config, final state)``; the state can be
    decided at several pruning thresholds without re-sampling.
    """
    groups = build_groups(train, test_batch)
    config = resolve_prior(groups, config)
    if rng is None:
        rng = np.random.default_rng(config.seed)

    logger.info(
        f"Co-clustering {groups.n_known} known classes and a test batch of "
        f"{len(groups.test_group)} instances (d={groups.d}, seed={config.seed})."
    )
    state = run_chain(groups, config, rng, likelihood=likelihood)
    return groups, config, state


def decide(state, epsilon):
    """Prune at ``epsilon``, label the test batch and estimate the unknown-class count."""
    tables = prune_subclasses(state, epsilon)
    prediction = predict(state, tables)
    return replace(prediction, delta=estimate_unknown_count(tables))


def recognize(train, test_batch, config, likelihood=None):
    """
    Label ``test_batch`` against the classes of ``train``.

    Outcomes follow the row order of ``test_batch``. The result is a pure
    function of the inputs and ``config.seed``.
    """
    _, config, state = co_cluster(train, test_batch, config, likelihood=likelihood)
    prediction = decide(state, config.epsilon)
    logger.info(
        f"Recognized {len(prediction.outcomes)} instances: "
        f"{sum(o.is_unknown for o in prediction.outcomes)} unknown, "
        f"{len(prediction.unknown_subclasses)} new subclasses, delta={prediction.delta}."
    )
    return prediction
