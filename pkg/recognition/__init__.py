"""
Collective-decision open set recognition on top of the HDP sampler.
"""

from .config import (
    EPSILON_GRID,
    NU_GRID_SPAN,
    VARSIGMA_GRID,
    HyperConfig,
)
from .decision import (
    UNKNOWN_LABEL,
    Outcome,
    OSRPrediction,
    SubclassTable,
    estimate_unknown_count,
    predict,
    prune_subclasses,
    round_unknown_estimate,
)
from .groups import (
    GroupedDataset,
    LabeledDataset,
    build_groups,
    pooled_covariance,
    pooled_prior,
)
from .pipeline import co_cluster, decide, recognize, resolve_prior

__all__ = [
    "EPSILON_GRID",
    "NU_GRID_SPAN",
    "UNKNOWN_LABEL",
    "VARSIGMA_GRID",
    "GroupedDataset",
    "HyperConfig",
    "LabeledDataset",
    "OSRPrediction",
    "Outcome",
    "SubclassTable",
    "build_groups",
    "co_cluster",
    "decide",
    "estimate_unknown_count",
    "pooled_covariance",
    "pooled_prior",
    "predict",
    "prune_subclasses",
    "recognize",
    "resolve_prior",
    "round_unknown_estimate",
]
