"""
Hyperparameters of a recognition run.
"""

from dataclasses import dataclass, field, replace

from hdp import HDPConcentrations
from osr_project.exceptions import ConfigurationError

DEFAULT_SWEEPS = 30
DEFAULT_INIT_COMPONENTS = 30
DEFAULT_EPSILON = 0.01

# Candidate values for the pooled-covariance scaling and the pruning threshold.
VARSIGMA_GRID = (1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
EPSILON_GRID = (0.0, 1e-5, 1e-4, 1e-3, 1e-2, 0.1)
NU_GRID_SPAN = 20


@dataclass(frozen=True)
class HyperConfig:
    """
    Everything a single co-clustering run needs.

    ``prior`` is normally left unset and built from the training groups by
    ``pooled_prior`` using ``nu`` (default: the feature dimension), ``beta``
    and ``varsigma``.
    """

    conc: HDPConcentrations = field(default_factory=HDPConcentrations)
    prior: object = None
    nu: float | None = None
    beta: float = 1.0
    varsigma: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    T: int = DEFAULT_SWEEPS
    init_components: int = DEFAULT_INIT_COMPONENTS
    seed: int = 0

    def __post_init__(self):
        errors = {}
        if not 0 <= self.epsilon < 1:
            errors["epsilon"] = f"must lie in [0, 1), got {self.epsilon}"
        if self.T < 0:
            errors["T"] = f"must be non-negative, got {self.T}"
        if self.init_components < 1:
            errors["init_components"] = f"must be at least 1, got {self.init_components}"
        if not self.varsigma > 0:
            errors["varsigma"] = f"must be positive, got {self.varsigma}"
        if not self.beta > 0:
            errors["beta"] = f"must be positive, got {self.beta}"
        if self.nu is not None and not self.nu > 0:
            errors["nu"] = f"must be positive, got {self.nu}"
        if errors:
            raise ConfigurationError("Invalid hyperparameters.", details=errors)

    def with_prior(self, prior):
        return replace(self, prior=prior)

    def as_dict(self):
        return {
            "conc": self.conc.as_dict(),
            "prior": self.prior.as_dict() if self.prior is not None else None,
            "nu": self.nu,
            "beta": self.beta,
            "varsigma": self.varsigma,
            "epsilon": self.epsilon,
            "T": self.T,
            "init_components": self.init_components,
            "seed": self.seed,
        }
