"""
Run configuration: config files, environment and command-line flags.

Config files use the same ``KEY=VALUE`` format as ``.env`` files. Key
prefixes group the settings of each layer:

    BAYES_*   prior (beta, nu, varsigma)
    HDP_*     concentrations and sampler (sweeps, initial components)
    CDOSR_*   pruning threshold
    EVAL_*    protocol, grids, preprocessing and parallelism
    RUN_*     dataset, output directory and root seed

Precedence: flags, then the OSR_ROOT_SEED environment variable (seed only),
then the config file, then built-in defaults.
"""

import logging
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import environ
from django.conf import settings

from evaluation import StudyConfig
from osr_project.exceptions import ConfigurationError
from recognition import HyperConfig

from .serializers import HyperConfigSerializer, RunConfigSerializer

logger = logging.getLogger(__name__)

HYPER_KEYS = {
    "BAYES_BETA": "beta",
    "BAYES_NU": "nu",
    "BAYES_VARSIGMA": "varsigma",
    "HDP_GAMMA": "gamma",
    "HDP_ALPHA0": "alpha0",
    "HDP_GAMMA_PRIOR": "gamma_prior",
    "HDP_ALPHA0_PRIOR": "alpha0_prior",
    "HDP_SAMPLE_INITIAL": "sample_initial",
    "HDP_RESAMPLE": "resample",
    "HDP_SWEEPS": "T",
    "HDP_INIT_COMPONENTS": "init_components",
    "CDOSR_EPSILON": "epsilon",
}

RUN_KEYS = {
    "EVAL_OMEGA": "omega",
    "EVAL_REPEATS": "repeats",
    "EVAL_UNKNOWN_COUNTS": "unknown_counts",
    "EVAL_FRACTIONS": "fractions",
    "EVAL_EPS_GRID": "eps_grid",
    "EVAL_NU_SPAN": "nu_span",
    "EVAL_VARSIGMA_GRID": "varsigma_grid",
    "EVAL_PCA_RETAIN": "pca_retain",
    "EVAL_STANDARDIZE": "standardize",
    "EVAL_N_JOBS": "n_jobs",
    "EVAL_SUBSAMPLE": "subsample",
    "EVAL_BASELINE": "baseline",
    "RUN_DATASET": "dataset",
    "RUN_FORMAT": "format",
    "RUN_OUTPUT_DIR": "output_dir",
    "RUN_SEED": "seed",
}

LIST_FIELDS = {
    "gamma_prior",
    "alpha0_prior",
    "unknown_counts",
    "fractions",
    "eps_grid",
    "varsigma_grid",
}


@dataclass(frozen=True)
class RunConfig:
    """Everything one command-line run needs."""

    study: str
    dataset: str
    output_dir: str
    seed: int
    hyper: HyperConfig
    format: str = "auto"
    omega: int = 5
    repeats: int = 10
    unknown_counts: tuple | None = None
    fractions: tuple = ()
    eps_grid: tuple = ()
    nu_span: int = 20
    varsigma_grid: tuple = ()
    pca_retain: float | None = None
    standardize: bool = True
    n_jobs: int = 1
    subsample: int | None = None
    baseline: bool = False

    def study_config(self):
        return StudyConfig(
            hyper=self.hyper,
            omega=self.omega,
            repeats=self.repeats,
            root_seed=self.seed,
            scale=self.standardize,
            retain=self.pca_retain,
            n_jobs=self.n_jobs,
            baseline=self.baseline,
        )

    def as_dict(self):
        data = asdict(self)
        data["hyper"] = self.hyper.as_dict()
        return data


def _file_env(path):
    """An environ.Env reading from a private mapping filled from ``path``."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file {path} does not exist.")

    file_env_class = type("RunConfigEnv", (environ.Env,), {"ENVIRON": {}})
    file_env_class.read_env(path, overwrite=True)
    return file_env_class()


def read_config_file(path):
    """
    Raw values of a config file, keyed by serializer field name.

    List values are split on commas; everything else is passed on as text.
    """
    env = _file_env(path)
    unknown = sorted(set(env.ENVIRON) - set(HYPER_KEYS) - set(RUN_KEYS))
    if unknown:
        raise ConfigurationError(
            f"Unknown keys in config file {path}.", details={"keys": unknown}
        )

    raw = {}
    for key, name in {**HYPER_KEYS, **RUN_KEYS}.items():
        if key not in env.ENVIRON:
            continue
        raw[name] = env.list(key) if name in LIST_FIELDS else env.str(key)
        if raw[name] == "":
            raw[name] = None
    return raw


def _environment_seed():
    return environ.Env().int("OSR_ROOT_SEED", default=None)


def _validated(serializer_class, data):
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        raise ConfigurationError(
            "Invalid run configuration.", details=dict(serializer.errors)
        )
    return serializer


def load_run_config(study, config_path=None, **flags):
    """
    Merge defaults, config file, environment and flags into a RunConfig.

    ``flags`` uses serializer field names; None values are treated as unset.
    """
    raw = read_config_file(config_path) if config_path else {}
    raw.setdefault("output_dir", settings.OSR_OUTPUT_DIR)
    raw.setdefault("n_jobs", settings.OSR_N_JOBS)
    raw.setdefault("seed", settings.OSR_ROOT_SEED)

    environment_seed = _environment_seed()
    if environment_seed is not None:
        raw["seed"] = environment_seed

    raw.update({name: value for name, value in flags.items() if value is not None})
    raw["study"] = study

    hyper_data = {name: raw[name] for name in HYPER_KEYS.values() if name in raw}
    run_data = {name: value for name, value in raw.items() if name not in hyper_data}

    hyper = _validated(HyperConfigSerializer, hyper_data).save()
    run = _validated(RunConfigSerializer, run_data).validated_data

    config = RunConfig(
        hyper=replace(hyper, seed=run["seed"]),
        **{
            name: tuple(value) if isinstance(value, list) else value
            for name, value in run.items()
        },
    )
    logger.info(f"Loaded {study} configuration (seed {config.seed}).")
    return config
