"""
Experiment drivers: openness sweep, batch-size and pruning-threshold studies,
and the training-phase grid search.

Every study is a list of independent jobs fanned out with joblib. Job i is
seeded with ``root_seed + i``; the data split of repeat r always uses
``root_seed + r`` so that all points of a repeat share one split.
"""

import logging
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np
from joblib import Parallel, delayed

from osr_project.exceptions import ConfigurationError
from recognition import (
    NU_GRID_SPAN,
    VARSIGMA_GRID,
    HyperConfig,
    LabeledDataset,
    co_cluster,
    decide,
    recognize,
)

from .baselines import nearest_centroid_predict
from .metrics import MetricsReport, micro_f, openness
from .preprocessing import prepare_features
from .protocol import split_protocol

logger = logging.getLogger(__name__)

BATCH_FRACTIONS = (0.2, 0.4, 0.6, 0.8, 1.0)
DEFAULT_REPEATS = 10


@dataclass(frozen=True)
class StudyConfig:
    """Settings shared by all studies."""

    hyper: HyperConfig = field(default_factory=HyperConfig)
    omega: int = 5
    repeats: int = DEFAULT_REPEATS
    root_seed: int = 0
    scale: bool = True
    retain: float | None = None
    n_jobs: int = 1
    baseline: bool = False

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigurationError(
                f"repeats must be at least 1, got {self.repeats}.",
                details={"repeats": self.repeats},
            )


@dataclass(frozen=True)
class FitResult:
    """Outcome of the grid search: the chosen point and every evaluated row."""

    nu: float
    nu_offset: int
    varsigma: float
    score: float
    rows: list


def _plan(dataset, study, repeat):
    return split_protocol(dataset, study.omega, study.root_seed + repeat)


def _prepared(dataset, train_rows, test_rows, study):
    train = dataset.subset(train_rows)
    test = dataset.subset(test_rows)
    train_x, (test_x,) = prepare_features(
        train.features, [test.features], scale=study.scale, retain=study.retain
    )
    return LabeledDataset(train_x, train.labels), test_x, test.labels


def _run(fn, jobs, n_jobs):
    return Parallel(n_jobs=n_jobs)(delayed(fn)(*job) for job in jobs)


def _recognition_job(index, dataset, study, train_rows, test_rows, known, label):
    seed = study.root_seed + index
    train, test_x, test_y = _prepared(dataset, train_rows, test_rows, study)
    prediction = recognize(train, test_x, replace(study.hyper, seed=seed))
    score = micro_f(test_y, prediction.labels(), known)
    baseline = None
    if study.baseline:
        baseline = micro_f(test_y, nearest_centroid_predict(train, test_x), known)
    logger.info(f"Finished job {index} ({label}): F={score.f:.4f}")
    return score, baseline


def _reports(points, results, study, axis):
    """Group per-job results into one report per point (and per method)."""
    reports = []
    for point, chunk in zip(points, results, strict=True):
        common = {
            "axis": axis,
            "value": point["value"],
            "scenario": point["scenario"],
            "n_unknown": point["n_unknown"],
            "openness": openness(
                study.omega, study.omega, study.omega + point["n_unknown"]
            ),
            "seed": study.root_seed,
        }
        reports.append(MetricsReport(scores=tuple(s for s, _ in chunk), **common))
        if study.baseline:
            reports.append(
                MetricsReport(
                    method="nearest_centroid", scores=tuple(b for _, b in chunk), **common
                )
            )
    return reports


def _chunks(results, size):
    return [results[i : i + size] for i in range(0, len(results), size)]


def run_openness_sweep(dataset, study, unknown_counts):
    """One report per number of added unknown classes, over ``study.repeats`` splits."""
    if not unknown_counts:
        raise ConfigurationError("unknown_counts must not be empty.")
    plans = [_plan(dataset, study, r) for r in range(study.repeats)]

    jobs, points = [], []
    for u in unknown_counts:
        points.append(
            {
                "value": openness(study.omega, study.omega, study.omega + u),
                "scenario": "closed" if u == 0 else "open",
                "n_unknown": u,
            }
        )
        for r, plan in enumerate(plans):
            jobs.append(
                (
                    len(jobs),
                    dataset,
                    study,
                    plan.train,
                    plan.test_with_unknown(dataset, u),
                    plan.known_classes,
                    f"unknown={u} repeat={r}",
                )
            )

    results = _run(_recognition_job, jobs, study.n_jobs)
    return _reports(points, _chunks(results, study.repeats), study, "openness")


def _batch_rows(test_rows, fraction, seed):
    size = max(1, int(np.floor(fraction * len(test_rows) + 0.5)))
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(test_rows, size=size, replace=False))


def run_batch_size_study(dataset, study, fractions=BATCH_FRACTIONS, n_unknown=None):
    """
    One report per fraction of the test set given to the recognizer as a batch.

    ``n_unknown`` defaults to every available unknown class.
    """
    if not fractions or any(not 0 < f <= 1 for f in fractions):
        raise ConfigurationError(
            f"Batch fractions must lie in (0, 1], got {list(fractions)}.",
            details={"fractions": list(fractions)},
        )
    plans = [_plan(dataset, study, r) for r in range(study.repeats)]
    if n_unknown is None:
        n_unknown = len(plans[0].unknown_classes)

    jobs, points = [], []
    for fraction in fractions:
        points.append(
            {
                "value": fraction,
                "scenario": "closed" if n_unknown == 0 else "open",
                "n_unknown": n_unknown,
            }
        )
        for r, plan in enumerate(plans):
            index = len(jobs)
            test_rows = plan.test_with_unknown(dataset, n_unknown)
            if fraction < 1:
                test_rows = _batch_rows(test_rows, fraction, study.root_seed + index)
            jobs.append(
                (
                    index,
                    dataset,
                    study,
                    plan.train,
                    test_rows,
                    plan.known_classes,
                    f"fraction={fraction} repeat={r}",
                )
            )

    results = _run(_recognition_job, jobs, study.n_jobs)
    return _reports(points, _chunks(results, study.repeats), study, "fraction")


def _epsilon_job(index, dataset, study, train_rows, test_rows, known, eps_grid, label):
    seed = study.root_seed + index
    train, test_x, test_y = _prepared(dataset, train_rows, test_rows, study)
    _, _, state = co_cluster(train, test_x, replace(study.hyper, seed=seed))
    scores = [micro_f(test_y, decide(state, eps).labels(), known) for eps in eps_grid]
    logger.info(f"Finished job {index} ({label}) over {len(eps_grid)} thresholds.")
    return scores


def run_epsilon_study(dataset, study, eps_grid, n_unknown=None):
    """
    Closed-set and open-set reports per pruning threshold.

    Each repeat and scenario is co-clustered once and every threshold is
    applied to that same final state.
    """
    if not eps_grid or any(not 0 <= eps < 1 for eps in eps_grid):
        raise ConfigurationError(
            f"Pruning thresholds must lie in [0, 1), got {list(eps_grid)}.",
            details={"eps_grid": list(eps_grid)},
        )
    plans = [_plan(dataset, study, r) for r in range(study.repeats)]
    if n_unknown is None:
        n_unknown = len(plans[0].unknown_classes)

    jobs = []
    scenarios = (("closed", 0), ("open", n_unknown))
    for scenario, u in scenarios:
        for r, plan in enumerate(plans):
            jobs.append(
                (
                    len(jobs),
                    dataset,
                    study,
                    plan.train,
                    plan.test_with_unknown(dataset, u),
                    plan.known_classes,
                    list(eps_grid),
                    f"{scenario} repeat={r}",
                )
            )
    results = _run(_epsilon_job, jobs, study.n_jobs)

    reports = []
    for (scenario, u), chunk in zip(scenarios, _chunks(results, study.repeats), strict=True):
        for position, eps in enumerate(eps_grid):
            reports.append(
                MetricsReport(
                    axis="epsilon",
                    value=eps,
                    scenario=scenario,
                    n_unknown=u,
                    openness=openness(study.omega, study.omega, study.omega + u),
                    seed=study.root_seed,
                    scores=tuple(scores[position] for scores in chunk),
                )
            )
    return reports


def _fit_job(index, dataset, study, plan, nu_offset, varsigma):
    train, closed_x, closed_y = _prepared(dataset, plan.fitting, plan.closed_sim, study)
    _, open_x, open_y = _prepared(dataset, plan.fitting, plan.open_sim, study)
    hyper = replace(
        study.hyper, nu=train.d + nu_offset, varsigma=varsigma, prior=None
    )

    closed = recognize(train, closed_x, replace(hyper, seed=study.root_seed + 2 * index))
    opened = recognize(train, open_x, replace(hyper, seed=study.root_seed + 2 * index + 1))
    f_closed = micro_f(closed_y, closed.labels(), plan.fit_known_classes).f
    f_open = micro_f(open_y, opened.labels(), plan.fit_known_classes).f
    logger.info(
        f"Finished job {index} (nu=d+{nu_offset} varsigma={varsigma}): "
        f"closed F={f_closed:.4f} open F={f_open:.4f}"
    )
    return f_closed, f_open


def select_hyperparameters(dataset, study, nu_span=NU_GRID_SPAN, varsigma_grid=VARSIGMA_GRID):
    """
    Grid search over (nu, varsigma) on the fitting/validation simulations.

    A grid point scores the mean of its closed-set and open-set F-measures,
    averaged over the repeats; the first best point in grid order wins.
    """
    if nu_span < 0 or not varsigma_grid:
        raise ConfigurationError(
            "The fit grid needs a non-negative nu span and at least one varsigma value.",
            details={"nu_span": nu_span, "varsigma_grid": list(varsigma_grid)},
        )
    plans = [_plan(dataset, study, r) for r in range(study.repeats)]
    grid = list(product(range(nu_span + 1), varsigma_grid))

    jobs = [
        (len(plans) * g + r, dataset, study, plan, offset, varsigma)
        for g, (offset, varsigma) in enumerate(grid)
        for r, plan in enumerate(plans)
    ]
    results = _run(_fit_job, jobs, study.n_jobs)

    d = _prepared(dataset, plans[0].fitting, plans[0].closed_sim, study)[0].d
    rows, best = [], None
    for (offset, varsigma), chunk in zip(grid, _chunks(results, len(plans)), strict=True):
        f_closed = float(np.mean([c for c, _ in chunk]))
        f_open = float(np.mean([o for _, o in chunk]))
        score = (f_closed + f_open) / 2
        rows.append(
            {
                "nu": d + offset,
                "nu_offset": offset,
                "varsigma": varsigma,
                "mean_f_closed": f_closed,
                "mean_f_open": f_open,
                "score": score,
                "repeats": len(plans),
                "seed": study.root_seed,
            }
        )
        if best is None or score > best["score"]:
            best = rows[-1]

    logger.info(
        f"Selected nu={best['nu']} varsigma={best['varsigma']} (score {best['score']:.4f})."
    )
    return FitResult(
        nu=best["nu"],
        nu_offset=best["nu_offset"],
        varsigma=best["varsigma"],
        score=best["score"],
        rows=rows,
    )
