"""
Running a configured study and persisting what it produced.

Each study writes its artifacts under the output directory and records the
run, its metric rows and (for discovery) its subclass rows in the database.
"""

import logging
from pathlib import Path

from django.db import DatabaseError, transaction

from evaluation import (
    config_header,
    metrics_table,
    micro_f,
    open_dataset,
    prepare_features,
    render_subclass_report,
    run_batch_size_study,
    run_epsilon_study,
    run_openness_sweep,
    select_hyperparameters,
    split_protocol,
    subclass_rows,
    subsample,
    write_metrics_csv,
    write_subclass_report,
    write_text,
)
from osr_project.exceptions import ArtifactWriteError
from recognition import LabeledDataset, OSRPrediction, SubclassTable, recognize

from .models import ExperimentRun, MetricRecord, SubclassRecord

logger = logging.getLogger(__name__)


def _output_path(config, name):
    return Path(config.output_dir) / name


def _available_unknown(dataset, config):
    return len(dataset.classes) - config.omega


def _n_unknown(dataset, config):
    """Unknown classes added in batch, epsilon and discovery runs."""
    if config.unknown_counts:
        return max(config.unknown_counts)
    return _available_unknown(dataset, config)


def _persist_metrics(run, reports):
    MetricRecord.objects.bulk_create(
        [
            MetricRecord(
                run=run,
                axis=report.axis,
                value=report.value,
                scenario=report.scenario,
                method=report.method,
                n_unknown=report.n_unknown,
                openness=report.openness,
                mean_f=report.mean_f,
                std_f=report.std_f,
                mean_precision=report.mean_precision,
                mean_recall=report.mean_recall,
                repeats=report.repeats,
                seed=report.seed,
            )
            for report in reports
        ]
    )


def _metrics_study(config, run, reports):
    path = write_metrics_csv(reports, _output_path(config, f"{config.study}.csv"), config.as_dict())
    _persist_metrics(run, reports)
    return {"artifacts": [str(path)], "rows": len(reports)}


def run_sweep(config, dataset, run):
    counts = config.unknown_counts
    if counts is None:
        counts = list(range(_available_unknown(dataset, config) + 1))
    reports = run_openness_sweep(dataset, config.study_config(), list(counts))
    return _metrics_study(config, run, reports)


def run_batch(config, dataset, run):
    reports = run_batch_size_study(
        dataset, config.study_config(), list(config.fractions), _n_unknown(dataset, config)
    )
    return _metrics_study(config, run, reports)


def run_epsilon(config, dataset, run):
    reports = run_epsilon_study(
        dataset, config.study_config(), list(config.eps_grid), _n_unknown(dataset, config)
    )
    return _metrics_study(config, run, reports)


def run_fit(config, dataset, run):
    result = select_hyperparameters(
        dataset, config.study_config(), config.nu_span, list(config.varsigma_grid)
    )
    grid_path = write_metrics_csv(result.rows, _output_path(config, "fit.csv"), config.as_dict())
    selected_path = write_text(
        _output_path(config, "fit_selected.env"),
        config_header(config.as_dict())
        + f"BAYES_NU={result.nu}\nBAYES_VARSIGMA={result.varsigma}\n",
    )
    return {
        "nu": result.nu,
        "nu_offset": result.nu_offset,
        "varsigma": result.varsigma,
        "score": result.score,
        "artifacts": [str(grid_path), str(selected_path)],
    }


def run_discover(config, dataset, run):
    plan = split_protocol(dataset, config.omega, config.seed)
    test_rows = plan.test_with_unknown(dataset, _n_unknown(dataset, config))
    train = dataset.subset(plan.train)
    test = dataset.subset(test_rows)
    train_x, (test_x,) = prepare_features(
        train.features, [test.features], scale=config.standardize, retain=config.pca_retain
    )

    prediction = recognize(LabeledDataset(train_x, train.labels), test_x, config.hyper)
    score = micro_f(test.labels, prediction.labels(), plan.known_classes)

    report_path = write_subclass_report(
        prediction, _output_path(config, "discover.txt"), config.as_dict()
    )
    rows = subclass_rows(prediction)
    rows_path = write_metrics_csv(
        rows, _output_path(config, "discover_subclasses.csv"), config.as_dict()
    )
    SubclassRecord.objects.bulk_create([SubclassRecord(run=run, **row) for row in rows])

    return {
        "delta": prediction.delta,
        "f": score.f,
        "precision": score.precision,
        "recall": score.recall,
        "test_summary": prediction.test_summary(),
        "known_classes": list(plan.known_classes),
        "unknown_classes": list(plan.unknown_classes),
        "artifacts": [str(report_path), str(rows_path)],
    }


HANDLERS = {
    "fit": run_fit,
    "sweep": run_sweep,
    "batch": run_batch,
    "epsilon": run_epsilon,
    "discover": run_discover,
}


def _save(run, **fields):
    for name, value in fields.items():
        setattr(run, name, value)
    try:
        run.save()
    except DatabaseError as exc:
        raise ArtifactWriteError(f"Could not persist run {run.id}: {exc}") from exc


def dispatch(config):
    """
    Run the configured study and return its completed ExperimentRun.

    The run is recorded as failed (and the error re-raised) when anything
    goes wrong.
    """
    try:
        run = ExperimentRun.objects.create(
            study=config.study,
            dataset_path=config.dataset,
            seed=config.seed,
            config=config.as_dict(),
        )
    except DatabaseError as exc:
        raise ArtifactWriteError(f"Could not record the run: {exc}") from exc

    logger.info(f"Starting {config.study} run {run.id} on {config.dataset}.")
    try:
        dataset = open_dataset(config.dataset, config.format, seed=config.seed)
        dataset = subsample(dataset, config.subsample, seed=config.seed)
        with transaction.atomic():
            summary = HANDLERS[config.study](config, dataset, run)
    except DatabaseError as exc:
        _save(run, status=ExperimentRun.Status.FAILED, summary={"error": str(exc)})
        raise ArtifactWriteError(f"Could not persist results of run {run.id}: {exc}") from exc
    except Exception as exc:
        _save(run, status=ExperimentRun.Status.FAILED, summary={"error": str(exc)})
        raise

    _save(run, status=ExperimentRun.Status.COMPLETED, summary=summary)
    logger.info(f"Finished {config.study} run {run.id}.")
    return run


def _tables_from_records(records):
    by_group = {}
    for record in records:
        by_group.setdefault(record.group, []).append(record)

    tables = []
    for group, rows in sorted(by_group.items()):
        tables.append(
            SubclassTable(
                group=group,
                label=rows[0].label,
                size=sum(r.count for r in rows),
                counts={r.subclass: r.count for r in rows},
                kept=tuple(r.subclass for r in rows if r.pruned_proportion is not None),
            )
        )
    return tables


def render_run(run):
    """Human-readable rendering of a stored run."""
    header = f"Run {run.id}: {run.study} on {run.dataset_path} (seed {run.seed}, {run.status})"
    if run.status == ExperimentRun.Status.FAILED:
        return f"{header}\nerror: {run.summary.get('error', 'unknown')}\n"

    if run.study == ExperimentRun.Study.DISCOVER:
        prediction = OSRPrediction(
            outcomes=(),
            tables=_tables_from_records(run.subclasses.all()),
            delta=run.summary.get("delta", 0),
        )
        return f"{header}\n{render_subclass_report(prediction)}"

    if run.study == ExperimentRun.Study.FIT:
        return (
            f"{header}\nselected nu={run.summary.get('nu')} "
            f"varsigma={run.summary.get('varsigma')} score={run.summary.get('score')}\n"
        )

    return f"{header}\n{metrics_table(run.metrics.values())}\n"
