"""
Result files: metrics CSVs and subclass discovery reports.

Every file starts with a ``# config=<json>`` line holding the resolved run
configuration, so each artifact can be traced back to the run that made it.
Nothing time-dependent is written, so identical runs give identical files.
"""

import json
from pathlib import Path

import pandas as pd

from osr_project.exceptions import ArtifactWriteError


def config_header(config):
    return f"# config={json.dumps(config, sort_keys=True, default=str)}\n"


def write_text(path, text):
    """Write ``text`` to ``path``, creating parent directories."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ArtifactWriteError(f"Could not write {path}: {exc}") from exc
    return path


def metrics_frame(rows):
    return pd.DataFrame([row if isinstance(row, dict) else row.as_row() for row in rows])


def metrics_table(rows):
    """Plain-text table of metrics rows for terminal output."""
    frame = metrics_frame(rows).drop(columns=["id", "run_id"], errors="ignore")
    return frame.to_string(index=False)


def write_metrics_csv(rows, path, config):
    """Write metrics rows (reports or plain dicts) below the config header."""
    body = metrics_frame(rows).to_csv(index=False, float_format="%.6f", lineterminator="\n")
    return write_text(path, config_header(config) + body)


def subclass_rows(prediction):
    """One row per (group, subclass) with raw and pruned proportions."""
    rows = []
    for table in prediction.tables:
        pruned = table.pruned_proportions
        for subclass, proportion in table.proportions.items():
            rows.append(
                {
                    "group": table.group,
                    "label": table.label,
                    "subclass": subclass,
                    "count": table.counts[subclass],
                    "proportion": proportion,
                    "pruned_proportion": pruned.get(subclass),
                }
            )
    return rows


def _table_block(title, table):
    lines = [f"{title} (n={table.size})", f"  {'subclass':>8}  {'count':>6}  {'raw %':>7}  kept"]
    for subclass, proportion in table.proportions.items():
        kept = "yes" if subclass in table.kept else "no"
        lines.append(
            f"  {subclass:>8}  {table.counts[subclass]:>6}  {100 * proportion:>7.2f}  {kept}"
        )
    lines.append(f"  {len(table.kept)} subclasses after pruning")
    return lines


def render_subclass_report(prediction, config=None):
    """
    Per-class subclass tables, the test-batch summary and the estimated
    number of unknown classes.
    """
    lines = []
    for table in prediction.known_tables:
        lines.extend(_table_block(f"Class {table.label}", table))
        lines.append("")

    lines.extend(_table_block("Test batch", prediction.test_table))
    summary = prediction.test_summary()
    lines.append(
        f"Test batch: {summary['subclasses']} subclasses; "
        f"known {summary['known']} ({100 * summary['known_share']:.2f}%); "
        f"new {summary['new']} ({100 * summary['new_share']:.2f}%)"
    )
    lines.append(f"estimated unknown classes: {prediction.delta}")

    header = config_header(config) if config is not None else ""
    return header + "\n".join(lines) + "\n"


def write_subclass_report(prediction, path, config):
    return write_text(path, render_subclass_report(prediction, config))
