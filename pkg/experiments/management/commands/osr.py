"""
Command-line entry point: ``python manage.py osr <subcommand> [flags]``.
"""

import uuid

from django.core.management.base import BaseCommand
from rest_framework.renderers import JSONRenderer

from experiments.dispatch import dispatch, render_run
from experiments.models import ExperimentRun
from experiments.runconfig import load_run_config
from experiments.serializers import STUDIES, ExperimentRunSerializer
from osr_project.exceptions import OSRError, command_error_for


def _list_of(cast):
    def parse(text):
        return [cast(item) for item in text.split(",") if item.strip()]

    return parse


class Command(BaseCommand):
    help = "Run open set recognition studies and render stored runs."

    def _add_run_arguments(self, parser):
        parser.add_argument("--config", help="KEY=VALUE config file")
        parser.add_argument("--dataset", help="Dataset file or synthetic:<classes>")
        parser.add_argument("--out", dest="output_dir", help="Output directory")
        parser.add_argument("--seed", type=int, help="Root seed")
        parser.add_argument("--repeats", type=int, help="Randomized splits per study point")
        parser.add_argument(
            "--unknown-counts",
            type=_list_of(int),
            help="Comma-separated numbers of added unknown classes",
        )
        parser.add_argument(
            "--fractions", type=_list_of(float), help="Comma-separated batch fractions"
        )
        parser.add_argument(
            "--eps-grid", type=_list_of(float), help="Comma-separated pruning thresholds"
        )
        parser.add_argument("--t-sweeps", dest="T", type=int, help="Gibbs sweeps per chain")
        parser.add_argument(
            "--init-components", type=int, help="Initial number of shared subclasses"
        )
        parser.add_argument(
            "--baseline",
            action="store_true",
            default=None,
            help="Also score a closed-set nearest-centroid classifier",
        )

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="subcommand", required=True)
        for study in STUDIES:
            self._add_run_arguments(subparsers.add_parser(study))

        report = subparsers.add_parser("report")
        report.add_argument("run_id", nargs="?", help="Run id (default: latest run)")
        report.add_argument("--json", action="store_true", help="Print the stored record as JSON")

    def handle(self, *args, **options):
        subcommand = options.pop("subcommand")
        try:
            if subcommand == "report":
                self._report(options.get("run_id"), options.get("json"))
                return

            flags = {
                name: options.get(name)
                for name in (
                    "dataset",
                    "output_dir",
                    "seed",
                    "repeats",
                    "unknown_counts",
                    "fractions",
                    "eps_grid",
                    "T",
                    "init_components",
                    "baseline",
                )
            }
            config = load_run_config(subcommand, options.get("config"), **flags)
            run = dispatch(config)
            self.stdout.write(render_run(run))
            self.stdout.write(self.style.SUCCESS(f"Run {run.id} completed."))
        except Exception as exc:
            raise command_error_for(exc) from exc

    def _report(self, run_id, as_json=False):
        runs = ExperimentRun.objects.prefetch_related("metrics", "subclasses")
        if run_id:
            try:
                run_uuid = uuid.UUID(run_id)
            except ValueError as exc:
                raise OSRError(f"Invalid run ID {run_id!r}.") from exc
            run = runs.filter(id=run_uuid).first()
        else:
            run = runs.order_by("-created_at").first()
        if run is None:
            raise OSRError(f"No stored run {run_id}." if run_id else "No stored runs.")

        if as_json:
            data = ExperimentRunSerializer(run).data
            self.stdout.write(JSONRenderer().render(data).decode("utf-8"))
        else:
            self.stdout.write(render_run(run))
