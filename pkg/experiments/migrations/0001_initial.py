import uuid

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ExperimentRun",
            fields=[
                (
                    "id",
                    models.UUIDField(
                        default=uuid.uuid4,
                        editable=False,
                        help_text="Unique identifier for the run",
                        primary_key=True,
                        serialize=False,
                    ),
                ),
                (
                    "study",
                    models.CharField(
                        choices=[
                            ("fit", "Fit"),
                            ("sweep", "Openness sweep"),
                            ("batch", "Batch size"),
                            ("epsilon", "Pruning threshold"),
                            ("discover", "Discovery"),
                        ],
                        help_text="Kind of study that was run",
                        max_length=16,
                    ),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("running", "Running"),
                            ("completed", "Completed"),
                            ("failed", "Failed"),
                        ],
                        default="running",
                        help_text="Whether the run is in progress, finished or failed",
                        max_length=16,
                    ),
                ),
                (
                    "dataset_path",
                    models.CharField(
                        help_text="Dataset file or synthetic dataset name",
                        max_length=500,
                    ),
                ),
                ("seed", models.BigIntegerField(help_text="Root seed of the run")),
                (
                    "config",
                    models.JSONField(default=dict, help_text="Full resolved configuration"),
                ),
                (
                    "summary",
                    models.JSONField(
                        blank=True,
                        default=dict,
                        help_text="Run outcome, e.g. selected parameters or paths",
                    ),
                ),
                (
                    "created_at",
                    models.DateTimeField(
                        auto_now_add=True, help_text="When the run was started"
                    ),
                ),
                (
                    "updated_at",
                    models.DateTimeField(
                        auto_now=True, help_text="When the run record was last updated"
                    ),
                ),
            ],
            options={
                "verbose_name": "Experiment run",
                "verbose_name_plural": "Experiment runs",
                "db_table": "experiments_run",
                "ordering": ["-created_at"],
                "indexes": [
                    models.Index(
                        fields=["study", "-created_at"], name="experiments_study_5d2c1e_idx"
                    ),
                    models.Index(
                        fields=["created_at"], name="experiments_created_8a41f0_idx"
                    ),
                ],
            },
        ),
        migrations.CreateModel(
            name="MetricRecord",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "axis",
                    models.CharField(
                        help_text="Study axis (openness, fraction, epsilon, grid)",
                        max_length=32,
                    ),
                ),
                ("value", models.FloatField(help_text="Value on the study axis")),
                ("scenario", models.CharField(help_text="closed or open", max_length=16)),
                ("method", models.CharField(default="cdosr", max_length=32)),
                ("n_unknown", models.PositiveIntegerField(default=0)),
                ("openness", models.FloatField(default=0.0)),
                ("mean_f", models.FloatField()),
                ("std_f", models.FloatField(default=0.0)),
                ("mean_precision", models.FloatField(blank=True, null=True)),
                ("mean_recall", models.FloatField(blank=True, null=True)),
                ("repeats", models.PositiveIntegerField()),
                ("seed", models.BigIntegerField()),
                (
                    "run",
                    models.ForeignKey(
                        help_text="Run that produced this row",
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="metrics",
                        to="experiments.experimentrun",
                    ),
                ),
            ],
            options={
                "db_table": "experiments_metric",
                "ordering": ["id"],
            },
        ),
        migrations.CreateModel(
            name="SubclassRecord",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "group",
                    models.PositiveIntegerField(
                        help_text="Group index; the test batch is last"
                    ),
                ),
                (
                    "label",
                    models.IntegerField(
                        blank=True, help_text="Class id, empty for the test batch", null=True
                    ),
                ),
                (
                    "subclass",
                    models.PositiveIntegerField(help_text="Dish id shared across groups"),
                ),
                ("count", models.PositiveIntegerField()),
                (
                    "proportion",
                    models.FloatField(help_text="Share of the group's instances"),
                ),
                (
                    "pruned_proportion",
                    models.FloatField(
                        blank=True,
                        help_text="Share after pruning, empty if pruned",
                        null=True,
                    ),
                ),
                (
                    "run",
                    models.ForeignKey(
                        help_text="Run that produced this row",
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="subclasses",
                        to="experiments.experimentrun",
                    ),
                ),
            ],
            options={
                "db_table": "experiments_subclass",
                "ordering": ["group", "subclass"],
            },
        ),
    ]
