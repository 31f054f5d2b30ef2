"""
Experiment run records.

Every command-line run is stored with its resolved configuration, its
outcome and the metric and subclass rows it produced.
"""

import uuid

from django.db import models


class ExperimentRun(models.Model):
    """
    One invocation of a study.

    Stores the study kind, the dataset, the root seed and the full resolved
    configuration so a run can be reproduced from its record.
    """

    class Study(models.TextChoices):
        FIT = "fit", "Fit"
        SWEEP = "sweep", "Openness sweep"
        BATCH = "batch", "Batch size"
        EPSILON = "epsilon", "Pruning threshold"
        DISCOVER = "discover", "Discovery"

    class Status(models.TextChoices):
        RUNNING = "running", "Running"
        COMPLETED = "completed", "Completed"
        FAILED = "failed", "Failed"

    id = models.UUIDField(
        primary_key=True,
        default=uuid.uuid4,
        editable=False,
        help_text="Unique identifier for the run",
    )

    study = models.CharField(
        max_length=16, choices=Study.choices, help_text="Kind of study that was run"
    )

    status = models.CharField(
        max_length=16,
        choices=Status.choices,
        default=Status.RUNNING,
        help_text="Whether the run is in progress, finished or failed",
    )

    dataset_path = models.CharField(
        max_length=500, help_text="Dataset file or synthetic dataset name"
    )

    seed = models.BigIntegerField(help_text="Root seed of the run")

    config = models.JSONField(default=dict, help_text="Full resolved configuration")

    summary = models.JSONField(
        default=dict, blank=True, help_text="Run outcome, e.g. selected parameters or paths"
    )

    created_at = models.DateTimeField(
        auto_now_add=True, help_text="When the run was started"
    )

    updated_at = models.DateTimeField(
        auto_now=True, help_text="When the run record was last updated"
    )

    class Meta:
        db_table = "experiments_run"
        verbose_name = "Experiment run"
        verbose_name_plural = "Experiment runs"
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["study", "-created_at"], name="experiments_study_5d2c1e_idx"),
            models.Index(fields=["created_at"], name="experiments_created_8a41f0_idx"),
        ]

    def __str__(self):
        return f"{self.study} on {self.dataset_path} (seed {self.seed}, {self.status})"


class MetricRecord(models.Model):
    """Aggregated scores of one study point."""

    run = models.ForeignKey(
        ExperimentRun,
        on_delete=models.CASCADE,
        related_name="metrics",
        help_text="Run that produced this row",
    )

    axis = models.CharField(
        max_length=32, help_text="Study axis (openness, fraction, epsilon, grid)"
    )
    value = models.FloatField(help_text="Value on the study axis")
    scenario = models.CharField(max_length=16, help_text="closed or open")
    method = models.CharField(max_length=32, default="cdosr")
    n_unknown = models.PositiveIntegerField(default=0)
    openness = models.FloatField(default=0.0)
    mean_f = models.FloatField()
    std_f = models.FloatField(default=0.0)
    mean_precision = models.FloatField(null=True, blank=True)
    mean_recall = models.FloatField(null=True, blank=True)
    repeats = models.PositiveIntegerField()
    seed = models.BigIntegerField()

    class Meta:
        db_table = "experiments_metric"
        ordering = ["id"]

    def __str__(self):
        return f"{self.axis}={self.value} {self.scenario}/{self.method}: F={self.mean_f:.4f}"


class SubclassRecord(models.Model):
    """One subclass of one group in a discovery run."""

    run = models.ForeignKey(
        ExperimentRun,
        on_delete=models.CASCADE,
        related_name="subclasses",
        help_text="Run that produced this row",
    )

    group = models.PositiveIntegerField(help_text="Group index; the test batch is last")
    label = models.IntegerField(null=True, blank=True, help_text="Class id, empty for the test batch")
    subclass = models.PositiveIntegerField(help_text="Dish id shared across groups")
    count = models.PositiveIntegerField()
    proportion = models.FloatField(help_text="Share of the group's instances")
    pruned_proportion = models.FloatField(
        null=True, blank=True, help_text="Share after pruning, empty if pruned"
    )

    class Meta:
        db_table = "experiments_subclass"
        ordering = ["group", "subclass"]

    def __str__(self):
        return f"group {self.group} subclass {self.subclass}: {self.proportion:.2%}"
