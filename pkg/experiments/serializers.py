"""
Serializers for run configurations and stored runs.

Configuration values arrive as strings from config files or as typed values
from command-line flags; the serializers coerce and validate both.
"""

from pathlib import Path

from rest_framework import serializers

from evaluation.datasets import FORMATS, SYNTHETIC_PREFIX
from evaluation.studies import BATCH_FRACTIONS, DEFAULT_REPEATS
from hdp import HDPConcentrations
from recognition import EPSILON_GRID, NU_GRID_SPAN, VARSIGMA_GRID, HyperConfig
from recognition.config import DEFAULT_EPSILON, DEFAULT_INIT_COMPONENTS, DEFAULT_SWEEPS

from .models import ExperimentRun, MetricRecord, SubclassRecord

STUDIES = [choice for choice, _ in ExperimentRun.Study.choices]


def _positive(value, what):
    if value is not None and value <= 0:
        raise serializers.ValidationError(f"{what} must be positive.")
    return value


def _gamma_prior(value):
    if len(value) != 2 or min(value) <= 0:
        raise serializers.ValidationError("Expected a positive (shape, rate) pair.")
    return value


class HyperConfigSerializer(serializers.Serializer):
    """
    Model hyperparameters (Normal-Wishart, concentrations, sampler, pruning).

    ``save()`` returns a frozen HyperConfig.
    """

    beta = serializers.FloatField(default=1.0)
    nu = serializers.FloatField(default=None, allow_null=True)
    varsigma = serializers.FloatField(default=1.0)
    gamma = serializers.FloatField(default=None, allow_null=True)
    alpha0 = serializers.FloatField(default=None, allow_null=True)
    gamma_prior = serializers.ListField(
        child=serializers.FloatField(), default=lambda: [100.0, 1.0]
    )
    alpha0_prior = serializers.ListField(
        child=serializers.FloatField(), default=lambda: [10.0, 1.0]
    )
    sample_initial = serializers.BooleanField(default=False)
    resample = serializers.BooleanField(default=False)
    T = serializers.IntegerField(default=DEFAULT_SWEEPS, min_value=0)
    init_components = serializers.IntegerField(default=DEFAULT_INIT_COMPONENTS, min_value=1)
    epsilon = serializers.FloatField(default=DEFAULT_EPSILON)

    def validate_beta(self, value):
        return _positive(value, "beta")

    def validate_nu(self, value):
        return _positive(value, "nu")

    def validate_varsigma(self, value):
        return _positive(value, "varsigma")

    def validate_gamma(self, value):
        return _positive(value, "gamma")

    def validate_alpha0(self, value):
        return _positive(value, "alpha0")

    def validate_gamma_prior(self, value):
        return _gamma_prior(value)

    def validate_alpha0_prior(self, value):
        return _gamma_prior(value)

    def validate_epsilon(self, value):
        """Pruning threshold must lie in [0, 1)."""
        if not 0 <= value < 1:
            raise serializers.ValidationError("epsilon must lie in [0, 1).")
        return value

    def create(self, validated_data):
        data = dict(validated_data)
        conc = HDPConcentrations(
            gamma=data.pop("gamma"),
            alpha0=data.pop("alpha0"),
            gamma_prior=tuple(data.pop("gamma_prior")),
            alpha0_prior=tuple(data.pop("alpha0_prior")),
            sample_initial=data.pop("sample_initial"),
            resample=data.pop("resample"),
        )
        return HyperConfig(conc=conc, **data)


class RunConfigSerializer(serializers.Serializer):
    """Study selection, data source, grids and output settings."""

    study = serializers.ChoiceField(choices=STUDIES)
    dataset = serializers.CharField()
    format = serializers.ChoiceField(choices=list(FORMATS), default="auto")
    output_dir = serializers.CharField()
    seed = serializers.IntegerField()
    omega = serializers.IntegerField(default=5, min_value=1)
    repeats = serializers.IntegerField(default=DEFAULT_REPEATS, min_value=1)
    unknown_counts = serializers.ListField(
        child=serializers.IntegerField(min_value=0), default=None, allow_null=True
    )
    fractions = serializers.ListField(
        child=serializers.FloatField(), default=lambda: list(BATCH_FRACTIONS)
    )
    eps_grid = serializers.ListField(
        child=serializers.FloatField(), default=lambda: list(EPSILON_GRID)
    )
    nu_span = serializers.IntegerField(default=NU_GRID_SPAN, min_value=0)
    varsigma_grid = serializers.ListField(
        child=serializers.FloatField(), default=lambda: list(VARSIGMA_GRID)
    )
    pca_retain = serializers.FloatField(default=None, allow_null=True)
    standardize = serializers.BooleanField(default=True)
    n_jobs = serializers.IntegerField(default=1)
    subsample = serializers.IntegerField(default=None, allow_null=True, min_value=2)
    baseline = serializers.BooleanField(default=False)

    def validate_dataset(self, value):
        """Dataset files must exist when the configuration is loaded."""
        value = value.strip()
        if not value:
            raise serializers.ValidationError("Dataset cannot be empty.")
        if not value.startswith(SYNTHETIC_PREFIX) and not Path(value).is_file():
            raise serializers.ValidationError(f"Dataset file {value} does not exist.")
        return value

    def validate_fractions(self, value):
        if any(not 0 < f <= 1 for f in value):
            raise serializers.ValidationError("Batch fractions must lie in (0, 1].")
        return value

    def validate_eps_grid(self, value):
        if any(not 0 <= eps < 1 for eps in value):
            raise serializers.ValidationError("Pruning thresholds must lie in [0, 1).")
        return value

    def validate_varsigma_grid(self, value):
        if any(v <= 0 for v in value):
            raise serializers.ValidationError("varsigma values must be positive.")
        return value

    def validate_pca_retain(self, value):
        if value is not None and not 0 < value <= 1:
            raise serializers.ValidationError("PCA retain fraction must lie in (0, 1].")
        return value

    def validate_n_jobs(self, value):
        if value == 0:
            raise serializers.ValidationError("n_jobs cannot be 0.")
        return value

    def validate(self, attrs):
        """Grids used by the selected study must be non-empty."""
        required = {
            "fit": ["varsigma_grid"],
            "batch": ["fractions"],
            "epsilon": ["eps_grid"],
        }.get(attrs["study"], [])
        errors = {name: "Cannot be empty for this study." for name in required if not attrs[name]}
        if attrs["study"] == "sweep" and attrs["unknown_counts"] == []:
            errors["unknown_counts"] = "Cannot be empty for this study."
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


class MetricRecordSerializer(serializers.ModelSerializer):
    class Meta:
        model = MetricRecord
        fields = [
            "axis",
            "value",
            "scenario",
            "method",
            "n_unknown",
            "openness",
            "mean_f",
            "std_f",
            "mean_precision",
            "mean_recall",
            "repeats",
            "seed",
        ]


class SubclassRecordSerializer(serializers.ModelSerializer):
    class Meta:
        model = SubclassRecord
        fields = ["group", "label", "subclass", "count", "proportion", "pruned_proportion"]


class ExperimentRunSerializer(serializers.ModelSerializer):
    """
    Stored run with its metric and subclass rows.

    Used by the ``report`` subcommand.
    """

    metrics = MetricRecordSerializer(many=True, read_only=True)
    subclasses = SubclassRecordSerializer(many=True, read_only=True)

    class Meta:
        model = ExperimentRun
        fields = [
            "id",
            "study",
            "status",
            "dataset_path",
            "seed",
            "config",
            "summary",
            "metrics",
            "subclasses",
            "created_at",
        ]
        read_only_fields = fields
