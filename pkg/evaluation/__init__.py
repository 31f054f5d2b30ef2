"""
Evaluation harness: data, preprocessing, protocol, metrics, studies and reports.
"""

from .baselines import nearest_centroid_predict
from .datasets import (
    detect_format,
    load_dataset,
    make_open_set_blobs,
    open_dataset,
    subsample,
)
from .metrics import MetricsReport, Score, micro_f, openness
from .preprocessing import Projection, pca_fit_transform, prepare_features, standardize
from .protocol import SplitPlan, fitting_class_count, split_count, split_protocol
from .reports import (
    config_header,
    metrics_table,
    render_subclass_report,
    subclass_rows,
    write_metrics_csv,
    write_subclass_report,
    write_text,
)
from .studies import (
    BATCH_FRACTIONS,
    FitResult,
    StudyConfig,
    run_batch_size_study,
    run_epsilon_study,
    run_openness_sweep,
    select_hyperparameters,
)

__all__ = [
    "BATCH_FRACTIONS",
    "FitResult",
    "MetricsReport",
    "Projection",
    "Score",
    "SplitPlan",
    "StudyConfig",
    "config_header",
    "detect_format",
    "fitting_class_count",
    "load_dataset",
    "make_open_set_blobs",
    "metrics_table",
    "micro_f",
    "nearest_centroid_predict",
    "open_dataset",
    "openness",
    "pca_fit_transform",
    "prepare_features",
    "render_subclass_report",
    "run_batch_size_study",
    "run_epsilon_study",
    "run_openness_sweep",
    "select_hyperparameters",
    "split_count",
    "split_protocol",
    "standardize",
    "subclass_rows",
    "subsample",
    "write_metrics_csv",
    "write_text",
    "write_subclass_report",
]
