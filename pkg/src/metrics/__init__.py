"""
Evaluation metrics.
"""
from .distribution import label_class_distribution, length_summary
from .emotion import (
    METRIC_COLUMNS,
    REPORT_COLUMNS,
    MetricsReport,
    acc4_overall,
    acc4_per_emotion,
    compute_metrics,
    mae_overall,
    mae_per_emotion,
    metrics_frame,
    round_class,
    round_classes,
    write_metrics_csv,
)

__all__ = [
    "METRIC_COLUMNS",
    "REPORT_COLUMNS",
    "MetricsReport",
    "acc4_overall",
    "acc4_per_emotion",
    "compute_metrics",
    "label_class_distribution",
    "length_summary",
    "mae_overall",
    "mae_per_emotion",
    "metrics_frame",
    "round_class",
    "round_classes",
    "write_metrics_csv",
]
