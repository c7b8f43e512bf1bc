"""
Evaluation harness for snapshot classifiers.

Trace-level stratified folds, pooled precision / recall / F-measure,
the experimental protocols and the report writers.
"""

from .folds import MIN_FOLDS, stratified_trace_folds
from .metrics import confusion, flip, metric_row, per_class_metrics, prf, weighted_prf
from .protocol import (
    DEFAULT_FOLDS,
    DEFAULT_GROWTH_FRACTIONS,
    DEFAULT_TEST_FRACTION,
    WITH_META,
    WITHOUT_META,
    EvalDataset,
    ablation_compare,
    cross_event_sweep,
    cross_event_test,
    cross_validate,
    holdout_evaluate,
    measure_latency,
    merge_reports,
    sample_growth_study,
    score_table,
    time_sweep,
    train_on_table,
)
from .reports import (
    format_growth,
    format_monitor,
    format_table,
    plot_rows,
    verdict_lines,
    write_growth_csv,
    write_json,
    write_plot_csv,
    write_verdicts,
)

__all__ = [
    "DEFAULT_FOLDS",
    "DEFAULT_GROWTH_FRACTIONS",
    "DEFAULT_TEST_FRACTION",
    "MIN_FOLDS",
    "WITHOUT_META",
    "WITH_META",
    "EvalDataset",
    "ablation_compare",
    "confusion",
    "cross_event_sweep",
    "cross_event_test",
    "cross_validate",
    "flip",
    "format_growth",
    "format_monitor",
    "format_table",
    "holdout_evaluate",
    "measure_latency",
    "merge_reports",
    "metric_row",
    "per_class_metrics",
    "plot_rows",
    "prf",
    "sample_growth_study",
    "score_table",
    "stratified_trace_folds",
    "time_sweep",
    "train_on_table",
    "verdict_lines",
    "weighted_prf",
    "write_growth_csv",
    "write_json",
    "write_plot_csv",
    "write_verdicts",
]
