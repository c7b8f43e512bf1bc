"""
Precision, recall and F-measure.

Zero denominators give 0 (precision with no positive predictions, recall
with no positive instances, F when P + R = 0).
"""

from __future__ import annotations

import numpy as np

from driveby_sentinel.models.reports import ClassMetrics, ConfusionCounts, MetricRow
from driveby_sentinel.models.types import Label


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator > 0 else 0.0


def prf(counts: ConfusionCounts) -> tuple[float, float, float]:
    """(precision, recall, F) of the malicious class."""
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    f_measure = _ratio(2 * precision * recall, precision + recall)
    return precision, recall, f_measure


def flip(counts: ConfusionCounts) -> ConfusionCounts:
    """Counts with benign as the positive class."""
    return ConfusionCounts(tp=counts.tn, fp=counts.fn, tn=counts.tp, fn=counts.fp)


def confusion(y_true: np.ndarray, y_pred: np.ndarray) -> ConfusionCounts:
    """Confusion counts of 0/1 labels, malicious (1) positive."""
    truth = np.asarray(y_true, dtype=int)
    pred = np.asarray(y_pred, dtype=int)
    return ConfusionCounts(
        tp=int(((truth == 1) & (pred == 1)).sum()),
        fp=int(((truth == 0) & (pred == 1)).sum()),
        tn=int(((truth == 0) & (pred == 0)).sum()),
        fn=int(((truth == 1) & (pred == 0)).sum()),
    )


def per_class_metrics(counts: ConfusionCounts) -> tuple[ClassMetrics, ClassMetrics]:
    """Benign and malicious metrics, in that order."""
    rows = []
    for label, view in ((Label.BENIGN, flip(counts)), (Label.MALICIOUS, counts)):
        precision, recall, f_measure = prf(view)
        rows.append(
            ClassMetrics(
                label=label,
                precision=precision,
                recall=recall,
                f_measure=f_measure,
                support=view.tp + view.fn,
            )
        )
    return rows[0], rows[1]


def weighted_prf(counts: ConfusionCounts) -> tuple[float, float, float]:
    """Support-weighted average of the per-class metrics."""
    total = counts.total
    if total == 0:
        return 0.0, 0.0, 0.0
    classes = per_class_metrics(counts)
    return (
        sum(c.precision * c.support for c in classes) / total,
        sum(c.recall * c.support for c in classes) / total,
        sum(c.f_measure * c.support for c in classes) / total,
    )


def metric_row(
    algorithm: str,
    upto_step: int,
    counts: ConfusionCounts,
    *,
    variant: str = "default",
    n_traces: int = 0,
) -> MetricRow:
    """Report row for pooled confusion counts."""
    precision, recall, f_measure = weighted_prf(counts)
    return MetricRow(
        algorithm=algorithm,
        variant=variant,
        upto_step=upto_step,
        precision=precision,
        recall=recall,
        f_measure=f_measure,
        per_class=per_class_metrics(counts),
        confusion=counts,
        n_traces=n_traces,
    )
