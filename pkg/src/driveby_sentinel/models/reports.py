"""
Result models for evaluation runs and the early-kill sentinel.

Reports are plain pydantic models so they can be written as JSON, queried
with JSONPath (see ``selectors``) and compared byte for byte across runs.
"""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from .types import Label


class ConfusionCounts(BaseModel):
    """Binary confusion counts, malicious is the positive class."""

    model_config = ConfigDict(frozen=True)

    tp: int = Field(default=0, ge=0)
    fp: int = Field(default=0, ge=0)
    tn: int = Field(default=0, ge=0)
    fn: int = Field(default=0, ge=0)

    @property
    def total(self) -> int:
        """Number of evaluated instances."""
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: ConfusionCounts) -> ConfusionCounts:
        return ConfusionCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
            fn=self.fn + other.fn,
        )


class ClassMetrics(BaseModel):
    """Precision, recall and F-measure for one class."""

    model_config = ConfigDict(frozen=True)

    label: Label
    precision: float = Field(ge=0.0, le=1.0)
    recall: float = Field(ge=0.0, le=1.0)
    f_measure: float = Field(ge=0.0, le=1.0)
    support: int = Field(ge=0, description="True instances of this class")


class MetricRow(BaseModel):
    """Metrics for one (algorithm, variant, window) cell of a report."""

    model_config = ConfigDict(frozen=True)

    algorithm: str
    variant: str = Field(default="default", description="e.g. with_meta, before")
    upto_step: int = Field(ge=1)
    precision: float = Field(ge=0.0, le=1.0, description="Support-weighted precision")
    recall: float = Field(ge=0.0, le=1.0, description="Support-weighted recall")
    f_measure: float = Field(ge=0.0, le=1.0, description="Support-weighted F-measure")
    per_class: tuple[ClassMetrics, ...] = Field(default=())
    confusion: ConfusionCounts = Field(default_factory=ConfusionCounts)
    n_traces: int = Field(default=0, ge=0)


class FoldAudit(BaseModel):
    """Which traces each fold tested on and what its training saw."""

    model_config = ConfigDict(frozen=True)

    fold: int = Field(ge=0)
    test_trace_ids: tuple[str, ...]
    train_trace_count: int = Field(ge=0)
    schema_trace_count: int = Field(
        ge=0, description="Traces whose snapshots built the encoding tables"
    )
    train_test_overlap: int = Field(
        default=0, ge=0, description="Test traces seen in training or schema building"
    )


class EvalReport(BaseModel):
    """Metric table plus the metadata needed to reproduce it."""

    model_config = ConfigDict(frozen=True)

    experiment: str = Field(description="cv, sweep, holdout, cross_event, cycle, ...")
    dataset_ids: tuple[str, ...] = Field(default=())
    seed: int | None = Field(default=None)
    folds: int | None = Field(default=None, description="k for cross-validation")
    fold_seeds: tuple[int, ...] = Field(default=())
    include_tweet_meta: bool = Field(default=True)
    sample_fraction: float | None = Field(default=None)
    rows: tuple[MetricRow, ...] = Field(default=())
    fold_audit: tuple[FoldAudit, ...] = Field(default=())
    inference_ms_per_snapshot: float | None = Field(
        default=None, description="Wall-clock timing, excluded from report files"
    )

    def row(self, algorithm: str, upto_step: int, variant: str | None = None) -> MetricRow:
        """The single row for a cell; KeyError when absent."""
        for row in self.rows:
            if row.algorithm == algorithm and row.upto_step == upto_step:
                if variant is None or row.variant == variant:
                    return row
        msg = f"No row for {algorithm} at step {upto_step} (variant {variant})"
        raise KeyError(msg)

    def f_curve(self, algorithm: str, variant: str | None = None) -> list[float]:
        """F-measures of one algorithm ordered by window end."""
        rows = [
            r
            for r in self.rows
            if r.algorithm == algorithm and (variant is None or r.variant == variant)
        ]
        return [r.f_measure for r in sorted(rows, key=lambda r: r.upto_step)]


class StepDelta(BaseModel):
    """With-minus-without metadata F at one window end."""

    model_config = ConfigDict(frozen=True)

    algorithm: str
    upto_step: int
    f_with_meta: float
    f_without_meta: float
    delta: float


class AblationReport(BaseModel):
    """Paired sweeps that differ only in the tweet-metadata flag."""

    model_config = ConfigDict(frozen=True)

    with_meta: EvalReport
    without_meta: EvalReport
    with_meta_features: int
    without_meta_features: int
    deltas: tuple[StepDelta, ...]


class GrowthRow(BaseModel):
    """One sample fraction of the growth study."""

    model_config = ConfigDict(frozen=True)

    fraction: float = Field(gt=0.0, le=1.0)
    n_traces: int
    n_malicious: int
    folds_used: int | None = Field(
        default=None, description="Folds actually used (reduced for small subsets)"
    )
    cv_f_measure: float | None = Field(
        default=None, description="CV F on the subset; None when CV was impossible"
    )
    unseen_f_measure: float = Field(description="F on the unseen event dataset")


class GrowthReport(BaseModel):
    """Sample-size growth curve: in-event CV F and unseen-event F per fraction."""

    model_config = ConfigDict(frozen=True)

    algorithm: str
    upto_step: int
    seed: int
    dataset_ids: tuple[str, ...]
    rows: tuple[GrowthRow, ...]


class Decision(str, Enum):
    """Outcome of monitoring one trace."""

    KILLED_MALICIOUS = "killed_malicious"
    COMPLETED_BENIGN = "completed_benign"


class StepDistribution(BaseModel):
    """Malicious probability assigned to one consumed snapshot."""

    model_config = ConfigDict(frozen=True)

    step: int
    p_malicious: float


class Verdict(BaseModel):
    """Result of monitoring one trace."""

    model_config = ConfigDict(frozen=True)

    trace_id: str
    decision: Decision
    decision_step: int = Field(ge=1)
    seconds_after_click: float = Field(ge=0.0)
    p_malicious: float = Field(description="Malicious probability at decision_step")
    distributions: tuple[StepDistribution, ...] = Field(default=())

    @property
    def killed(self) -> bool:
        """True for an early kill."""
        return self.decision is Decision.KILLED_MALICIOUS

    def log_record(self) -> dict[str, object]:
        """Fields of one verdict log line."""
        return {
            "trace_id": self.trace_id,
            "decision": self.decision.value,
            "decision_step": self.decision_step,
            "seconds_after_click": self.seconds_after_click,
            "p_malicious": self.p_malicious,
        }


class TraceVerdict(BaseModel):
    """A verdict joined with the trace's ground truth."""

    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    truth: Label
    onset_step: int | None = None


class BatchMonitorReport(BaseModel):
    """Per-trace verdicts plus early-detection aggregates."""

    model_config = ConfigDict(frozen=True)

    threshold: float
    grace_steps: int = Field(description="Kill-before-completion grace in steps")
    verdicts: tuple[TraceVerdict, ...]
    confusion: ConfusionCounts = Field(description="Trace-level, killed = positive")
    precision: float
    recall: float
    f_measure: float
    n_killed: int
    mean_decision_step_tp: float | None = Field(
        default=None, description="Mean decision step over true-positive kills"
    )
    mean_onset_step_tp: float | None = Field(
        default=None, description="Mean onset step over true-positive kills"
    )
    kill_before_completion_rate: float = Field(
        description="Malicious traces killed at or before onset + grace"
    )
