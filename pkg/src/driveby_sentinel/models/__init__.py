"""
Data models for drive-by-download traces.

This package provides Pydantic models for snapshots, traces, labeling
rules, configuration and results, plus the published field catalogue.
"""

from .config import (
    BayesParams,
    CycleConfig,
    MlpParams,
    ModelKind,
    RunConfig,
    RunManifest,
    TrainConfig,
    TreeParams,
)
from .reports import (
    AblationReport,
    BatchMonitorReport,
    ClassMetrics,
    ConfusionCounts,
    Decision,
    EvalReport,
    FoldAudit,
    GrowthReport,
    GrowthRow,
    MetricRow,
    StepDelta,
    StepDistribution,
    TraceVerdict,
    Verdict,
)
from .schema import (
    ALL_FIELDS,
    FIELDS_BY_NAME,
    MACHINE_FIELD_NAMES,
    TWEET_FIELD_NAMES,
    Channel,
    FieldKind,
    FieldSource,
    FieldSpec,
)
from .types import (
    ClassDistribution,
    EventKind,
    ExclusionRule,
    ExclusionRuleSet,
    Label,
    LowLevelEvent,
    MachineMetrics,
    ObservationConfig,
    Snapshot,
    TraceViolation,
    TweetMeta,
    UrlTrace,
    ValidationResult,
)

__all__ = [
    "ALL_FIELDS",
    "FIELDS_BY_NAME",
    "MACHINE_FIELD_NAMES",
    "TWEET_FIELD_NAMES",
    "AblationReport",
    "BatchMonitorReport",
    "BayesParams",
    "Channel",
    "ClassDistribution",
    "ClassMetrics",
    "ConfusionCounts",
    "CycleConfig",
    "Decision",
    "EvalReport",
    "EventKind",
    "ExclusionRule",
    "ExclusionRuleSet",
    "FieldKind",
    "FieldSource",
    "FieldSpec",
    "FoldAudit",
    "GrowthReport",
    "GrowthRow",
    "Label",
    "LowLevelEvent",
    "MachineMetrics",
    "MetricRow",
    "MlpParams",
    "ModelKind",
    "ObservationConfig",
    "RunConfig",
    "RunManifest",
    "Snapshot",
    "StepDelta",
    "StepDistribution",
    "TraceVerdict",
    "TraceViolation",
    "TrainConfig",
    "TreeParams",
    "TweetMeta",
    "UrlTrace",
    "ValidationResult",
    "Verdict",
]
