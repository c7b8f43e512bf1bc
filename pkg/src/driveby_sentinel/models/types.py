"""
Core domain models for drive-by-download traces using Pydantic.

Provides immutable data models for observation settings, per-second
snapshots, URL interaction traces, sandbox low-level events and the
exclusion rule sets that label them, with JSON serialization support.
"""

from __future__ import annotations

from enum import Enum
from fnmatch import fnmatchcase
from typing import ClassVar

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .schema import MACHINE_FIELD_NAMES, TWEET_FIELD_NAMES

MetricValue = bool | int | float | str | None


class Label(str, Enum):
    """Ground-truth or predicted class of a URL interaction."""

    MALICIOUS = "malicious"
    BENIGN = "benign"

    @property
    def index(self) -> int:
        """Numeric class code: benign=0, malicious=1."""
        return 1 if self is Label.MALICIOUS else 0

    @classmethod
    def from_index(cls, index: int) -> Label:
        """Inverse of `index`."""
        return cls.MALICIOUS if index == 1 else cls.BENIGN


class EventKind(str, Enum):
    """Low-level system change observed by the sandbox."""

    FILE_WRITE = "file_write"
    PROCESS_CREATE = "process_create"
    REGISTRY_WRITE = "registry_write"


class ObservationConfig(BaseModel):
    """Snapshot protocol: one snapshot every interval_t seconds, period_p of them."""

    model_config = ConfigDict(frozen=True)

    interval_t: float = Field(default=1.0, gt=0, description="Seconds between snapshots")
    period_p: int = Field(default=10, ge=1, description="Snapshots per trace")

    def seconds_after_click(self, step: int) -> float:
        """Seconds elapsed since the URL was clicked (step 1 is the click)."""
        return (step - 1) * self.interval_t


class _FieldGroup(BaseModel):
    """Name → value mapping checked against a catalogue by validate_trace."""

    model_config = ConfigDict(frozen=True)

    values: dict[str, MetricValue] = Field(
        default_factory=dict, description="Field values; None marks an absent value"
    )

    _expected: ClassVar[tuple[str, ...]] = ()

    def __getitem__(self, name: str) -> MetricValue:
        return self.values[name]

    def get(self, name: str) -> MetricValue:
        """Value of a field, None when absent or missing."""
        return self.values.get(name)

    @property
    def field_count(self) -> int:
        """Number of fields present in the record."""
        return len(self.values)

    def missing_fields(self) -> list[str]:
        """Catalogue fields not present in the record."""
        return [name for name in self._expected if name not in self.values]

    def unexpected_fields(self) -> list[str]:
        """Record fields not in the catalogue."""
        expected = set(self._expected)
        return sorted(name for name in self.values if name not in expected)


class MachineMetrics(_FieldGroup):
    """The 54 machine-activity metrics of one snapshot."""

    _expected: ClassVar[tuple[str, ...]] = MACHINE_FIELD_NAMES


class TweetMeta(_FieldGroup):
    """The 24 tweet-metadata attributes; constant across a trace."""

    _expected: ClassVar[tuple[str, ...]] = TWEET_FIELD_NAMES


class Snapshot(BaseModel):
    """One per-second observation of a URL interaction."""

    model_config = ConfigDict(frozen=True)

    trace_id: str = Field(description="Owning trace identifier")
    time_step: int = Field(ge=1, description="1-based step; step 1 is the click")
    machine: MachineMetrics = Field(description="Machine-activity metrics")
    tweet: TweetMeta = Field(description="Tweet metadata")
    label: Label | None = Field(
        default=None, description="Class label (training only, absent at inference)"
    )

    @property
    def attribute_count(self) -> int:
        """Machine plus tweet attribute count (78 for a well-formed snapshot)."""
        return self.machine.field_count + self.tweet.field_count

    def without_label(self) -> Snapshot:
        """Copy of this snapshot stripped of its label, as seen at inference."""
        return self.model_copy(update={"label": None})


class LowLevelEvent(BaseModel):
    """A file, process or registry change recorded during a trace."""

    model_config = ConfigDict(frozen=True)

    time_step: int = Field(ge=1, description="Step at which the change happened")
    kind: EventKind = Field(description="Kind of system change")
    target: str = Field(description="File path, process image or registry key")


class ExclusionRule(BaseModel):
    """A (kind, target-pattern) pair; a matching event marks a URL malicious."""

    model_config = ConfigDict(frozen=True)

    kind: EventKind = Field(description="Event kind the rule applies to")
    pattern: str = Field(description="Shell-style pattern over the event target")

    def matches(self, event: LowLevelEvent) -> bool:
        """Whether the event is covered by this rule."""
        return event.kind == self.kind and fnmatchcase(event.target, self.pattern)


class ExclusionRuleSet(BaseModel):
    """Versioned exclusion list, the labeling oracle of the sandbox."""

    model_config = ConfigDict(frozen=True)

    version: int = Field(ge=1, description="Rule generation")
    rules: tuple[ExclusionRule, ...] = Field(description="Rules of this generation")

    @field_validator("rules")
    @classmethod
    def require_rules(cls, v: tuple[ExclusionRule, ...]) -> tuple[ExclusionRule, ...]:
        """A rule set is never empty."""
        if not v:
            msg = "An exclusion rule set needs at least one rule"
            raise ValueError(msg)
        return v


class UrlTrace(BaseModel):
    """Ordered timeline of snapshots for one URL interaction."""

    model_config = ConfigDict(frozen=True)

    trace_id: str = Field(description="Unique trace identifier")
    event_tag: str = Field(description="Collection event, e.g. 'euro2016-like'")
    snapshots: tuple[Snapshot, ...] = Field(description="Snapshots ordered by step")
    truth: Label = Field(description="Ground-truth label from the oracle")
    onset_step: int | None = Field(
        default=None, description="Step at which payload activity begins (synthetic)"
    )
    label_generation: int | None = Field(
        default=None, description="Exclusion rule generation used for labeling"
    )
    events: tuple[LowLevelEvent, ...] = Field(
        default=(), description="Low-level sandbox events, time ordered"
    )

    def step(self, time_step: int) -> Snapshot:
        """Snapshot at a given step."""
        for snapshot in self.snapshots:
            if snapshot.time_step == time_step:
                return snapshot
        msg = f"Trace {self.trace_id} has no step {time_step}"
        raise KeyError(msg)


class TraceViolation(BaseModel):
    """One invariant violation found in a trace."""

    model_config = ConfigDict(frozen=True)

    code: str = Field(description="Violation category")
    message: str = Field(description="Human-readable description")
    step: int | None = Field(default=None, description="Offending step, if any")
    field: str | None = Field(default=None, description="Offending field, if any")


class ValidationResult(BaseModel):
    """Outcome of validate_trace: ok iff there are no violations."""

    model_config = ConfigDict(frozen=True)

    trace_id: str = Field(description="Validated trace")
    violations: tuple[TraceViolation, ...] = Field(default=())

    @property
    def ok(self) -> bool:
        """True when the trace satisfies every invariant."""
        return not self.violations

    def messages(self) -> list[str]:
        """Violation messages in discovery order."""
        return [v.message for v in self.violations]


class ClassDistribution(BaseModel):
    """Posterior class distribution for one feature vector."""

    model_config = ConfigDict(frozen=True)

    p_malicious: float = Field(ge=0.0, le=1.0)
    p_benign: float = Field(ge=0.0, le=1.0)

    @property
    def label(self) -> Label:
        """Argmax label; an exact tie resolves to benign."""
        return Label.MALICIOUS if self.p_malicious > self.p_benign else Label.BENIGN
