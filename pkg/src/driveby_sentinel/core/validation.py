"""
Trace validation.

validate_trace collects every invariant violation of a UrlTrace as data;
it never raises. The generator's output, imported files and store
appends all pass through it.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from driveby_sentinel.models.schema import (
    COUNTER_FIELDS,
    FIELDS_BY_NAME,
    MACHINE_FIELD_COUNT,
    PERCENT_FIELDS,
    TWEET_FIELD_COUNT,
    FieldKind,
)
from driveby_sentinel.models.types import (
    Label,
    MetricValue,
    ObservationConfig,
    Snapshot,
    TraceViolation,
    UrlTrace,
    ValidationResult,
)

if TYPE_CHECKING:
    from collections.abc import Iterable

logger = logging.getLogger(__name__)

PERCENT_MAX = 100.0


def _is_number(value: MetricValue) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def validate_snapshot(snapshot: Snapshot) -> list[TraceViolation]:
    """Per-snapshot checks: field sets, value kinds and ranges."""
    violations: list[TraceViolation] = []
    step = snapshot.time_step

    for group, expected in (
        (snapshot.machine, MACHINE_FIELD_COUNT),
        (snapshot.tweet, TWEET_FIELD_COUNT),
    ):
        missing = group.missing_fields()
        unexpected = group.unexpected_fields()
        if missing or unexpected or group.field_count != expected:
            name = "machine" if group is snapshot.machine else "tweet"
            violations.append(
                TraceViolation(
                    code="field_count",
                    message=(
                        f"field-count mismatch: {name} has {group.field_count} "
                        f"fields, expected {expected} at step {step}"
                        + (f" (missing {', '.join(missing)})" if missing else "")
                        + (f" (unexpected {', '.join(unexpected)})" if unexpected else "")
                    ),
                    step=step,
                )
            )

    for name, value in (*snapshot.machine.values.items(), *snapshot.tweet.values.items()):
        field_spec = FIELDS_BY_NAME.get(name)
        if field_spec is None or value is None:
            continue
        if field_spec.kind is FieldKind.BOOLEAN:
            if not isinstance(value, bool):
                violations.append(
                    TraceViolation(
                        code="type",
                        message=f"type: {name} expects a boolean at step {step}",
                        step=step,
                        field=name,
                    )
                )
        elif field_spec.kind is FieldKind.NUMERIC:
            if not _is_number(value):
                violations.append(
                    TraceViolation(
                        code="type",
                        message=f"type: {name} expects a number at step {step}",
                        step=step,
                        field=name,
                    )
                )
            elif value < 0:  # type: ignore[operator]
                violations.append(
                    TraceViolation(
                        code="negative",
                        message=f"negative value: {name}={value} at step {step}",
                        step=step,
                        field=name,
                    )
                )
            elif name in PERCENT_FIELDS and value > PERCENT_MAX:  # type: ignore[operator]
                violations.append(
                    TraceViolation(
                        code="percent_range",
                        message=f"percent out of range: {name}={value} at step {step}",
                        step=step,
                        field=name,
                    )
                )
    return violations


def _step_violations(
    steps: list[int], cfg: ObservationConfig
) -> Iterable[TraceViolation]:
    if len(steps) != cfg.period_p:
        yield TraceViolation(
            code="length",
            message=f"length: {len(steps)} snapshots, expected {cfg.period_p}",
        )
    if steps != sorted(steps):
        yield TraceViolation(code="order", message="snapshots not sorted by time_step")
    seen: set[int] = set()
    for step in steps:
        if step in seen:
            yield TraceViolation(
                code="duplicate", message=f"duplicate step {step}", step=step
            )
        if step < 1 or step > cfg.period_p:
            yield TraceViolation(
                code="step_range",
                message=f"step {step} outside [1, {cfg.period_p}]",
                step=step,
            )
        seen.add(step)
    last = max(seen, default=0)
    for step in range(1, cfg.period_p + 1):
        if step in seen:
            continue
        message = f"gap at step {step}" if step < last else f"missing step {step}"
        yield TraceViolation(code="gap", message=message, step=step)


def _counter_violations(ordered: list[Snapshot]) -> Iterable[TraceViolation]:
    for name in COUNTER_FIELDS:
        previous: float | None = None
        for snapshot in ordered:
            value = snapshot.machine.get(name)
            if not _is_number(value):
                continue
            current = float(value)  # type: ignore[arg-type]
            if previous is not None and current < previous:
                yield TraceViolation(
                    code="counter_regression",
                    message=(
                        f"counter regression: {name} at step {snapshot.time_step}"
                    ),
                    step=snapshot.time_step,
                    field=name,
                )
            previous = current


def validate_trace(trace: UrlTrace, cfg: ObservationConfig) -> ValidationResult:
    """Every invariant violation of a trace; ok iff none.

    Args:
        trace: Trace to check
        cfg: Observation protocol the trace should follow

    Returns:
        ValidationResult listing violations in discovery order
    """
    violations: list[TraceViolation] = []
    steps = [s.time_step for s in trace.snapshots]
    violations.extend(_step_violations(steps, cfg))

    ordered = sorted(trace.snapshots, key=lambda s: s.time_step)
    first_tweet = ordered[0].tweet.values if ordered else None
    for snapshot in ordered:
        if snapshot.trace_id != trace.trace_id:
            violations.append(
                TraceViolation(
                    code="trace_id",
                    message=(
                        f"snapshot at step {snapshot.time_step} belongs to "
                        f"{snapshot.trace_id}"
                    ),
                    step=snapshot.time_step,
                )
            )
        if snapshot.label is not None and snapshot.label != trace.truth:
            violations.append(
                TraceViolation(
                    code="label",
                    message=(
                        f"label {snapshot.label.value} at step {snapshot.time_step} "
                        f"disagrees with truth {trace.truth.value}"
                    ),
                    step=snapshot.time_step,
                )
            )
        if snapshot.tweet.values != first_tweet:
            violations.append(
                TraceViolation(
                    code="tweet_constancy",
                    message=f"tweet metadata changes at step {snapshot.time_step}",
                    step=snapshot.time_step,
                )
            )
        violations.extend(validate_snapshot(snapshot))

    violations.extend(_counter_violations(ordered))

    if trace.onset_step is not None:
        if trace.truth is Label.BENIGN:
            violations.append(
                TraceViolation(code="onset", message="benign trace carries an onset_step")
            )
        if not 1 <= trace.onset_step <= cfg.period_p:
            violations.append(
                TraceViolation(
                    code="onset",
                    message=f"onset_step {trace.onset_step} outside [1, {cfg.period_p}]",
                )
            )
    for event in trace.events:
        if event.time_step > cfg.period_p:
            violations.append(
                TraceViolation(
                    code="event_step",
                    message=(
                        f"{event.kind.value} event at step {event.time_step} "
                        f"outside [1, {cfg.period_p}]"
                    ),
                    step=event.time_step,
                )
            )

    result = ValidationResult(trace_id=trace.trace_id, violations=tuple(violations))
    if not result.ok:
        logger.debug(
            "Trace %s has %d violations", trace.trace_id, len(result.violations)
        )
    return result
