"""
Online early-kill monitoring.

The monitor pulls snapshots of one trace from a stream, classifies each
as it arrives and stops at the first snapshot whose malicious
probability exceeds the threshold. Stopping means no further snapshot
is pulled from the stream; the verdict stands in for killing the
connection.
"""

from __future__ import annotations

import logging
import statistics
import time
from collections.abc import Iterable, Iterator

import numpy as np

from driveby_sentinel.classifiers.base import TrainedModel, predict_proba, predict_proba_matrix
from driveby_sentinel.errors import ConfigError, InsufficientDataError, OutOfOrderSnapshotError
from driveby_sentinel.evaluation.metrics import confusion, prf
from driveby_sentinel.features.extraction import encode, encode_table, tabulate
from driveby_sentinel.models.reports import (
    BatchMonitorReport,
    Decision,
    StepDistribution,
    TraceVerdict,
    Verdict,
)
from driveby_sentinel.models.types import Label, ObservationConfig, Snapshot, UrlTrace

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5
DEFAULT_DEADLINE_MS = 100.0
DEFAULT_GRACE_STEPS = 1


def _check_threshold(threshold: float) -> None:
    if not 0.0 <= threshold <= 1.0:
        msg = f"Kill threshold must lie in [0, 1], got {threshold}"
        raise ConfigError(msg)


def _verdict(
    trace_id: str,
    decision: Decision,
    distributions: list[StepDistribution],
    cfg: ObservationConfig,
) -> Verdict:
    last = distributions[-1]
    verdict = Verdict(
        trace_id=trace_id,
        decision=decision,
        decision_step=last.step,
        seconds_after_click=cfg.seconds_after_click(last.step),
        p_malicious=last.p_malicious,
        distributions=tuple(distributions),
    )
    logger.info(
        "Trace %s %s at step %d (%.1fs after click, p_malicious=%.4f)",
        verdict.trace_id,
        verdict.decision.value,
        verdict.decision_step,
        verdict.seconds_after_click,
        verdict.p_malicious,
    )
    return verdict


def monitor(
    stream: Iterable[Snapshot],
    model: TrainedModel,
    threshold: float = DEFAULT_THRESHOLD,
    cfg: ObservationConfig | None = None,
    *,
    deadline_ms: float = DEFAULT_DEADLINE_MS,
) -> Verdict:
    """Watch one trace and stop at its first malicious snapshot.

    Args:
        stream: Snapshots of a single trace in step order
        model: Trained model applied to every snapshot
        threshold: Kill when p_malicious exceeds this value
        cfg: Observation protocol (for seconds after click)
        deadline_ms: Per-snapshot inference budget; overruns are logged

    Returns:
        killed_malicious at the first flagged step, otherwise
        completed_benign at the last step of the stream

    Raises:
        OutOfOrderSnapshotError: steps not strictly increasing, or mixed traces
        SchemaMismatchError: a snapshot does not carry the model's fields
        InsufficientDataError: the stream is empty
    """
    _check_threshold(threshold)
    cfg = cfg or ObservationConfig()
    distributions: list[StepDistribution] = []
    trace_id: str | None = None

    for snapshot in stream:
        if trace_id is None:
            trace_id = snapshot.trace_id
        elif snapshot.trace_id != trace_id:
            msg = f"Snapshot of trace {snapshot.trace_id} in the stream of {trace_id}"
            raise OutOfOrderSnapshotError(msg)
        if distributions and snapshot.time_step <= distributions[-1].step:
            msg = (
                f"Trace {trace_id}: step {snapshot.time_step} arrived after "
                f"step {distributions[-1].step}"
            )
            raise OutOfOrderSnapshotError(msg)

        start = time.perf_counter()
        distribution = predict_proba(model, encode(snapshot.without_label(), model.schema))
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        if elapsed_ms > deadline_ms:
            logger.warning(
                "Trace %s step %d: inference took %.1f ms (budget %.1f ms)",
                trace_id,
                snapshot.time_step,
                elapsed_ms,
                deadline_ms,
            )

        distributions.append(
            StepDistribution(step=snapshot.time_step, p_malicious=distribution.p_malicious)
        )
        if distribution.p_malicious > threshold:
            return _verdict(trace_id, Decision.KILLED_MALICIOUS, distributions, cfg)

    if trace_id is None:
        msg = "Cannot monitor an empty snapshot stream"
        raise InsufficientDataError(msg)
    if distributions[-1].step < cfg.period_p:
        logger.warning(
            "Trace %s ended at step %d before the observation period (%d)",
            trace_id,
            distributions[-1].step,
            cfg.period_p,
        )
    return _verdict(trace_id, Decision.COMPLETED_BENIGN, distributions, cfg)


def batch_decision(
    trace: UrlTrace,
    model: TrainedModel,
    threshold: float = DEFAULT_THRESHOLD,
    cfg: ObservationConfig | None = None,
) -> Verdict:
    """Stopping rule applied to a whole trace scored in one batch.

    Gives the same decision and step as ``monitor`` on the same trace.
    """
    _check_threshold(threshold)
    cfg = cfg or ObservationConfig()
    if not trace.snapshots:
        msg = f"Trace {trace.trace_id} has no snapshots"
        raise InsufficientDataError(msg)
    table = tabulate([trace])
    p_malicious = predict_proba_matrix(model, encode_table(table, model.schema))[:, 1]
    steps = table.steps
    flagged = np.flatnonzero(p_malicious > threshold)
    stop = int(flagged[0]) if flagged.size else len(steps) - 1
    distributions = [
        StepDistribution(step=int(steps[i]), p_malicious=float(p_malicious[i]))
        for i in range(stop + 1)
    ]
    decision = Decision.KILLED_MALICIOUS if flagged.size else Decision.COMPLETED_BENIGN
    return _verdict(trace.trace_id, decision, distributions, cfg)


def _replay(trace: UrlTrace) -> Iterator[Snapshot]:
    ordered = sorted(trace.snapshots, key=lambda s: s.time_step)
    return (s.without_label() for s in ordered)


def batch_monitor(
    traces: Iterable[UrlTrace],
    model: TrainedModel,
    threshold: float = DEFAULT_THRESHOLD,
    *,
    grace_steps: int = DEFAULT_GRACE_STEPS,
    cfg: ObservationConfig | None = None,
    deadline_ms: float = DEFAULT_DEADLINE_MS,
) -> BatchMonitorReport:
    """Monitor every trace of a labeled set and aggregate early-detection metrics.

    A killed trace counts as a positive. A malicious trace is killed
    before completion when its decision step is at most onset + grace
    (any kill counts when the onset is unknown).
    """
    if grace_steps < 0:
        msg = f"grace_steps must be >= 0, got {grace_steps}"
        raise ConfigError(msg)
    rows: list[TraceVerdict] = []
    for trace in traces:
        verdict = monitor(_replay(trace), model, threshold, cfg, deadline_ms=deadline_ms)
        rows.append(TraceVerdict(verdict=verdict, truth=trace.truth, onset_step=trace.onset_step))
    if not rows:
        msg = "No traces to monitor"
        raise InsufficientDataError(msg)

    y_true = np.array([r.truth.index for r in rows])
    killed = np.array([r.verdict.killed for r in rows])
    counts = confusion(y_true, killed)
    precision, recall, f_measure = prf(counts)

    true_kills = [r for r in rows if r.verdict.killed and r.truth is Label.MALICIOUS]
    onsets = [r.onset_step for r in true_kills if r.onset_step is not None]
    malicious = [r for r in rows if r.truth is Label.MALICIOUS]
    in_time = [
        r
        for r in malicious
        if r.verdict.killed
        and (r.onset_step is None or r.verdict.decision_step <= r.onset_step + grace_steps)
    ]
    report = BatchMonitorReport(
        threshold=threshold,
        grace_steps=grace_steps,
        verdicts=tuple(rows),
        confusion=counts,
        precision=precision,
        recall=recall,
        f_measure=f_measure,
        n_killed=int(killed.sum()),
        mean_decision_step_tp=(
            statistics.fmean(r.verdict.decision_step for r in true_kills) if true_kills else None
        ),
        mean_onset_step_tp=statistics.fmean(onsets) if onsets else None,
        kill_before_completion_rate=len(in_time) / len(malicious) if malicious else 0.0,
    )
    logger.info(
        "Monitored %d traces: %d killed, F=%.4f, kill-before-completion %.3f",
        len(rows),
        report.n_killed,
        report.f_measure,
        report.kill_before_completion_rate,
    )
    return report
