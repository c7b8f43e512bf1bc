"""
Experimental protocols: cross-validation over cumulative windows, time
sweeps, tweet-metadata ablation, cross-event testing, the sample-size
growth study and a stratified hold-out.

Every protocol splits at trace level, builds the feature schema on the
training traces only (test traces are passed as exclusions so a leak
raises instead of silently inflating scores) and pools confusion counts
across folds. Each fold's test trace ids are logged at DEBUG and kept in
the report's fold audit.
"""

from __future__ import annotations

import logging
import statistics
import time
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from driveby_sentinel.classifiers.base import TrainedModel, predict_proba, predict_proba_matrix
from driveby_sentinel.classifiers.factory import algorithm_name, train_model
from driveby_sentinel.errors import InsufficientDataError, LeakageError
from driveby_sentinel.features.extraction import (
    FeatureMatrix,
    SnapshotTable,
    build_schema,
    encode_table,
    tabulate,
)
from driveby_sentinel.models.config import TrainConfig
from driveby_sentinel.models.reports import (
    AblationReport,
    ConfusionCounts,
    EvalReport,
    FoldAudit,
    GrowthReport,
    GrowthRow,
    MetricRow,
    StepDelta,
)
from driveby_sentinel.models.types import Label, ObservationConfig, UrlTrace
from driveby_sentinel.store.snapshot_store import (
    DatasetHandle,
    load_traces,
    nested_fraction_split,
)

from .folds import MIN_FOLDS, stratified_trace_folds
from .metrics import confusion, metric_row

logger = logging.getLogger(__name__)

DEFAULT_FOLDS = 10
DEFAULT_GROWTH_FRACTIONS = (0.01, 0.05, 0.10, 0.25, 0.50, 1.0)
DEFAULT_TEST_FRACTION = 0.3
WITH_META = "with_meta"
WITHOUT_META = "without_meta"


@dataclass(frozen=True)
class EvalDataset:
    """Tabulated traces of one dataset (or view) ready for protocols."""

    dataset_id: str
    table: SnapshotTable
    period_p: int
    event_tags: tuple[str, ...] = ()

    @classmethod
    def from_traces(
        cls,
        traces: Iterable[UrlTrace],
        *,
        dataset_id: str,
        cfg: ObservationConfig | None = None,
    ) -> EvalDataset:
        """Tabulate in-memory traces."""
        items = list(traces)
        period = cfg.period_p if cfg else max((len(t.snapshots) for t in items), default=1)
        tags = tuple(sorted({t.event_tag for t in items}))
        return cls(dataset_id=dataset_id, table=tabulate(items), period_p=period, event_tags=tags)

    @classmethod
    def from_handle(cls, handle: DatasetHandle) -> EvalDataset:
        """Load and tabulate a stored dataset or view."""
        return cls.from_traces(
            load_traces(handle), dataset_id=handle.dataset_id, cfg=handle.observation
        )

    def trace_index(self) -> list[tuple[str, Label]]:
        """(trace_id, truth) per trace in table order."""
        ids, labels = self.table.trace_labels()
        return [(t, Label.from_index(int(y))) for t, y in zip(ids, labels, strict=True)]

    def subset(self, trace_ids: Collection[str], suffix: str) -> EvalDataset:
        """Restriction to some traces."""
        return EvalDataset(
            dataset_id=f"{self.dataset_id}:{suffix}",
            table=self.table.select_traces(trace_ids),
            period_p=self.period_p,
            event_tags=self.event_tags,
        )


def train_on_table(
    table: SnapshotTable,
    config: TrainConfig,
    *,
    dataset_id: str = "adhoc",
    label_generation: int | None = None,
    exclude_trace_ids: Collection[str] = (),
) -> TrainedModel:
    """Build the schema on the window's rows and train the configured model."""
    window = table.window(config.upto_step)
    schema = build_schema(
        window,
        include_tweet_meta=config.include_tweet_meta,
        n_bins=config.identifier_bins,
        exclude_trace_ids=exclude_trace_ids,
    )
    return train_model(
        encode_table(window, schema),
        config,
        dataset_id=dataset_id,
        label_generation=label_generation,
    )


def score_table(model: TrainedModel, table: SnapshotTable, upto_step: int) -> ConfusionCounts:
    """Snapshot-level confusion counts of a model on a window of a table.

    Raises:
        InsufficientDataError: the window holds no snapshot
    """
    window = table.window(upto_step)
    if len(window) == 0:
        msg = f"No snapshots to score up to step {upto_step}"
        raise InsufficientDataError(msg)
    P = predict_proba_matrix(model, encode_table(window, model.schema))
    return confusion(window.labels, P[:, 1] > P[:, 0])


def _fold_split(
    window: SnapshotTable, test_ids: Sequence[str]
) -> tuple[SnapshotTable, SnapshotTable]:
    in_test = np.isin(window.trace_ids, np.array(test_ids, dtype=object))
    return window.select(~in_test), window.select(in_test)


def _cv_rows(
    data: EvalDataset,
    config: TrainConfig,
    folds: list[list[str]],
    steps: Sequence[int],
    variant: str,
) -> tuple[list[MetricRow], list[FoldAudit]]:
    rows: list[MetricRow] = []
    audit: list[FoldAudit] = []
    label = algorithm_name(config.algo)
    n_traces = sum(len(f) for f in folds)
    for step in steps:
        window = data.table.window(step)
        step_config = config.with_step(step)
        pooled = ConfusionCounts()
        for i, fold in enumerate(folds):
            train, test = _fold_split(window, fold)
            model = train_on_table(
                train, step_config, dataset_id=data.dataset_id, exclude_trace_ids=fold
            )
            counts = score_table(model, test, step)
            pooled = pooled + counts
            train_ids = train.trace_id_set()
            overlap = len(train_ids.intersection(fold))
            if step == steps[0]:
                audit.append(
                    FoldAudit(
                        fold=i,
                        test_trace_ids=tuple(fold),
                        train_trace_count=len(train_ids),
                        schema_trace_count=model.schema.source_trace_count,
                        train_test_overlap=overlap,
                    )
                )
                logger.debug("Fold %d test traces: %s", i, ",".join(fold))
            logger.debug(
                "%s step %d fold %d: tp=%d fp=%d tn=%d fn=%d",
                label,
                step,
                i,
                counts.tp,
                counts.fp,
                counts.tn,
                counts.fn,
            )
        row = metric_row(label, step, pooled, variant=variant, n_traces=n_traces)
        logger.info(
            "%s [%s] upto_step=%d F=%.4f (%d snapshots)",
            label,
            variant,
            step,
            row.f_measure,
            pooled.total,
        )
        rows.append(row)
    return rows, audit


def _folds_for(data: EvalDataset, k: int, seed: int) -> list[list[str]]:
    ids, labels = data.table.trace_labels()
    return stratified_trace_folds(ids, labels, k, seed)


def cross_validate(
    data: EvalDataset,
    config: TrainConfig,
    *,
    k: int = DEFAULT_FOLDS,
    seed: int = 0,
    variant: str = "default",
) -> EvalReport:
    """k-fold trace-level CV on the window [1, config.upto_step].

    Raises:
        InsufficientDataError: fewer than k traces in a class
    """
    folds = _folds_for(data, k, seed)
    rows, audit = _cv_rows(data, config, folds, [config.upto_step], variant)
    return EvalReport(
        experiment="cv",
        dataset_ids=(data.dataset_id,),
        seed=seed,
        folds=k,
        fold_seeds=(seed,),
        include_tweet_meta=config.include_tweet_meta,
        rows=tuple(rows),
        fold_audit=tuple(audit),
    )


def time_sweep(
    data: EvalDataset,
    config: TrainConfig,
    *,
    k: int = DEFAULT_FOLDS,
    seed: int = 0,
    steps: Sequence[int] | None = None,
    variant: str = "default",
) -> EvalReport:
    """One cross-validation per window end 1..period_p, sharing the folds."""
    folds = _folds_for(data, k, seed)
    sweep = list(steps) if steps is not None else list(range(1, data.period_p + 1))
    logger.info(
        "Time sweep of %s on %s: steps %s",
        algorithm_name(config.algo),
        data.dataset_id,
        sweep,
    )
    rows, audit = _cv_rows(data, config, folds, sweep, variant)
    return EvalReport(
        experiment="sweep",
        dataset_ids=(data.dataset_id,),
        seed=seed,
        folds=k,
        fold_seeds=(seed,),
        include_tweet_meta=config.include_tweet_meta,
        rows=tuple(rows),
        fold_audit=tuple(audit),
    )


def ablation_compare(
    data: EvalDataset,
    config: TrainConfig,
    *,
    k: int = DEFAULT_FOLDS,
    seed: int = 0,
    steps: Sequence[int] | None = None,
) -> AblationReport:
    """Paired sweeps with and without tweet metadata; identical folds."""
    with_meta = time_sweep(
        data, config.with_tweet_meta(include=True), k=k, seed=seed, steps=steps, variant=WITH_META
    )
    without_meta = time_sweep(
        data,
        config.with_tweet_meta(include=False),
        k=k,
        seed=seed,
        steps=steps,
        variant=WITHOUT_META,
    )
    first = data.table.window(1)
    deltas = tuple(
        StepDelta(
            algorithm=a.algorithm,
            upto_step=a.upto_step,
            f_with_meta=a.f_measure,
            f_without_meta=b.f_measure,
            delta=a.f_measure - b.f_measure,
        )
        for a, b in zip(with_meta.rows, without_meta.rows, strict=True)
    )
    return AblationReport(
        with_meta=with_meta,
        without_meta=without_meta,
        with_meta_features=build_schema(first, include_tweet_meta=True).dimension,
        without_meta_features=build_schema(first, include_tweet_meta=False).dimension,
        deltas=deltas,
    )


def _cross_event_counts(
    train: EvalDataset,
    test: EvalDataset,
    config: TrainConfig,
    *,
    allow_overlap: bool,
) -> tuple[ConfusionCounts, FoldAudit]:
    test_ids = test.table.trace_id_set()
    train_ids = train.table.trace_id_set()
    overlap = train_ids & test_ids
    if overlap and not allow_overlap:
        msg = (
            f"{len(overlap)} trace ids appear in both {train.dataset_id} and "
            f"{test.dataset_id}"
        )
        raise LeakageError(msg)
    shared_tags = set(train.event_tags) & set(test.event_tags)
    if shared_tags and not allow_overlap:
        logger.warning("Cross-event datasets share event tags: %s", sorted(shared_tags))
    model = train_on_table(
        train.table,
        config,
        dataset_id=train.dataset_id,
        exclude_trace_ids=() if allow_overlap else test_ids,
    )
    counts = score_table(model, test.table, config.upto_step)
    audit = FoldAudit(
        fold=0,
        test_trace_ids=tuple(sorted(test_ids)),
        train_trace_count=len(train_ids),
        schema_trace_count=model.schema.source_trace_count,
        train_test_overlap=len(overlap),
    )
    return counts, audit


def cross_event_test(
    train: EvalDataset,
    test: EvalDataset,
    config: TrainConfig,
    *,
    allow_overlap: bool = False,
    variant: str = "default",
) -> EvalReport:
    """Train on one event's traces, score on another's untouched traces.

    Raises:
        LeakageError: the datasets share trace ids (unless allow_overlap)
    """
    counts, audit = _cross_event_counts(train, test, config, allow_overlap=allow_overlap)
    row = metric_row(
        algorithm_name(config.algo),
        config.upto_step,
        counts,
        variant=variant,
        n_traces=len(audit.test_trace_ids),
    )
    logger.info(
        "Cross-event %s -> %s: %s F=%.4f",
        train.dataset_id,
        test.dataset_id,
        row.algorithm,
        row.f_measure,
    )
    return EvalReport(
        experiment="cross_event",
        dataset_ids=(train.dataset_id, test.dataset_id),
        seed=config.seed,
        include_tweet_meta=config.include_tweet_meta,
        rows=(row,),
        fold_audit=(audit,),
    )


def cross_event_sweep(
    train: EvalDataset,
    test: EvalDataset,
    config: TrainConfig,
    *,
    steps: Sequence[int] | None = None,
    allow_overlap: bool = False,
    variant: str = "default",
) -> EvalReport:
    """cross_event_test at every window end (unseen-event curve)."""
    sweep = list(steps) if steps is not None else list(range(1, train.period_p + 1))
    rows = []
    audit: tuple[FoldAudit, ...] = ()
    for step in sweep:
        report = cross_event_test(
            train, test, config.with_step(step), allow_overlap=allow_overlap, variant=variant
        )
        rows.extend(report.rows)
        audit = audit or report.fold_audit
    return EvalReport(
        experiment="cross_event_sweep",
        dataset_ids=(train.dataset_id, test.dataset_id),
        seed=config.seed,
        include_tweet_meta=config.include_tweet_meta,
        rows=tuple(rows),
        fold_audit=audit,
    )


def sample_growth_study(
    data: EvalDataset,
    unseen: EvalDataset,
    config: TrainConfig,
    *,
    fractions: Sequence[float] = DEFAULT_GROWTH_FRACTIONS,
    k: int = DEFAULT_FOLDS,
    seed: int = 0,
) -> GrowthReport:
    """In-event CV F and unseen-event F on nested, stratified subsets.

    Subsets with fewer than k traces in a class use as many folds as the
    smallest class allows; below two folds the CV cell is left empty.
    """
    selections = nested_fraction_split(
        data.trace_index(), fractions, seed, source=data.dataset_id
    )
    rows = []
    for fraction, selected in zip(fractions, selections, strict=True):
        subset = data.subset([t for t, _ in selected], f"split({fraction:g},seed={seed})")
        n_malicious = sum(1 for _, truth in selected if truth is Label.MALICIOUS)
        smallest = min(n_malicious, len(selected) - n_malicious)
        folds_used = min(k, smallest)
        cv_f: float | None = None
        if folds_used >= MIN_FOLDS:
            if folds_used < k:
                logger.warning(
                    "Subset %.2f has %d traces in its smallest class; using %d folds",
                    fraction,
                    smallest,
                    folds_used,
                )
            cv = cross_validate(subset, config, k=folds_used, seed=seed)
            cv_f = cv.rows[0].f_measure
        else:
            logger.warning("Subset %.2f too small for cross-validation", fraction)
            folds_used = 0
        unseen_report = cross_event_test(subset, unseen, config)
        rows.append(
            GrowthRow(
                fraction=fraction,
                n_traces=len(selected),
                n_malicious=n_malicious,
                folds_used=folds_used or None,
                cv_f_measure=cv_f,
                unseen_f_measure=unseen_report.rows[0].f_measure,
            )
        )
        logger.info(
            "Growth %.2f: %d traces, CV F=%s, unseen F=%.4f",
            fraction,
            len(selected),
            "n/a" if cv_f is None else f"{cv_f:.4f}",
            rows[-1].unseen_f_measure,
        )
    return GrowthReport(
        algorithm=algorithm_name(config.algo),
        upto_step=config.upto_step,
        seed=seed,
        dataset_ids=(data.dataset_id, unseen.dataset_id),
        rows=tuple(rows),
    )


def holdout_evaluate(
    data: EvalDataset,
    config: TrainConfig,
    *,
    test_fraction: float = DEFAULT_TEST_FRACTION,
    seed: int = 0,
    variant: str = "default",
) -> EvalReport:
    """Stratified trace-level hold-out: train on the rest, score the held-out traces."""
    (held_out,) = nested_fraction_split(
        data.trace_index(), [test_fraction], seed, source=data.dataset_id
    )
    test_ids = {t for t, _ in held_out}
    train_ids = [t for t, _ in data.trace_index() if t not in test_ids]
    train = data.subset(train_ids, f"train(seed={seed})")
    test = data.subset(test_ids, f"test({test_fraction:g},seed={seed})")
    counts, audit = _cross_event_counts(train, test, config, allow_overlap=False)
    row = metric_row(
        algorithm_name(config.algo),
        config.upto_step,
        counts,
        variant=variant,
        n_traces=len(test_ids),
    )
    return EvalReport(
        experiment="holdout",
        dataset_ids=(data.dataset_id,),
        seed=seed,
        include_tweet_meta=config.include_tweet_meta,
        sample_fraction=test_fraction,
        rows=(row,),
        fold_audit=(audit,),
    )


def merge_reports(reports: Sequence[EvalReport], *, experiment: str | None = None) -> EvalReport:
    """One report holding the rows of several (metadata from the first)."""
    if not reports:
        msg = "Nothing to merge"
        raise InsufficientDataError(msg)
    first = reports[0]
    return first.model_copy(
        update={
            "experiment": experiment or first.experiment,
            "rows": tuple(row for report in reports for row in report.rows),
        }
    )


def measure_latency(model: TrainedModel, data: FeatureMatrix, *, repeats: int = 200) -> float:
    """Median wall-clock milliseconds of single-snapshot predict_proba."""
    if len(data) == 0:
        msg = "Latency measurement needs at least one encoded snapshot"
        raise InsufficientDataError(msg)
    timings = []
    for i in range(repeats):
        vector = data.vector(i % len(data))
        start = time.perf_counter()
        predict_proba(model, vector)
        timings.append((time.perf_counter() - start) * 1000.0)
    return statistics.median(timings)
