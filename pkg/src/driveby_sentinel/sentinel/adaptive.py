"""
Feed-forward retraining cycle.

One cycle advances the exclusion-rule generation, ingests traces labeled
under the new rules into the store, retrains on everything stored and
compares the old and new model on a fresh batch of current-generation
traces.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from driveby_sentinel.classifiers.base import TrainedModel
from driveby_sentinel.classifiers.factory import algorithm_name
from driveby_sentinel.evaluation.metrics import metric_row
from driveby_sentinel.evaluation.protocol import score_table, train_on_table
from driveby_sentinel.features.extraction import tabulate
from driveby_sentinel.models.config import CycleConfig, TrainConfig
from driveby_sentinel.models.reports import EvalReport
from driveby_sentinel.models.types import ExclusionRuleSet
from driveby_sentinel.store.snapshot_store import (
    DatasetHandle,
    DatasetProvenance,
    append_traces,
    load_traces,
    trace_index,
)
from driveby_sentinel.synthesis.generator import generate_dataset
from driveby_sentinel.synthesis.oracle import advance_rule_generation
from driveby_sentinel.synthesis.profiles import ProfileSet

logger = logging.getLogger(__name__)

BEFORE = "before"
AFTER = "after"


@dataclass(frozen=True)
class CycleOutcome:
    """Result of one retraining cycle."""

    rules: ExclusionRuleSet
    model: TrainedModel
    previous_model: TrainedModel
    report: EvalReport
    handle: DatasetHandle


def next_trace_index(handle: DatasetHandle, event_tag: str) -> int:
    """First unused generator index for an event tag in the store."""
    pattern = re.compile(rf"^{re.escape(event_tag)}-(\d+)$")
    used = [int(m.group(1)) for t, _ in trace_index(handle) if (m := pattern.match(t))]
    return max(used, default=-1) + 1


def adaptive_cycle(
    handle: DatasetHandle,
    rules: ExclusionRuleSet,
    config: TrainConfig,
    cycle: CycleConfig,
    profiles: ProfileSet,
    *,
    model: TrainedModel | None = None,
) -> CycleOutcome:
    """Run one feed-forward cycle against a writable store.

    Args:
        handle: Store holding traces labeled under ``rules``
        rules: Current exclusion-rule generation
        config: Algorithm and hyperparameters (retraining uses them unchanged)
        cycle: Cycle sizes, seed and evaluation batch
        profiles: Behavior profiles for the generator
        model: Model currently deployed; trained from the store when omitted

    Returns:
        New rules, retrained model, the model it replaces and a report with
        "before" and "after" rows on the fresh evaluation batch
    """
    previous = model or train_on_table(
        tabulate(load_traces(handle)),
        config,
        dataset_id=handle.dataset_id,
        label_generation=rules.version,
    )
    advanced = advance_rule_generation(rules, cycle.seed)
    start = next_trace_index(handle, cycle.event_tag)

    if cycle.n_new_traces > 0:
        batch = generate_dataset(
            cycle.n_new_traces,
            cycle.malicious_fraction,
            profiles,
            handle.observation,
            cycle.seed,
            event_tag=cycle.event_tag,
            rules=advanced,
            tweet_separation=cycle.tweet_separation,
            start_index=start,
        )
        handle = append_traces(
            handle,
            batch.traces,
            provenance=DatasetProvenance(
                source="adaptive_cycle",
                seed=cycle.seed,
                details={"generation": advanced.version, "n_traces": cycle.n_new_traces},
            ),
        )
    else:
        logger.info("Cycle ingests no traces; retraining on the unchanged store")

    retrained = train_on_table(
        tabulate(load_traces(handle)),
        config,
        dataset_id=handle.dataset_id,
        label_generation=advanced.version,
    )

    fresh = generate_dataset(
        cycle.eval_n_traces,
        cycle.malicious_fraction,
        profiles,
        handle.observation,
        cycle.seed,
        event_tag=cycle.event_tag,
        rules=advanced,
        tweet_separation=cycle.tweet_separation,
        profile_names=cycle.eval_profiles,
        start_index=start + cycle.n_new_traces,
    )
    table = tabulate(fresh.traces)
    name = algorithm_name(config.algo)
    rows = tuple(
        metric_row(
            name,
            config.upto_step,
            score_table(m, table, config.upto_step),
            variant=variant,
            n_traces=len(fresh.traces),
        )
        for variant, m in ((BEFORE, previous), (AFTER, retrained))
    )
    report = EvalReport(
        experiment="cycle",
        dataset_ids=(handle.dataset_id, f"fresh(gen={advanced.version},seed={cycle.seed})"),
        seed=cycle.seed,
        include_tweet_meta=config.include_tweet_meta,
        rows=rows,
    )
    logger.info(
        "Cycle to generation %d: F before %.4f, after %.4f",
        advanced.version,
        rows[0].f_measure,
        rows[1].f_measure,
    )
    return CycleOutcome(
        rules=advanced, model=retrained, previous_model=previous, report=report, handle=handle
    )
