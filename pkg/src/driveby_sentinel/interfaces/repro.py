"""
End-to-end seeded experiment run.

Generates an in-event and an unseen-event dataset, then runs the time
sweep, the tweet-metadata ablation, the cross-event sweep, a hold-out,
the sample-size growth study and a sentinel batch. Everything under
``reports/`` is a pure function of the plan, so two runs with the same
seed write identical bytes; wall-clock numbers go to ``timing.json``.
"""

from __future__ import annotations

import json
import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from driveby_sentinel.classifiers.serialization import save_model
from driveby_sentinel.errors import ConfigError
from driveby_sentinel.evaluation.protocol import (
    DEFAULT_FOLDS,
    DEFAULT_GROWTH_FRACTIONS,
    DEFAULT_TEST_FRACTION,
    EvalDataset,
    ablation_compare,
    cross_event_sweep,
    holdout_evaluate,
    measure_latency,
    merge_reports,
    sample_growth_study,
    time_sweep,
    train_on_table,
)
from driveby_sentinel.evaluation.reports import (
    format_growth,
    format_monitor,
    format_table,
    write_growth_csv,
    write_json,
    write_plot_csv,
    write_verdicts,
)
from driveby_sentinel.features.extraction import encode_table
from driveby_sentinel.models.config import ModelKind, TrainConfig
from driveby_sentinel.models.types import ObservationConfig
from driveby_sentinel.selectors.jsonpath import ReportSelector
from driveby_sentinel.sentinel.monitor import DEFAULT_THRESHOLD, batch_monitor
from driveby_sentinel.store.snapshot_store import DatasetProvenance, write_dataset
from driveby_sentinel.synthesis.generator import GeneratedDataset, generate_dataset
from driveby_sentinel.synthesis.oracle import save_rules
from driveby_sentinel.synthesis.profiles import load_profiles

logger = logging.getLogger(__name__)

IN_EVENT_TAG = "euro2016-like"
UNSEEN_TAG = "rio2016-like"
REPORTS_DIR = "reports"
DATASETS_DIR = "datasets"
MODELS_DIR = "models"
TIMING_FILE = "timing.json"


class ReproPlan(BaseModel):
    """Sizes and seeds of one end-to-end run."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=42, ge=0)
    n_traces: int = Field(default=1000, ge=2, description="In-event traces")
    fraction: float = Field(default=0.13, gt=0.0, lt=1.0)
    unseen_n: int = Field(default=700, ge=2, description="Unseen-event traces")
    unseen_fraction: float = Field(default=0.105, gt=0.0, lt=1.0)
    folds: int = Field(default=DEFAULT_FOLDS, ge=2)
    steps: tuple[int, ...] | None = Field(
        default=None, description="Window ends to sweep (None = every step)"
    )
    growth_fractions: tuple[float, ...] = Field(default=DEFAULT_GROWTH_FRACTIONS)
    test_fraction: float = Field(default=DEFAULT_TEST_FRACTION, gt=0.0, lt=1.0)
    threshold: float = Field(default=DEFAULT_THRESHOLD, ge=0.0, le=1.0)
    profile_file: Path | None = None

    @classmethod
    def quick(cls, **overrides: object) -> ReproPlan:
        """Smoke-test sized plan."""
        base: dict[str, object] = {
            "n_traces": 200,
            "unseen_n": 150,
            "folds": 3,
            "steps": (1, 2, 5, 10),
            "growth_fractions": (0.1, 0.25, 0.5, 1.0),
        }
        base.update(overrides)
        return cls.model_validate(base)


@dataclass
class ReproResult:
    """Files written by a run plus its stage timings."""

    out_dir: Path
    artifacts: list[Path] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)

    def relative(self) -> list[str]:
        """Artifact paths relative to the output directory, sorted."""
        return sorted(str(p.relative_to(self.out_dir)) for p in self.artifacts)


@contextmanager
def _stage(result: ReproResult, name: str) -> Iterator[None]:
    logger.info("Stage %s", name)
    start = time.perf_counter()
    yield
    result.timing[f"{name}_s"] = time.perf_counter() - start


def _configs(seed: int) -> dict[str, TrainConfig]:
    return {
        "j48": TrainConfig(algo=ModelKind.DECISION_TREE, upto_step=1, seed=seed),
        "vote": TrainConfig(
            algo=ModelKind.VOTE,
            upto_step=1,
            seed=seed,
            vote_members=(ModelKind.NAIVE_BAYES, ModelKind.DECISION_TREE),
        ),
    }


def _store(
    data: GeneratedDataset, root: Path, cfg: ObservationConfig, result: ReproResult
) -> None:
    handle = write_dataset(
        root,
        data.traces,
        dataset_id=data.request.event_tag,
        observation=cfg,
        provenance=DatasetProvenance(
            source="generator",
            seed=data.request.seed,
            details=data.request.model_dump(mode="json"),
        ),
        seal_after=True,
    )
    result.artifacts.append(handle.root)


def run_repro(plan: ReproPlan, out_dir: str | Path) -> ReproResult:
    """Run the whole pipeline into out_dir."""
    root = Path(out_dir)
    if root.exists() and any(root.iterdir()):
        msg = f"Output directory {root} is not empty; repro runs need a fresh directory"
        raise ConfigError(msg)
    reports = root / REPORTS_DIR
    result = ReproResult(out_dir=root)
    cfg = ObservationConfig()
    configs = _configs(plan.seed)
    j48 = configs["j48"]

    with _stage(result, "generate"):
        profiles = load_profiles(plan.profile_file)
        in_event = generate_dataset(
            plan.n_traces, plan.fraction, profiles, cfg, plan.seed, event_tag=IN_EVENT_TAG
        )
        unseen = generate_dataset(
            plan.unseen_n, plan.unseen_fraction, profiles, cfg, plan.seed, event_tag=UNSEEN_TAG
        )
        _store(in_event, root / DATASETS_DIR / IN_EVENT_TAG, cfg, result)
        _store(unseen, root / DATASETS_DIR / UNSEEN_TAG, cfg, result)
        result.artifacts.append(save_rules(in_event.rules, root / DATASETS_DIR / "rules.json"))

    train = EvalDataset.from_traces(in_event.traces, dataset_id=IN_EVENT_TAG, cfg=cfg)
    test = EvalDataset.from_traces(unseen.traces, dataset_id=UNSEEN_TAG, cfg=cfg)
    steps = plan.steps

    with _stage(result, "sweep"):
        sweep = merge_reports(
            [
                time_sweep(train, c, k=plan.folds, seed=plan.seed, steps=steps)
                for c in configs.values()
            ],
            experiment="sweep",
        )
        result.artifacts += [
            write_json(sweep, reports / "sweep.json"),
            write_plot_csv(sweep.rows, reports / "sweep.csv"),
        ]

    with _stage(result, "ablation"):
        ablation = ablation_compare(train, j48, k=plan.folds, seed=plan.seed, steps=steps)
        result.artifacts += [
            write_json(ablation, reports / "ablation.json"),
            write_plot_csv(
                (*ablation.with_meta.rows, *ablation.without_meta.rows),
                reports / "ablation.csv",
            ),
        ]

    with _stage(result, "cross_event"):
        cross = merge_reports(
            [cross_event_sweep(train, test, c, steps=steps) for c in configs.values()],
            experiment="cross_event_sweep",
        )
        result.artifacts += [
            write_json(cross, reports / "cross_event.json"),
            write_plot_csv(cross.rows, reports / "cross_event.csv"),
        ]

    with _stage(result, "holdout"):
        last = cfg.period_p
        holdout = merge_reports(
            [
                holdout_evaluate(
                    train, j48.with_step(step), test_fraction=plan.test_fraction, seed=plan.seed
                )
                for step in sorted({1, last})
            ],
            experiment="holdout",
        )
        result.artifacts.append(write_json(holdout, reports / "holdout.json"))

    with _stage(result, "growth"):
        growth = sample_growth_study(
            train, test, j48, fractions=plan.growth_fractions, k=plan.folds, seed=plan.seed
        )
        result.artifacts += [
            write_json(growth, reports / "growth.json"),
            write_growth_csv(growth, reports / "growth.csv"),
        ]

    with _stage(result, "sentinel"):
        model = train_on_table(
            train.table, j48, dataset_id=IN_EVENT_TAG, label_generation=in_event.rules.version
        )
        result.artifacts.append(save_model(model, root / MODELS_DIR / "j48-step1.json"))
        monitored = batch_monitor(unseen.traces, model, plan.threshold, cfg=cfg)
        result.artifacts += [
            write_json(monitored, reports / "sentinel.json"),
            write_verdicts((v.verdict for v in monitored.verdicts), reports / "verdicts.jsonl"),
        ]

    summary = reports / "summary.txt"
    selector = ReportSelector(sweep)
    best = {name: selector.best_step(name) for name in configs}
    summary.write_text(
        format_table(sweep.rows, "Time sweep (cross-validation)")
        + "\n"
        + format_table(ablation.with_meta.rows + ablation.without_meta.rows, "Ablation")
        + "\n"
        + format_table(cross.rows, f"Cross-event ({IN_EVENT_TAG} -> {UNSEEN_TAG})")
        + "\n"
        + format_table(holdout.rows, "Hold-out")
        + "\n"
        + format_growth(growth)
        + "\n"
        + format_monitor(monitored)
        + "\nBest sweep step: "
        + ", ".join(f"{name}={step}" for name, step in best.items())
        + "\n",
        encoding="utf-8",
    )
    result.artifacts.append(summary)

    latency = measure_latency(model, encode_table(train.table.window(1), model.schema))
    result.timing["tree_inference_ms_median"] = latency
    timing_path = root / TIMING_FILE
    timing_path.write_text(
        json.dumps(result.timing, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    result.artifacts.append(timing_path)
    logger.info("Repro finished: tree inference %.3f ms median per snapshot", latency)
    return result
