"""
Command-line interface for driveby-sentinel.

One entry point wires the generator, store, classifiers, evaluation
protocols and sentinel into seeded, reproducible runs. Machine-readable
output goes to stdout or files; logs go to stderr.

Exit codes: 0 success, 2 configuration or usage error, 3 data error
(missing or invalid files, schema mismatch, too little data), 4 internal
error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from driveby_sentinel.classifiers.factory import ALGORITHM_ALIASES, resolve_algorithm
from driveby_sentinel.classifiers.serialization import load_model, save_model
from driveby_sentinel.errors import ConfigError, DataError, SentinelError
from driveby_sentinel.evaluation.protocol import (
    DEFAULT_FOLDS,
    DEFAULT_GROWTH_FRACTIONS,
    DEFAULT_TEST_FRACTION,
    EvalDataset,
    ablation_compare,
    cross_event_sweep,
    holdout_evaluate,
    sample_growth_study,
    time_sweep,
    train_on_table,
)
from driveby_sentinel.evaluation.reports import (
    format_growth,
    format_monitor,
    format_table,
    verdict_lines,
    write_growth_csv,
    write_json,
    write_plot_csv,
    write_verdicts,
)
from driveby_sentinel.features.extraction import build_schema, encode_table, tabulate
from driveby_sentinel.features.ranking import pearson_rank
from driveby_sentinel.models.config import (
    BayesParams,
    CycleConfig,
    MlpParams,
    RunConfig,
    RunManifest,
    TrainConfig,
    TreeParams,
)
from driveby_sentinel.models.types import ObservationConfig
from driveby_sentinel.sentinel.adaptive import adaptive_cycle
from driveby_sentinel.sentinel.monitor import (
    DEFAULT_DEADLINE_MS,
    DEFAULT_GRACE_STEPS,
    DEFAULT_THRESHOLD,
    batch_monitor,
)
from driveby_sentinel.sentinel.runtime import Sentinel
from driveby_sentinel.sources.factory import create_snapshot_source
from driveby_sentinel.sources.replay import DatasetSource
from driveby_sentinel.store.snapshot_store import (
    DatasetProvenance,
    dataset_stats,
    import_traces,
    load_traces,
    materialize,
    open_dataset,
    split_by_fraction,
    systematic_sample,
    write_dataset,
)
from driveby_sentinel.synthesis.generator import generate_dataset
from driveby_sentinel.synthesis.oracle import load_rules, save_rules
from driveby_sentinel.synthesis.profiles import load_profiles

from .repro import ReproPlan, run_repro

logger = logging.getLogger(__name__)

# Exit codes
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

# Defaults
DEFAULT_SEED = 42
DEFAULT_N_TRACES = 1000
DEFAULT_FRACTION = 0.13
DEFAULT_EVENT_TAG = "euro2016-like"
DEFAULT_RANK = 20
RUN_CONFIG_FILE = "run_config.json"
RUN_MANIFEST_FILE = "run_manifest.json"


def _csv_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        msg = f"Expected comma-separated numbers, got '{text}'"
        raise argparse.ArgumentTypeError(msg) from e


def _csv_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        msg = f"Expected comma-separated integers, got '{text}'"
        raise argparse.ArgumentTypeError(msg) from e


def _csv_names(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _json_safe(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, tuple | list):
        return [_json_safe(v) for v in value]
    return value


def _observation(args: argparse.Namespace) -> ObservationConfig:
    return ObservationConfig(interval_t=args.interval, period_p=args.period)


def write_run_files(
    args: argparse.Namespace,
    out_dir: Path,
    artifacts: Sequence[Path],
    *,
    observation: ObservationConfig | None = None,
) -> list[Path]:
    """Write run_config.json and run_manifest.json next to a run's artifacts."""
    out_dir.mkdir(parents=True, exist_ok=True)
    arguments = {
        key: _json_safe(value)
        for key, value in sorted(vars(args).items())
        if key not in {"func", "verbose", "debug"}
    }
    algorithms = [a for a in (arguments.get("algo"),) if a]
    run_config = RunConfig(
        subcommand=args.subcommand,
        seed=arguments.get("seed"),
        dataset_paths=tuple(
            str(arguments[k]) for k in ("dataset", "train", "test", "unseen") if arguments.get(k)
        ),
        algorithms=tuple(algorithms),
        observation=observation or ObservationConfig(),
        include_tweet_meta=not arguments.get("no_tweet_meta", False),
        threshold=arguments.get("threshold"),
        out_dir=out_dir,
        arguments=arguments,
    )
    config_path = out_dir / RUN_CONFIG_FILE
    config_path.write_text(run_config.model_dump_json(indent=2) + "\n", encoding="utf-8")
    manifest_path = out_dir / RUN_MANIFEST_FILE
    listed = [*artifacts, config_path]
    manifest = RunManifest(
        subcommand=args.subcommand,
        artifacts=tuple(sorted(_relative(p, out_dir) for p in listed)),
    )
    manifest_path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return [config_path, manifest_path]


def _relative(path: Path, root: Path) -> str:
    try:
        return str(path.resolve().relative_to(root.resolve()))
    except ValueError:
        return str(path)


# Generate


def generate_command(args: argparse.Namespace) -> int:
    """Generate a labeled synthetic dataset into a new store directory."""
    cfg = _observation(args)
    profiles = load_profiles(args.profile_file)
    rules = load_rules(args.rules)
    data = generate_dataset(
        args.n,
        args.fraction,
        profiles,
        cfg,
        args.seed,
        event_tag=args.event_tag,
        rules=rules,
        tweet_separation=args.tweet_separation,
        early_signal_strength=args.early_signal,
        profile_names=args.profiles,
    )
    out_dir = Path(args.out_dir)
    handle = write_dataset(
        out_dir,
        data.traces,
        dataset_id=args.dataset_id or f"{args.event_tag}-seed{args.seed}",
        observation=cfg,
        provenance=DatasetProvenance(
            source="generator", seed=args.seed, details=data.request.model_dump(mode="json")
        ),
        seal_after=args.seal,
    )
    rules_path = save_rules(data.rules, out_dir / "rules.json")
    write_run_files(args, out_dir, [handle.root / "manifest.json", rules_path], observation=cfg)
    print(dataset_stats(handle).model_dump_json(indent=2))
    return EXIT_OK


# Store


def store_import_command(args: argparse.Namespace) -> int:
    """Import UrlTrace JSON lines into a new dataset."""
    out_dir = Path(args.out)
    handle = import_traces(
        args.input, out_dir, dataset_id=args.dataset_id, observation=_observation(args)
    )
    write_run_files(args, out_dir, [handle.root / "manifest.json"], observation=handle.observation)
    print(dataset_stats(handle).model_dump_json(indent=2))
    return EXIT_OK


def store_sample_command(args: argparse.Namespace) -> int:
    """Materialize a seeded systematic sample of a dataset."""
    view = systematic_sample(open_dataset(args.dataset), args.fraction, args.seed)
    handle = materialize(view, args.out)
    write_run_files(args, handle.root, [handle.root / "manifest.json"])
    print(dataset_stats(handle).model_dump_json(indent=2))
    return EXIT_OK


def store_split_command(args: argparse.Namespace) -> int:
    """Materialize nested stratified fractions of a dataset."""
    views = split_by_fraction(open_dataset(args.dataset), args.fractions, args.seed)
    out_dir = Path(args.out_dir)
    written = []
    for fraction, view in zip(args.fractions, views, strict=True):
        handle = materialize(view, out_dir / f"split-{fraction:g}")
        written.append(handle.root / "manifest.json")
        counts = handle.counts
        print(f"{fraction:g}\t{counts.total}\t{counts.malicious}\t{handle.root}")
    write_run_files(args, out_dir, written)
    return EXIT_OK


def store_stats_command(args: argparse.Namespace) -> int:
    """Print dataset statistics, optionally with the Pearson feature ranking."""
    handle = open_dataset(args.dataset)
    print(dataset_stats(handle).model_dump_json(indent=2))
    if args.rank:
        table = tabulate(load_traces(handle)).window(args.upto_step)
        schema = build_schema(table, include_tweet_meta=not args.no_tweet_meta)
        ranking = pearson_rank(encode_table(table, schema))
        print(f"\nTop {min(args.rank, len(ranking))} features by |r| (upto_step={args.upto_step})")
        for position, item in enumerate(ranking[: args.rank], start=1):
            print(f"{position:>3}  {item.name:<36} {item.r:+.4f}")
    return EXIT_OK


# Train


def _train_config(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        algo=resolve_algorithm(args.algo),
        upto_step=args.upto_step,
        include_tweet_meta=not args.no_tweet_meta,
        seed=args.seed,
        bayes=BayesParams(smoothing=args.smoothing, n_bins=args.bins),
        tree=TreeParams(
            min_leaf=args.min_leaf,
            confidence=args.confidence,
            prune=not args.no_prune,
            laplace=args.laplace,
        ),
        mlp=MlpParams(
            hidden_layout=args.hidden,
            learning_rate=args.learning_rate,
            momentum=args.momentum,
            epochs=args.epochs,
        ),
        vote_members=tuple(resolve_algorithm(m) for m in args.members),
    )


def train_command(args: argparse.Namespace) -> int:
    """Train a prefix model on a stored dataset and write the model file."""
    config = _train_config(args)
    handle = open_dataset(args.dataset)
    data = EvalDataset.from_handle(handle)
    generations = handle.manifest.label_generations
    model = train_on_table(
        data.table,
        config,
        dataset_id=handle.dataset_id,
        label_generation=max(generations) if generations else None,
    )
    path = save_model(model, args.out)
    write_run_files(args, path.parent, [path], observation=handle.observation)
    print(model.provenance.model_dump_json(indent=2))
    return EXIT_OK


# Evaluate


def _eval_config(args: argparse.Namespace) -> TrainConfig:
    if not args.model:
        msg = "Evaluation needs a trained model (--model) to take its configuration from"
        raise DataError(msg)
    config = load_model(args.model).provenance.config
    logger.info("Evaluating %s configuration from %s", config.algo.value, args.model)
    return config


def _emit(args: argparse.Namespace, report: Any, rows: Sequence[Any], title: str) -> int:
    print(format_table(rows, title), end="")
    if args.out:
        out = Path(args.out)
        written = [write_json(report, out)]
        if args.csv:
            written.append(write_plot_csv(rows, args.csv))
        write_run_files(args, out.parent, written)
    elif args.csv:
        write_plot_csv(rows, args.csv)
    return EXIT_OK


def eval_sweep_command(args: argparse.Namespace) -> int:
    """Cross-validated F-measure for every window end."""
    config = _eval_config(args)
    data = EvalDataset.from_handle(open_dataset(args.dataset))
    report = time_sweep(data, config, k=args.folds, seed=args.seed, steps=args.steps)
    return _emit(args, report, report.rows, f"Time sweep ({args.folds}-fold CV)")


def eval_ablate_command(args: argparse.Namespace) -> int:
    """Time sweep with and without tweet metadata."""
    config = _eval_config(args)
    data = EvalDataset.from_handle(open_dataset(args.dataset))
    report = ablation_compare(data, config, k=args.folds, seed=args.seed, steps=args.steps)
    rows = [*report.with_meta.rows, *report.without_meta.rows]
    return _emit(args, report, rows, "Tweet-metadata ablation")


def eval_cross_event_command(args: argparse.Namespace) -> int:
    """Train on one event's dataset and score another's."""
    config = _eval_config(args)
    train = EvalDataset.from_handle(open_dataset(args.train))
    test = EvalDataset.from_handle(open_dataset(args.test))
    report = cross_event_sweep(
        train, test, config, steps=args.steps, allow_overlap=args.allow_overlap
    )
    title = f"Cross-event ({train.dataset_id} -> {test.dataset_id})"
    return _emit(args, report, report.rows, title)


def eval_growth_command(args: argparse.Namespace) -> int:
    """Sample-size growth study on nested stratified subsets."""
    config = _eval_config(args)
    data = EvalDataset.from_handle(open_dataset(args.dataset))
    unseen = EvalDataset.from_handle(open_dataset(args.unseen))
    report = sample_growth_study(
        data, unseen, config, fractions=args.fractions, k=args.folds, seed=args.seed
    )
    print(format_growth(report), end="")
    if args.out:
        out = Path(args.out)
        written = [write_json(report, out)]
        if args.csv:
            written.append(write_growth_csv(report, args.csv))
        write_run_files(args, out.parent, written)
    elif args.csv:
        write_growth_csv(report, args.csv)
    return EXIT_OK


def eval_holdout_command(args: argparse.Namespace) -> int:
    """Stratified trace-level hold-out evaluation."""
    config = _eval_config(args)
    data = EvalDataset.from_handle(open_dataset(args.dataset))
    report = holdout_evaluate(data, config, test_fraction=args.test_fraction, seed=args.seed)
    return _emit(args, report, report.rows, f"Hold-out ({args.test_fraction:g})")


# Sentinel


def sentinel_run_command(args: argparse.Namespace) -> int:
    """Monitor a trace stream and print one verdict line per trace."""
    model = load_model(args.model)
    source = create_snapshot_source(args.input)
    cfg = source.handle.observation if isinstance(source, DatasetSource) else _observation(args)
    sentinel = Sentinel(model, args.threshold, cfg, deadline_ms=args.deadline_ms)
    verdicts = []
    for verdict in sentinel.run(source):
        verdicts.append(verdict)
        if not args.out:
            sys.stdout.write(verdict_lines([verdict]))
            sys.stdout.flush()
    if args.out:
        path = write_verdicts(verdicts, args.out)
        write_run_files(args, path.parent, [path], observation=cfg)
    logger.info("Sentinel finished: %d traces, %d killed", len(verdicts), sentinel.stats["killed"])
    return EXIT_OK


def sentinel_batch_command(args: argparse.Namespace) -> int:
    """Monitor every trace of a labeled dataset and report early-detection metrics."""
    model = load_model(args.model)
    handle = open_dataset(args.dataset)
    report = batch_monitor(
        load_traces(handle),
        model,
        args.threshold,
        grace_steps=args.grace,
        cfg=handle.observation,
        deadline_ms=args.deadline_ms,
    )
    print(format_monitor(report), end="")
    if args.out:
        path = write_json(report, args.out)
        write_run_files(args, path.parent, [path], observation=handle.observation)
    return EXIT_OK


def sentinel_cycle_command(args: argparse.Namespace) -> int:
    """One feed-forward cycle: advance rules, ingest, retrain, compare."""
    handle = open_dataset(args.dataset)
    rules = load_rules(args.rules)
    model = load_model(args.model) if args.model else None
    config = model.provenance.config if model else _train_config(args)
    cycle = CycleConfig(
        n_new_traces=args.n_new,
        malicious_fraction=args.fraction,
        eval_n_traces=args.eval_n,
        seed=args.seed,
        event_tag=args.event_tag,
        eval_profiles=args.eval_profiles,
    )
    outcome = adaptive_cycle(
        handle, rules, config, cycle, load_profiles(args.profile_file), model=model
    )
    out_dir = Path(args.out_dir)
    written = [
        save_rules(outcome.rules, out_dir / "rules.json"),
        save_model(outcome.model, out_dir / "model.json"),
        write_json(outcome.report, out_dir / "cycle_report.json"),
    ]
    write_run_files(args, out_dir, written, observation=handle.observation)
    print(format_table(outcome.report.rows, f"Cycle to rule generation {outcome.rules.version}"))
    return EXIT_OK


# Repro


def repro_command(args: argparse.Namespace) -> int:
    """Run the whole seeded pipeline."""
    overrides = {
        key: value
        for key, value in {
            "seed": args.seed,
            "n_traces": args.n_traces,
            "fraction": args.fraction,
            "unseen_n": args.unseen_n,
            "unseen_fraction": args.unseen_fraction,
            "folds": args.folds,
            "profile_file": args.profile_file,
        }.items()
        if value is not None
    }
    plan = ReproPlan.quick(**overrides) if args.quick else ReproPlan.model_validate(overrides)
    out_dir = Path(args.out_dir)
    result = run_repro(plan, out_dir)
    write_run_files(args, out_dir, result.artifacts)
    print((out_dir / "reports" / "summary.txt").read_text(encoding="utf-8"), end="")
    return EXIT_OK


def setup_logging(*, verbose: bool = False, debug: bool = False) -> None:
    """Setup logging configuration for the CLI."""
    if debug:
        level = logging.DEBUG
        format_str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    elif verbose:
        level = logging.INFO
        format_str = "%(levelname)s - %(name)s - %(message)s"
    else:
        level = logging.WARNING
        format_str = "%(levelname)s - %(message)s"

    logging.basicConfig(
        level=level,
        format=format_str,
        datefmt="%H:%M:%S",
        stream=sys.stderr,  # Use stderr so it doesn't interfere with JSON output
        force=True,
    )


def add_common_args(subparser: argparse.ArgumentParser) -> None:
    """Logging flags shared by every subcommand."""
    subparser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose logging (INFO level)",
    )
    subparser.add_argument(
        "--debug",
        "-d",
        action="store_true",
        help="Enable debug logging (DEBUG level)",
    )


def _add_observation_args(subparser: argparse.ArgumentParser) -> None:
    subparser.add_argument(
        "--interval", type=float, default=1.0, help="Seconds between snapshots (default: 1)"
    )
    subparser.add_argument(
        "--period", type=int, default=10, help="Snapshots per trace (default: 10)"
    )


def _add_train_args(subparser: argparse.ArgumentParser) -> None:
    subparser.add_argument(
        "--algo",
        default="j48",
        help=f"Algorithm: {', '.join(ALGORITHM_ALIASES)} (default: j48)",
    )
    subparser.add_argument(
        "--upto-step", type=int, default=1, help="Cumulative window end step (default: 1)"
    )
    subparser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Learner seed")
    subparser.add_argument(
        "--no-tweet-meta", action="store_true", help="Drop the tweet metadata fields"
    )
    subparser.add_argument(
        "--members",
        type=_csv_names,
        default=("nb", "j48"),
        help="Vote members, comma-separated (default: nb,j48)",
    )
    subparser.add_argument(
        "--smoothing", type=float, default=1.0, help="Bayes additive smoothing (default: 1)"
    )
    subparser.add_argument(
        "--bins", type=int, default=10, help="TAN equal-frequency bins (default: 10)"
    )
    subparser.add_argument(
        "--min-leaf", type=int, default=2, help="Tree minimum instances per leaf (default: 2)"
    )
    subparser.add_argument(
        "--confidence", type=float, default=0.25, help="Tree pruning confidence (default: 0.25)"
    )
    subparser.add_argument("--no-prune", action="store_true", help="Keep the unpruned tree")
    subparser.add_argument(
        "--laplace", action="store_true", help="Laplace-smoothed tree leaf estimates"
    )
    subparser.add_argument(
        "--hidden", type=_csv_ints, default=None, help="MLP hidden layer sizes, e.g. 20,10"
    )
    subparser.add_argument(
        "--learning-rate", type=float, default=0.3, help="MLP learning rate (default: 0.3)"
    )
    subparser.add_argument(
        "--momentum", type=float, default=0.2, help="MLP momentum (default: 0.2)"
    )
    subparser.add_argument("--epochs", type=int, default=500, help="MLP epochs (default: 500)")


def _add_eval_args(
    subparser: argparse.ArgumentParser, *, folds: bool = True, steps: bool = True
) -> None:
    subparser.add_argument(
        "--model", help="Trained model whose configuration is re-used (required)"
    )
    subparser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Split seed")
    if folds:
        subparser.add_argument(
            "--folds", type=int, default=DEFAULT_FOLDS, help="Cross-validation folds"
        )
    if steps:
        subparser.add_argument(
            "--steps", type=_csv_ints, default=None, help="Window ends, e.g. 1,2,5,10"
        )
    subparser.add_argument("--out", "-o", help="Report JSON path (default: table only)")
    subparser.add_argument("--csv", help="Plot-ready CSV path")


def _add_sentinel_args(subparser: argparse.ArgumentParser) -> None:
    subparser.add_argument("--model", required=True, help="Trained model file")
    subparser.add_argument(
        "--threshold",
        type=float,
        default=DEFAULT_THRESHOLD,
        help="Kill when p_malicious exceeds this (default: 0.5)",
    )
    subparser.add_argument(
        "--deadline-ms",
        type=float,
        default=DEFAULT_DEADLINE_MS,
        help="Per-snapshot inference budget in ms (default: 100)",
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with every subcommand."""
    parser = argparse.ArgumentParser(
        prog="driveby-sentinel",
        description="Early-kill prediction of drive-by downloads",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate a seeded in-event dataset
  driveby-sentinel generate --n 1000 --fraction 0.13 --seed 42 --out-dir data/euro

  # Train a decision tree on the first second
  driveby-sentinel train --dataset data/euro --algo j48 --upto-step 1 --out j48.json

  # Cross-validated time sweep with the model's configuration
  driveby-sentinel eval sweep --dataset data/euro --model j48.json --out sweep.json

  # Replay a dataset through the sentinel
  driveby-sentinel sentinel run --model j48.json --in data/rio

  # Full reproducible pipeline
  driveby-sentinel repro --seed 42 --out-dir runs/42
        """,
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    _add_generate_parser(subparsers)
    _add_store_parser(subparsers)
    _add_train_parser(subparsers)
    _add_eval_parser(subparsers)
    _add_sentinel_parser(subparsers)
    _add_repro_parser(subparsers)
    return parser


def _leaf(
    subparsers: Any, name: str, path: str, func: Callable[[argparse.Namespace], int], help_: str
) -> argparse.ArgumentParser:
    sub = subparsers.add_parser(name, help=help_)
    add_common_args(sub)
    sub.set_defaults(func=func, subcommand=path)
    return sub


def _add_generate_parser(subparsers: Any) -> None:
    gen = _leaf(subparsers, "generate", "generate", generate_command, "Generate a dataset")
    gen.add_argument("--n", type=int, default=DEFAULT_N_TRACES, help="Number of traces")
    gen.add_argument(
        "--fraction", type=float, default=DEFAULT_FRACTION, help="Malicious fraction"
    )
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Generator seed")
    gen.add_argument("--event-tag", default=DEFAULT_EVENT_TAG, help="Collection event variant")
    gen.add_argument(
        "--tweet-separation",
        type=float,
        default=0.6,
        help="Tweet-metadata class separation in [0, 1] (default: 0.6)",
    )
    gen.add_argument(
        "--early-signal", type=float, default=None, help="Override pre-onset signal in [0, 1]"
    )
    gen.add_argument(
        "--profiles", type=_csv_names, default=None, help="Restrict malicious kits by name"
    )
    gen.add_argument("--profile-file", default=None, help="Behavior profile JSON file")
    gen.add_argument("--rules", default=None, help="Exclusion rule set JSON (default: gen 1)")
    gen.add_argument("--dataset-id", default=None, help="Dataset id (default: tag-seedN)")
    gen.add_argument("--seal", action="store_true", help="Seal the dataset after writing")
    gen.add_argument("--out-dir", required=True, help="New dataset directory")
    _add_observation_args(gen)


def _add_store_parser(subparsers: Any) -> None:
    store = subparsers.add_parser("store", help="Dataset store operations")
    actions = store.add_subparsers(dest="store_command", help="Store commands")

    imp = _leaf(actions, "import", "store import", store_import_command, "Import trace lines")
    imp.add_argument("--in", dest="input", required=True, help="UrlTrace JSON-lines file")
    imp.add_argument("--out", required=True, help="New dataset directory")
    imp.add_argument("--dataset-id", required=True, help="Dataset id")
    _add_observation_args(imp)

    sample = _leaf(actions, "sample", "store sample", store_sample_command, "Systematic sample")
    sample.add_argument("--dataset", required=True, help="Source dataset directory")
    sample.add_argument("--fraction", type=float, required=True, help="Sample fraction")
    sample.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Start-offset seed")
    sample.add_argument("--out", required=True, help="New dataset directory")

    split = _leaf(actions, "split", "store split", store_split_command, "Nested fractions")
    split.add_argument("--dataset", required=True, help="Source dataset directory")
    split.add_argument(
        "--fractions",
        type=_csv_floats,
        default=DEFAULT_GROWTH_FRACTIONS,
        help="Increasing fractions (default: 0.01,0.05,0.1,0.25,0.5,1)",
    )
    split.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Split seed")
    split.add_argument("--out-dir", required=True, help="Directory for split-<f> datasets")

    stats = _leaf(actions, "stats", "store stats", store_stats_command, "Dataset statistics")
    stats.add_argument("--dataset", required=True, help="Dataset directory")
    stats.add_argument(
        "--rank",
        type=int,
        nargs="?",
        const=DEFAULT_RANK,
        default=0,
        help=f"Print the top-N Pearson ranking (default N: {DEFAULT_RANK})",
    )
    stats.add_argument("--upto-step", type=int, default=1, help="Ranking window end step")
    stats.add_argument("--no-tweet-meta", action="store_true", help="Rank machine fields only")


def _add_train_parser(subparsers: Any) -> None:
    train = _leaf(subparsers, "train", "train", train_command, "Train a prefix model")
    train.add_argument("--dataset", required=True, help="Training dataset directory")
    train.add_argument("--out", "-o", required=True, help="Model file path")
    _add_train_args(train)


def _add_eval_parser(subparsers: Any) -> None:
    evaluate = subparsers.add_parser("eval", help="Evaluation protocols")
    protocols = evaluate.add_subparsers(dest="eval_command", help="Protocols")

    sweep = _leaf(protocols, "sweep", "eval sweep", eval_sweep_command, "Time sweep")
    sweep.add_argument("--dataset", required=True, help="Dataset directory")
    _add_eval_args(sweep)

    ablate = _leaf(protocols, "ablate", "eval ablate", eval_ablate_command, "Metadata ablation")
    ablate.add_argument("--dataset", required=True, help="Dataset directory")
    _add_eval_args(ablate)

    cross = _leaf(
        protocols, "cross-event", "eval cross-event", eval_cross_event_command, "Unseen event"
    )
    cross.add_argument("--train", required=True, help="Training event dataset")
    cross.add_argument("--test", required=True, help="Unseen event dataset")
    cross.add_argument(
        "--allow-overlap", action="store_true", help="Permit shared trace ids (not recommended)"
    )
    _add_eval_args(cross, folds=False)

    growth = _leaf(protocols, "growth", "eval growth", eval_growth_command, "Growth study")
    growth.add_argument("--dataset", required=True, help="In-event dataset directory")
    growth.add_argument("--unseen", required=True, help="Unseen event dataset directory")
    growth.add_argument(
        "--fractions",
        type=_csv_floats,
        default=DEFAULT_GROWTH_FRACTIONS,
        help="Increasing fractions (default: 0.01,0.05,0.1,0.25,0.5,1)",
    )
    _add_eval_args(growth, steps=False)

    holdout = _leaf(protocols, "holdout", "eval holdout", eval_holdout_command, "Hold-out")
    holdout.add_argument("--dataset", required=True, help="Dataset directory")
    holdout.add_argument(
        "--test-fraction", type=float, default=DEFAULT_TEST_FRACTION, help="Held-out share"
    )
    _add_eval_args(holdout, folds=False, steps=False)


def _add_sentinel_parser(subparsers: Any) -> None:
    sentinel = subparsers.add_parser("sentinel", help="Early-kill runtime")
    modes = sentinel.add_subparsers(dest="sentinel_command", help="Sentinel commands")

    run = _leaf(modes, "run", "sentinel run", sentinel_run_command, "Monitor a trace stream")
    _add_sentinel_args(run)
    run.add_argument(
        "--in",
        dest="input",
        default="-",
        help="Dataset directory, snapshot JSON-lines file or - for stdin (default: -)",
    )
    run.add_argument("--out", "-o", help="Verdict log path (default: stdout)")
    _add_observation_args(run)

    batch = _leaf(modes, "batch", "sentinel batch", sentinel_batch_command, "Labeled replay")
    _add_sentinel_args(batch)
    batch.add_argument("--dataset", required=True, help="Labeled dataset directory")
    batch.add_argument(
        "--grace",
        type=int,
        default=DEFAULT_GRACE_STEPS,
        help="Steps after onset still counted as an early kill (default: 1)",
    )
    batch.add_argument("--out", "-o", help="Report JSON path")

    cycle = _leaf(modes, "cycle", "sentinel cycle", sentinel_cycle_command, "Retraining cycle")
    cycle.add_argument("--dataset", required=True, help="Writable dataset directory")
    cycle.add_argument("--rules", default=None, help="Current rule set JSON (default: gen 1)")
    cycle.add_argument("--model", default=None, help="Deployed model (default: train one)")
    cycle.add_argument("--n-new", type=int, default=400, help="Traces ingested (default: 400)")
    cycle.add_argument(
        "--fraction", type=float, default=DEFAULT_FRACTION, help="Malicious fraction"
    )
    cycle.add_argument("--eval-n", type=int, default=400, help="Evaluation batch size")
    cycle.add_argument(
        "--eval-profiles", type=_csv_names, default=None, help="Evaluation batch kits"
    )
    cycle.add_argument("--event-tag", default=DEFAULT_EVENT_TAG, help="Event variant")
    cycle.add_argument("--profile-file", default=None, help="Behavior profile JSON file")
    cycle.add_argument("--out-dir", required=True, help="Directory for rules, model, report")
    _add_train_args(cycle)


def _add_repro_parser(subparsers: Any) -> None:
    repro = _leaf(subparsers, "repro", "repro", repro_command, "Full seeded pipeline")
    repro.add_argument("--seed", type=int, default=None, help="Master seed (default: 42)")
    repro.add_argument("--out-dir", required=True, help="Fresh output directory")
    repro.add_argument("--n-traces", type=int, default=None, help="In-event traces")
    repro.add_argument("--fraction", type=float, default=None, help="In-event malicious share")
    repro.add_argument("--unseen-n", type=int, default=None, help="Unseen-event traces")
    repro.add_argument(
        "--unseen-fraction", type=float, default=None, help="Unseen-event malicious share"
    )
    repro.add_argument("--folds", type=int, default=None, help="Cross-validation folds")
    repro.add_argument("--profile-file", default=None, help="Behavior profile JSON file")
    repro.add_argument("--quick", action="store_true", help="Smaller sizes for smoke runs")


def main(argv: Sequence[str] | None = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_CONFIG

    setup_logging(verbose=getattr(args, "verbose", False), debug=getattr(args, "debug", False))

    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return EXIT_CONFIG

    try:
        return args.func(args)
    except ConfigError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as e:
        # flag values rejected by a config model
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as e:
        print(f"❌ Data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except SentinelError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:
        logger.exception("Unexpected failure")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
