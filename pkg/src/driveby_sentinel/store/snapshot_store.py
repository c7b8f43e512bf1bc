"""
Line-delimited snapshot store.

A dataset is a directory holding ``manifest.json``, ``traces.jsonl`` and
``snapshots.jsonl``; both line files start with a versioned header line.
Datasets are append-only until sealed. Samples and splits are views: a
handle that shares the dataset root and restricts the trace-id list;
``materialize`` copies a view into a standalone dataset.
"""

from __future__ import annotations

import logging
import math
import os
from collections.abc import Collection, Iterable, Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from driveby_sentinel.core.validation import validate_trace
from driveby_sentinel.errors import (
    ConfigError,
    InsufficientDataError,
    SchemaMismatchError,
    StoreError,
)
from driveby_sentinel.models.schema import (
    MACHINE_FIELD_NAMES,
    SCHEMA_VERSION,
    TWEET_FIELD_NAMES,
)
from driveby_sentinel.models.types import (
    Label,
    LowLevelEvent,
    ObservationConfig,
    Snapshot,
    UrlTrace,
)

logger = logging.getLogger(__name__)

STORE_VERSION = 1
MANIFEST_FILE = "manifest.json"
TRACES_FILE = "traces.jsonl"
SNAPSHOTS_FILE = "snapshots.jsonl"
LOCK_FILE = ".writer.lock"
TRACES_FORMAT = "driveby-traces"
SNAPSHOTS_FORMAT = "driveby-snapshots"


class FileHeader(BaseModel):
    """First line of every store line file."""

    model_config = ConfigDict(frozen=True)

    format: str
    version: int = STORE_VERSION
    schema_version: int = SCHEMA_VERSION
    machine_fields: tuple[str, ...] = ()
    tweet_fields: tuple[str, ...] = ()


class TraceRecord(BaseModel):
    """Trace-level line: everything but the snapshots."""

    model_config = ConfigDict(frozen=True)

    trace_id: str
    event_tag: str
    truth: Label
    onset_step: int | None = None
    label_generation: int | None = None
    events: tuple[LowLevelEvent, ...] = ()

    @classmethod
    def from_trace(cls, trace: UrlTrace) -> TraceRecord:
        """Record for a trace."""
        return cls(
            trace_id=trace.trace_id,
            event_tag=trace.event_tag,
            truth=trace.truth,
            onset_step=trace.onset_step,
            label_generation=trace.label_generation,
            events=trace.events,
        )

    def to_trace(self, snapshots: Sequence[Snapshot]) -> UrlTrace:
        """Reassemble the trace."""
        return UrlTrace(
            trace_id=self.trace_id,
            event_tag=self.event_tag,
            snapshots=tuple(sorted(snapshots, key=lambda s: s.time_step)),
            truth=self.truth,
            onset_step=self.onset_step,
            label_generation=self.label_generation,
            events=self.events,
        )


class ClassCounts(BaseModel):
    """Trace counts per class."""

    model_config = ConfigDict(frozen=True)

    malicious: int = Field(default=0, ge=0)
    benign: int = Field(default=0, ge=0)

    @property
    def total(self) -> int:
        """All traces."""
        return self.malicious + self.benign

    def plus(self, label: Label, n: int = 1) -> ClassCounts:
        """Counts with n more traces of a class."""
        if label is Label.MALICIOUS:
            return self.model_copy(update={"malicious": self.malicious + n})
        return self.model_copy(update={"benign": self.benign + n})


class DatasetProvenance(BaseModel):
    """Where (part of) a dataset came from."""

    model_config = ConfigDict(frozen=True)

    source: str = Field(description="generator, import, sample, split, cycle, ...")
    seed: int | None = None
    parent: str | None = Field(default=None, description="Parent dataset id")
    details: dict[str, Any] = Field(default_factory=dict)


class StoreManifest(BaseModel):
    """manifest.json: counts, schema version, observation protocol, provenance."""

    model_config = ConfigDict(frozen=True)

    format: Literal["driveby-dataset"] = "driveby-dataset"
    version: int = STORE_VERSION
    schema_version: int = SCHEMA_VERSION
    dataset_id: str
    event_tags: tuple[str, ...] = ()
    observation: ObservationConfig = Field(default_factory=ObservationConfig)
    trace_counts: ClassCounts = Field(default_factory=ClassCounts)
    snapshot_count: int = Field(default=0, ge=0)
    label_generations: tuple[int, ...] = ()
    provenance: tuple[DatasetProvenance, ...] = ()
    sealed: bool = False


class DatasetHandle(BaseModel):
    """Reference to a dataset directory, optionally restricted to some traces."""

    model_config = ConfigDict(frozen=True)

    root: Path
    manifest: StoreManifest
    trace_ids: tuple[str, ...] | None = Field(
        default=None, description="View restriction; None selects every trace"
    )
    view: str | None = Field(default=None, description="How the view was derived")
    view_counts: ClassCounts | None = None

    @property
    def dataset_id(self) -> str:
        """Dataset id, suffixed with the view description for views."""
        if self.view is None:
            return self.manifest.dataset_id
        return f"{self.manifest.dataset_id}:{self.view}"

    @property
    def is_view(self) -> bool:
        """True for samples and splits."""
        return self.trace_ids is not None

    @property
    def counts(self) -> ClassCounts:
        """Trace counts per class of the selected traces."""
        return self.view_counts if self.view_counts is not None else self.manifest.trace_counts

    @property
    def observation(self) -> ObservationConfig:
        """Observation protocol shared by all traces."""
        return self.manifest.observation


class DatasetStats(BaseModel):
    """Summary printed by ``store stats``."""

    model_config = ConfigDict(frozen=True)

    dataset_id: str
    trace_counts: ClassCounts
    snapshot_count: int
    event_tags: tuple[str, ...]
    label_generations: tuple[int, ...]
    observation: ObservationConfig
    sealed: bool
    malicious_fraction: float


def _write_manifest(root: Path, manifest: StoreManifest) -> None:
    tmp = root / f"{MANIFEST_FILE}.tmp"
    tmp.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    tmp.replace(root / MANIFEST_FILE)


def _snapshot_header() -> FileHeader:
    return FileHeader(
        format=SNAPSHOTS_FORMAT,
        machine_fields=MACHINE_FIELD_NAMES,
        tweet_fields=TWEET_FIELD_NAMES,
    )


@contextmanager
def _writer(root: Path) -> Iterator[None]:
    lock = root / LOCK_FILE
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError as e:
        msg = f"Dataset {root} already has a writer ({lock} exists)"
        raise StoreError(msg) from e
    try:
        yield
    finally:
        os.close(fd)
        lock.unlink(missing_ok=True)


@contextmanager
def _rollback(*paths: Path) -> Iterator[None]:
    """Truncate the line files back to their current size if the block fails."""
    sizes = {path: path.stat().st_size for path in paths}
    try:
        yield
    except BaseException:
        for path, size in sizes.items():
            with path.open("r+b") as f:
                f.truncate(size)
        raise


def _append_lines(path: Path, lines: Iterable[str]) -> int:
    count = 0
    with path.open("a", encoding="utf-8") as f:
        for line in lines:
            f.write(line)
            f.write("\n")
            count += 1
        f.flush()
        os.fsync(f.fileno())
    return count


def create_dataset(
    root: str | Path,
    dataset_id: str,
    *,
    observation: ObservationConfig | None = None,
    provenance: DatasetProvenance | None = None,
) -> DatasetHandle:
    """Create an empty dataset directory.

    Raises:
        StoreError: the directory already holds a dataset
    """
    path = Path(root)
    if (path / MANIFEST_FILE).exists():
        msg = f"A dataset already exists at {path}"
        raise StoreError(msg)
    path.mkdir(parents=True, exist_ok=True)
    (path / TRACES_FILE).write_text(
        FileHeader(format=TRACES_FORMAT).model_dump_json() + "\n", encoding="utf-8"
    )
    (path / SNAPSHOTS_FILE).write_text(
        _snapshot_header().model_dump_json() + "\n", encoding="utf-8"
    )
    manifest = StoreManifest(
        dataset_id=dataset_id,
        observation=observation or ObservationConfig(),
        provenance=(provenance,) if provenance else (),
    )
    _write_manifest(path, manifest)
    logger.info("Created dataset %s at %s", dataset_id, path)
    return DatasetHandle(root=path, manifest=manifest)


def open_dataset(root: str | Path) -> DatasetHandle:
    """Open an existing dataset.

    Raises:
        StoreError: missing, unreadable or unsupported manifest
    """
    path = Path(root)
    manifest_path = path / MANIFEST_FILE
    if not manifest_path.is_file():
        msg = f"No dataset manifest at {manifest_path}"
        raise StoreError(msg)
    try:
        manifest = StoreManifest.model_validate_json(manifest_path.read_text(encoding="utf-8"))
    except ValidationError as e:
        msg = f"Corrupt manifest {manifest_path}: {e}"
        raise StoreError(msg) from e
    if manifest.version != STORE_VERSION or manifest.schema_version != SCHEMA_VERSION:
        msg = (
            f"Unsupported dataset format at {path}: store v{manifest.version}, "
            f"schema v{manifest.schema_version}"
        )
        raise StoreError(msg)
    return DatasetHandle(root=path, manifest=manifest)


def _read_lines(path: Path, expected_format: str) -> Iterator[str]:
    if not path.is_file():
        msg = f"Missing store file {path}"
        raise StoreError(msg)
    with path.open(encoding="utf-8") as f:
        header_line = f.readline()
        try:
            header = FileHeader.model_validate_json(header_line)
        except ValidationError as e:
            msg = f"Bad header in {path}: {e}"
            raise StoreError(msg) from e
        if header.format != expected_format or header.version != STORE_VERSION:
            msg = f"{path} is {header.format} v{header.version}, expected {expected_format}"
            raise StoreError(msg)
        if expected_format == SNAPSHOTS_FORMAT and (
            header.machine_fields != MACHINE_FIELD_NAMES
            or header.tweet_fields != TWEET_FIELD_NAMES
        ):
            msg = f"{path} was written with a different field catalogue"
            raise StoreError(msg)
        for line in f:
            if line.strip():
                yield line


def iter_trace_records(handle: DatasetHandle) -> Iterator[TraceRecord]:
    """Trace records in stored order, restricted to the handle's view."""
    wanted = set(handle.trace_ids) if handle.trace_ids is not None else None
    for line in _read_lines(handle.root / TRACES_FILE, TRACES_FORMAT):
        try:
            record = TraceRecord.model_validate_json(line)
        except ValidationError as e:
            msg = f"Corrupt trace record in {handle.root}: {e}"
            raise StoreError(msg) from e
        if wanted is None or record.trace_id in wanted:
            yield record


def iter_snapshots(handle: DatasetHandle) -> Iterator[Snapshot]:
    """Snapshots in stored order, restricted to the handle's view."""
    wanted = set(handle.trace_ids) if handle.trace_ids is not None else None
    for line in _read_lines(handle.root / SNAPSHOTS_FILE, SNAPSHOTS_FORMAT):
        try:
            snapshot = Snapshot.model_validate_json(line)
        except ValidationError as e:
            msg = f"Corrupt snapshot record in {handle.root}: {e}"
            raise StoreError(msg) from e
        if wanted is None or snapshot.trace_id in wanted:
            yield snapshot


def trace_index(handle: DatasetHandle) -> list[tuple[str, Label]]:
    """(trace_id, truth) of the selected traces in stored order."""
    return [(r.trace_id, r.truth) for r in iter_trace_records(handle)]


def load_traces(handle: DatasetHandle) -> list[UrlTrace]:
    """Selected traces, fully assembled, in stored order."""
    grouped: dict[str, list[Snapshot]] = {}
    for snapshot in iter_snapshots(handle):
        grouped.setdefault(snapshot.trace_id, []).append(snapshot)
    traces = [r.to_trace(grouped.get(r.trace_id, [])) for r in iter_trace_records(handle)]
    logger.debug("Loaded %d traces from %s", len(traces), handle.dataset_id)
    return traces


def _require_writable(handle: DatasetHandle) -> StoreManifest:
    if handle.is_view:
        msg = f"Dataset view {handle.dataset_id} is read-only; materialize it first"
        raise StoreError(msg)
    current = open_dataset(handle.root).manifest
    if current.sealed:
        msg = f"Dataset {current.dataset_id} is sealed"
        raise StoreError(msg)
    return current


def _stored_ids(root: Path, manifest: StoreManifest) -> set[str]:
    return {r.trace_id for r in iter_trace_records(DatasetHandle(root=root, manifest=manifest))}


def _stored_steps(
    root: Path, manifest: StoreManifest, trace_ids: Collection[str] | None = None
) -> dict[str, list[int]]:
    """Stored time steps per trace, in file order, duplicates kept."""
    steps: dict[str, list[int]] = {}
    for snapshot in iter_snapshots(DatasetHandle(root=root, manifest=manifest)):
        if trace_ids is None or snapshot.trace_id in trace_ids:
            steps.setdefault(snapshot.trace_id, []).append(snapshot.time_step)
    return steps


def _check_snapshot(snapshot: Snapshot, period: int) -> None:
    machine_missing = snapshot.machine.missing_fields()
    tweet_missing = snapshot.tweet.missing_fields()
    unexpected = snapshot.machine.unexpected_fields() + snapshot.tweet.unexpected_fields()
    if machine_missing or tweet_missing or unexpected:
        msg = (
            f"Snapshot {snapshot.trace_id}@{snapshot.time_step} has "
            f"{snapshot.attribute_count} attributes, expected "
            f"{len(MACHINE_FIELD_NAMES) + len(TWEET_FIELD_NAMES)}"
        )
        raise SchemaMismatchError(msg)
    if snapshot.time_step > period:
        msg = f"Snapshot {snapshot.trace_id} step {snapshot.time_step} exceeds period {period}"
        raise SchemaMismatchError(msg)


def append_snapshots(handle: DatasetHandle, snapshots: Iterable[Snapshot]) -> DatasetHandle:
    """Append snapshots of traces already recorded in the dataset.

    Raises:
        SchemaMismatchError: a snapshot does not carry exactly the 78 catalogue fields,
            or its (trace, step) is already stored or repeated in the batch
        StoreError: view, sealed dataset, unknown trace or concurrent writer
    """
    batch = list(snapshots)
    with _writer(handle.root):
        manifest = _require_writable(handle)
        known = _stored_ids(handle.root, manifest)
        stored = _stored_steps(handle.root, manifest, {s.trace_id for s in batch})
        seen = {(trace_id, step) for trace_id, steps in stored.items() for step in steps}
        for snapshot in batch:
            _check_snapshot(snapshot, manifest.observation.period_p)
            if snapshot.trace_id not in known:
                msg = f"Snapshot for unknown trace {snapshot.trace_id}; append the trace first"
                raise StoreError(msg)
            key = (snapshot.trace_id, snapshot.time_step)
            if key in seen:
                msg = f"Duplicate snapshot {snapshot.trace_id}@{snapshot.time_step}"
                raise SchemaMismatchError(msg)
            seen.add(key)

        with _rollback(handle.root / SNAPSHOTS_FILE):
            written = _append_lines(
                handle.root / SNAPSHOTS_FILE, (s.model_dump_json() for s in batch)
            )
            updated = manifest.model_copy(
                update={"snapshot_count": manifest.snapshot_count + written}
            )
            _write_manifest(handle.root, updated)
    logger.debug("Appended %d snapshots to %s", written, updated.dataset_id)
    return DatasetHandle(root=handle.root, manifest=updated)


def append_traces(
    handle: DatasetHandle,
    traces: Iterable[UrlTrace],
    *,
    provenance: DatasetProvenance | None = None,
) -> DatasetHandle:
    """Append whole traces (record line plus snapshot lines).

    Raises:
        SchemaMismatchError: a trace violates a trace invariant
        StoreError: view, sealed dataset, duplicate trace id or concurrent writer
    """
    batch = list(traces)
    with _writer(handle.root):
        manifest = _require_writable(handle)
        known = _stored_ids(handle.root, manifest)
        for trace in batch:
            result = validate_trace(trace, manifest.observation)
            if not result.ok:
                msg = f"Trace {trace.trace_id} rejected: {'; '.join(result.messages())}"
                raise SchemaMismatchError(msg)
            if trace.trace_id in known:
                msg = f"Trace {trace.trace_id} is already stored"
                raise StoreError(msg)
            known.add(trace.trace_id)

        counts = manifest.trace_counts
        tags = list(manifest.event_tags)
        generations = list(manifest.label_generations)
        for trace in batch:
            counts = counts.plus(trace.truth)
            if trace.event_tag not in tags:
                tags.append(trace.event_tag)
            if trace.label_generation is not None and trace.label_generation not in generations:
                generations.append(trace.label_generation)

        # snapshots first: readers only see traces through their records
        with _rollback(handle.root / SNAPSHOTS_FILE, handle.root / TRACES_FILE):
            written = _append_lines(
                handle.root / SNAPSHOTS_FILE,
                (s.model_dump_json() for t in batch for s in t.snapshots),
            )
            _append_lines(
                handle.root / TRACES_FILE,
                (TraceRecord.from_trace(t).model_dump_json() for t in batch),
            )
            updated = manifest.model_copy(
                update={
                    "trace_counts": counts,
                    "snapshot_count": manifest.snapshot_count + written,
                    "event_tags": tuple(tags),
                    "label_generations": tuple(sorted(generations)),
                    "provenance": manifest.provenance + ((provenance,) if provenance else ()),
                }
            )
            _write_manifest(handle.root, updated)
    logger.info(
        "Appended %d traces (%d snapshots) to %s", len(batch), written, updated.dataset_id
    )
    return DatasetHandle(root=handle.root, manifest=updated)


def append_trace(handle: DatasetHandle, trace: UrlTrace) -> DatasetHandle:
    """Append one trace."""
    return append_traces(handle, [trace])


def register_trace(handle: DatasetHandle, record: TraceRecord) -> DatasetHandle:
    """Record a trace whose snapshots will arrive through append_snapshots.

    Raises:
        StoreError: view, sealed dataset, duplicate trace id or concurrent writer
    """
    with _writer(handle.root):
        manifest = _require_writable(handle)
        if record.trace_id in _stored_ids(handle.root, manifest):
            msg = f"Trace {record.trace_id} is already stored"
            raise StoreError(msg)
        tags = manifest.event_tags
        if record.event_tag not in tags:
            tags = (*tags, record.event_tag)
        generations = manifest.label_generations
        if record.label_generation is not None and record.label_generation not in generations:
            generations = tuple(sorted((*generations, record.label_generation)))
        with _rollback(handle.root / TRACES_FILE):
            _append_lines(handle.root / TRACES_FILE, [record.model_dump_json()])
            updated = manifest.model_copy(
                update={
                    "trace_counts": manifest.trace_counts.plus(record.truth),
                    "event_tags": tags,
                    "label_generations": generations,
                }
            )
            _write_manifest(handle.root, updated)
    return DatasetHandle(root=handle.root, manifest=updated)


def write_dataset(
    root: str | Path,
    traces: Iterable[UrlTrace],
    *,
    dataset_id: str,
    observation: ObservationConfig | None = None,
    provenance: DatasetProvenance | None = None,
    seal_after: bool = False,
) -> DatasetHandle:
    """Create a dataset holding the given traces."""
    handle = create_dataset(root, dataset_id, observation=observation, provenance=provenance)
    handle = append_traces(handle, traces)
    return seal(handle) if seal_after else handle


def seal(handle: DatasetHandle) -> DatasetHandle:
    """Mark a dataset read-only.

    Raises:
        StoreError: view, already sealed, concurrent writer, or a stored trace
            that is incomplete or inconsistent with the manifest
    """
    with _writer(handle.root):
        manifest = _require_writable(handle)
        problems = verify_dataset(DatasetHandle(root=handle.root, manifest=manifest))
        if problems:
            msg = f"Cannot seal {manifest.dataset_id}: {'; '.join(problems)}"
            raise StoreError(msg)
        updated = manifest.model_copy(update={"sealed": True})
        _write_manifest(handle.root, updated)
    logger.info("Sealed dataset %s", updated.dataset_id)
    return DatasetHandle(root=handle.root, manifest=updated)


def verify_dataset(handle: DatasetHandle) -> list[str]:
    """Problems with the stored records (empty when consistent).

    Reports manifest count mismatches and every trace whose stored steps
    are not exactly 1..period_p.
    """
    root_handle = DatasetHandle(root=handle.root, manifest=handle.manifest)
    problems: list[str] = []
    counts = ClassCounts()
    steps = _stored_steps(handle.root, handle.manifest)
    expected = list(range(1, handle.observation.period_p + 1))
    for record in iter_trace_records(root_handle):
        counts = counts.plus(record.truth)
        stored = sorted(steps.get(record.trace_id, []))
        if stored != expected:
            problems.append(
                f"trace {record.trace_id} has steps {stored}, expected 1..{expected[-1]}"
            )
    if counts != handle.manifest.trace_counts:
        problems.append(
            f"trace counts {counts.model_dump()} != manifest "
            f"{handle.manifest.trace_counts.model_dump()}"
        )
    n_snapshots = sum(1 for _ in _read_lines(handle.root / SNAPSHOTS_FILE, SNAPSHOTS_FORMAT))
    if n_snapshots != handle.manifest.snapshot_count:
        problems.append(
            f"snapshot count {n_snapshots} != manifest {handle.manifest.snapshot_count}"
        )
    return problems


def _view(
    handle: DatasetHandle, selected: list[tuple[str, Label]], view: str
) -> DatasetHandle:
    counts = ClassCounts()
    for _, label in selected:
        counts = counts.plus(label)
    base = DatasetHandle(root=handle.root, manifest=handle.manifest)
    suffix = f"{handle.view}/{view}" if handle.view else view
    return base.model_copy(
        update={
            "trace_ids": tuple(trace_id for trace_id, _ in selected),
            "view": suffix,
            "view_counts": counts,
        }
    )


def _check_fraction(fraction: float) -> None:
    if not 0.0 < fraction <= 1.0:
        msg = f"fraction must lie in (0, 1], got {fraction}"
        raise ConfigError(msg)


def systematic_sample(handle: DatasetHandle, fraction: float, seed: int) -> DatasetHandle:
    """Every k-th trace (k = 1 / fraction rounded, halves up) from a seeded random start.

    Raises:
        ConfigError: fraction outside (0, 1]
    """
    _check_fraction(fraction)
    index = trace_index(handle)
    k = max(1, math.floor(1.0 / fraction + 0.5))
    start = int(np.random.default_rng(seed).integers(0, k)) if k > 1 else 0
    selected = index[start::k]
    logger.info(
        "Systematic sample of %s: k=%d start=%d -> %d of %d traces",
        handle.dataset_id,
        k,
        start,
        len(selected),
        len(index),
    )
    return _view(handle, selected, f"sample({fraction:g},seed={seed})")


def stratified_take(n: int, fraction: float) -> int:
    """Traces of a class kept at a fraction: round(n * fraction), halves up."""
    return math.floor(n * fraction + 0.5)


def nested_fraction_split(
    index: Sequence[tuple[str, Label]],
    fractions: Sequence[float],
    seed: int,
    *,
    source: str = "dataset",
) -> list[list[tuple[str, Label]]]:
    """Nested, class-stratified selections of (trace_id, truth) pairs.

    Each class is permuted once with the seed; the selection for a
    fraction takes the first round(fraction * class size) traces of each
    class, so smaller selections are contained in larger ones. Selections
    keep the input order.

    Raises:
        ConfigError: fractions not ascending or outside (0, 1]
        InsufficientDataError: a class is empty at the smallest fraction
    """
    if not fractions:
        msg = "At least one fraction is required"
        raise ConfigError(msg)
    for fraction in fractions:
        _check_fraction(fraction)
    if list(fractions) != sorted(fractions):
        msg = f"Fractions must be ascending, got {list(fractions)}"
        raise ConfigError(msg)

    position = {trace_id: i for i, (trace_id, _) in enumerate(index)}
    rng = np.random.default_rng(seed)
    by_class: dict[Label, list[str]] = {}
    for label in (Label.BENIGN, Label.MALICIOUS):
        members = [trace_id for trace_id, truth in index if truth is label]
        by_class[label] = [members[i] for i in rng.permutation(len(members))]

    smallest = fractions[0]
    for label, members in by_class.items():
        if stratified_take(len(members), smallest) == 0:
            msg = (
                f"No {label.value} trace survives the {smallest:g} subset of "
                f"{source} ({len(members)} available)"
            )
            raise InsufficientDataError(msg)

    truth = dict(index)
    selections = []
    for fraction in fractions:
        chosen = [
            trace_id
            for members in by_class.values()
            for trace_id in members[: stratified_take(len(members), fraction)]
        ]
        chosen.sort(key=position.__getitem__)
        selections.append([(trace_id, truth[trace_id]) for trace_id in chosen])
    return selections


def split_by_fraction(
    handle: DatasetHandle, fractions: Sequence[float], seed: int
) -> list[DatasetHandle]:
    """Nested, class-stratified, trace-level views, one per fraction.

    Raises:
        ConfigError: fractions not ascending or outside (0, 1]
        InsufficientDataError: a class is empty at the smallest fraction
    """
    selections = nested_fraction_split(
        trace_index(handle), fractions, seed, source=handle.dataset_id
    )
    subsets = [
        _view(handle, selected, f"split({fraction:g},seed={seed})")
        for fraction, selected in zip(fractions, selections, strict=True)
    ]
    logger.info(
        "Split %s into %s",
        handle.dataset_id,
        ", ".join(f"{f:g}:{s.counts.total}" for f, s in zip(fractions, subsets, strict=True)),
    )
    return subsets


def materialize(
    handle: DatasetHandle, dest: str | Path, *, dataset_id: str | None = None
) -> DatasetHandle:
    """Copy the selected traces into a standalone dataset."""
    traces = load_traces(handle)
    provenance = DatasetProvenance(
        source="view" if handle.is_view else "copy",
        parent=handle.dataset_id,
        details={"view": handle.view} if handle.view else {},
    )
    return write_dataset(
        dest,
        traces,
        dataset_id=dataset_id or handle.dataset_id.replace(":", "_"),
        observation=handle.observation,
        provenance=provenance,
    )


def import_traces(
    source: str | Path,
    dest: str | Path,
    *,
    dataset_id: str,
    observation: ObservationConfig | None = None,
) -> DatasetHandle:
    """Import a file of UrlTrace JSON lines into a new dataset.

    Raises:
        DataError: missing file, unreadable line or invalid trace
    """
    path = Path(source)
    if not path.is_file():
        msg = f"Trace file not found: {path}"
        raise StoreError(msg)
    traces = []
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                traces.append(UrlTrace.model_validate_json(line))
            except ValidationError as e:
                msg = f"{path}:{lineno}: not a trace record: {e}"
                raise SchemaMismatchError(msg) from e
    provenance = DatasetProvenance(source="import", details={"path": str(path)})
    return write_dataset(
        dest,
        traces,
        dataset_id=dataset_id,
        observation=observation,
        provenance=provenance,
    )


def dataset_stats(handle: DatasetHandle) -> DatasetStats:
    """Per-class counts and metadata of the selected traces."""
    counts = handle.counts
    if handle.is_view:
        n_snapshots = sum(1 for _ in iter_snapshots(handle))
    else:
        n_snapshots = handle.manifest.snapshot_count
    return DatasetStats(
        dataset_id=handle.dataset_id,
        trace_counts=counts,
        snapshot_count=n_snapshots,
        event_tags=handle.manifest.event_tags,
        label_generations=handle.manifest.label_generations,
        observation=handle.observation,
        sealed=handle.manifest.sealed,
        malicious_fraction=counts.malicious / counts.total if counts.total else 0.0,
    )
