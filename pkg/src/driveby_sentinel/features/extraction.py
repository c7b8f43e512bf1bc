"""
Feature extraction: cumulative windows, schema building and encoding.

Traces are tabulated once into a columnar SnapshotTable. A FeatureSchema
is built from training rows only and turns rows into fixed-length real
vectors: numeric values pass through (absent -> training median),
categoricals map to integer codes with 0 reserved for unseen or absent
values, and identifier-like fields are replaced by a log2 frequency bin
counted on the training rows.
"""

from __future__ import annotations

import hashlib
import logging
import math
from collections import Counter
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from driveby_sentinel.errors import (
    ConfigError,
    InsufficientDataError,
    LeakageError,
    SchemaMismatchError,
)
from driveby_sentinel.models.config import DEFAULT_IDENTIFIER_BINS
from driveby_sentinel.models.schema import (
    ALL_FIELDS,
    FIELDS_BY_NAME,
    FieldKind,
    FieldSource,
    FieldSpec,
)
from driveby_sentinel.models.types import (
    Label,
    MetricValue,
    ObservationConfig,
    Snapshot,
    UrlTrace,
)

logger = logging.getLogger(__name__)

UNLABELED = -1
RESERVED_CODE = 0

NUMERIC_FIELDS: tuple[FieldSpec, ...] = tuple(
    f for f in ALL_FIELDS if f.kind is not FieldKind.CATEGORICAL
)
CATEGORICAL_FIELDS: tuple[FieldSpec, ...] = tuple(
    f for f in ALL_FIELDS if f.kind is FieldKind.CATEGORICAL
)
_NUMERIC_COLUMN = {f.name: i for i, f in enumerate(NUMERIC_FIELDS)}
_CATEGORICAL_COLUMN = {f.name: i for i, f in enumerate(CATEGORICAL_FIELDS)}


class FeatureKind(str, Enum):
    """How a classifier should treat an encoded feature."""

    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


class Encoding(str, Enum):
    """How raw values become feature values."""

    VALUE = "value"
    CODE = "code"
    FREQUENCY = "frequency"


class FeatureDef(BaseModel):
    """One position of the encoded vector."""

    model_config = ConfigDict(frozen=True)

    name: str
    kind: FeatureKind
    source: FieldSource
    encoding: Encoding
    n_codes: int = Field(
        default=0, ge=0, description="Code count incl. the reserved 0 (categoricals)"
    )


class FeatureSchema(BaseModel):
    """Ordered features plus the encoding tables learned from training rows."""

    model_config = ConfigDict(frozen=True)

    features: tuple[FeatureDef, ...]
    include_tweet_meta: bool = True
    numeric_fill: dict[str, float] = Field(
        default_factory=dict, description="Training median used for absent values"
    )
    category_codes: dict[str, dict[str, int]] = Field(default_factory=dict)
    frequency_bins: dict[str, dict[str, int]] = Field(default_factory=dict)
    n_bins: int = Field(default=DEFAULT_IDENTIFIER_BINS, ge=1)
    source_trace_count: int = Field(default=0, ge=0)
    source_digest: str = Field(default="", description="sha256 of training trace ids")
    fingerprint: str = Field(default="")

    @property
    def names(self) -> tuple[str, ...]:
        """Feature names in vector order."""
        return tuple(f.name for f in self.features)

    @property
    def dimension(self) -> int:
        """Vector length."""
        return len(self.features)

    @property
    def categorical_mask(self) -> np.ndarray:
        """True at categorical positions."""
        return np.array([f.kind is FeatureKind.CATEGORICAL for f in self.features])

    @property
    def n_codes(self) -> np.ndarray:
        """Code counts per position (0 for numeric features)."""
        return np.array([f.n_codes for f in self.features], dtype=int)

    def index(self, name: str) -> int:
        """Position of a feature."""
        for i, feature in enumerate(self.features):
            if feature.name == name:
                return i
        msg = f"Feature {name} is not in the schema"
        raise SchemaMismatchError(msg)

    def compute_fingerprint(self) -> str:
        """sha256 over everything except the fingerprint itself."""
        payload = self.model_dump_json(exclude={"fingerprint"})
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def sealed(self) -> FeatureSchema:
        """Copy carrying its own fingerprint."""
        return self.model_copy(update={"fingerprint": self.compute_fingerprint()})


class FeatureVector(BaseModel):
    """One encoded snapshot."""

    model_config = ConfigDict(frozen=True)

    values: tuple[float, ...]
    label: Label | None = None
    fingerprint: str = Field(default="", description="Schema the vector was encoded with")


@dataclass(frozen=True)
class SnapshotTable:
    """Columnar view of many snapshots (one row per snapshot)."""

    trace_ids: np.ndarray
    steps: np.ndarray
    labels: np.ndarray
    numeric: np.ndarray
    categorical: np.ndarray

    def __len__(self) -> int:
        return len(self.steps)

    def select(self, mask: np.ndarray) -> SnapshotTable:
        """Rows where mask is true."""
        return SnapshotTable(
            trace_ids=self.trace_ids[mask],
            steps=self.steps[mask],
            labels=self.labels[mask],
            numeric=self.numeric[mask],
            categorical=self.categorical[mask],
        )

    def window(self, upto_step: int) -> SnapshotTable:
        """Rows with time_step in [1, upto_step]."""
        if upto_step < 1:
            msg = f"upto_step must be >= 1, got {upto_step}"
            raise ConfigError(msg)
        return self.select(self.steps <= upto_step)

    def select_traces(self, trace_ids: Collection[str]) -> SnapshotTable:
        """Rows belonging to the given traces."""
        wanted = np.array(sorted(trace_ids), dtype=object)
        return self.select(np.isin(self.trace_ids, wanted))

    def trace_labels(self) -> tuple[list[str], np.ndarray]:
        """Trace ids in first-appearance order with one label per trace."""
        labels: dict[str, int] = {}
        for trace_id, label in zip(self.trace_ids, self.labels, strict=True):
            labels.setdefault(str(trace_id), int(label))
        return list(labels), np.array(list(labels.values()), dtype=int)

    def trace_id_set(self) -> set[str]:
        """Distinct trace ids present."""
        return {str(t) for t in np.unique(self.trace_ids)} if len(self) else set()


def cumulative_window(
    trace: UrlTrace, upto_step: int, cfg: ObservationConfig | None = None
) -> list[Snapshot]:
    """Snapshots with time_step in [1, upto_step], in step order.

    Raises:
        ConfigError: upto_step outside [1, period_p]
    """
    period = cfg.period_p if cfg is not None else len(trace.snapshots)
    if not 1 <= upto_step <= period:
        msg = f"upto_step {upto_step} outside [1, {period}]"
        raise ConfigError(msg)
    ordered = sorted(trace.snapshots, key=lambda s: s.time_step)
    return [s for s in ordered if s.time_step <= upto_step]


def _raw(snapshot: Snapshot, field_spec: FieldSpec) -> MetricValue:
    group = snapshot.machine if field_spec.source is FieldSource.MACHINE else snapshot.tweet
    if field_spec.name not in group.values:
        msg = f"Snapshot {snapshot.trace_id}@{snapshot.time_step} lacks field {field_spec.name}"
        raise SchemaMismatchError(msg)
    return group.values[field_spec.name]


def _as_float(value: MetricValue, name: str) -> float:
    if value is None:
        return math.nan
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    if isinstance(value, (int, float)):
        return float(value)
    msg = f"Field {name} expects a number, got {value!r}"
    raise SchemaMismatchError(msg)


def _check_field_set(snapshot: Snapshot) -> None:
    extra = snapshot.machine.unexpected_fields() + snapshot.tweet.unexpected_fields()
    if extra:
        msg = (
            f"Snapshot {snapshot.trace_id}@{snapshot.time_step} has unknown fields: "
            f"{', '.join(extra)}"
        )
        raise SchemaMismatchError(msg)


def tabulate(items: Iterable[UrlTrace] | Iterable[Snapshot]) -> SnapshotTable:
    """Columnar table of snapshots; traces contribute all their snapshots.

    Trace rows take the trace's truth as label; bare snapshots keep their
    own label (or none).

    Raises:
        SchemaMismatchError: a snapshot lacks a catalogue field or holds a
            non-numeric value in a numeric field
    """
    rows: list[tuple[Snapshot, int]] = []
    for item in items:
        if isinstance(item, UrlTrace):
            label = item.truth.index
            rows.extend(
                (s, label) for s in sorted(item.snapshots, key=lambda s: s.time_step)
            )
        else:
            rows.append((item, item.label.index if item.label is not None else UNLABELED))

    n = len(rows)
    numeric = np.full((n, len(NUMERIC_FIELDS)), np.nan)
    categorical = np.full((n, len(CATEGORICAL_FIELDS)), None, dtype=object)
    for i, (snapshot, _) in enumerate(rows):
        _check_field_set(snapshot)
        for j, field_spec in enumerate(NUMERIC_FIELDS):
            numeric[i, j] = _as_float(_raw(snapshot, field_spec), field_spec.name)
        for j, field_spec in enumerate(CATEGORICAL_FIELDS):
            value = _raw(snapshot, field_spec)
            categorical[i, j] = None if value is None else str(value)

    return SnapshotTable(
        trace_ids=np.array([s.trace_id for s, _ in rows], dtype=object),
        steps=np.array([s.time_step for s, _ in rows], dtype=int),
        labels=np.array([label for _, label in rows], dtype=int),
        numeric=numeric,
        categorical=categorical,
    )


def _included(include_tweet_meta: bool) -> tuple[FieldSpec, ...]:  # noqa: FBT001
    return tuple(
        f for f in ALL_FIELDS if include_tweet_meta or f.source is FieldSource.MACHINE
    )


def frequency_bin(count: int, n_bins: int) -> int:
    """Bin of a training frequency: 1 + min(n_bins - 1, floor(log2 count))."""
    if count <= 0:
        return RESERVED_CODE
    return 1 + min(n_bins - 1, int(math.floor(math.log2(count))))


def _digest(trace_ids: Iterable[str]) -> str:
    joined = "\n".join(sorted(trace_ids))
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()


def build_schema(
    table: SnapshotTable,
    *,
    include_tweet_meta: bool = True,
    n_bins: int = DEFAULT_IDENTIFIER_BINS,
    exclude_trace_ids: Collection[str] = (),
) -> FeatureSchema:
    """Learn encoding tables from training rows.

    Args:
        table: Training rows (already windowed)
        include_tweet_meta: False drops the 24 tweet fields
        n_bins: Frequency bins for identifier fields
        exclude_trace_ids: Traces that must not contribute (test partition)

    Raises:
        InsufficientDataError: table is empty
        LeakageError: a row belongs to an excluded trace
    """
    if len(table) == 0:
        msg = "Cannot build a feature schema from zero snapshots"
        raise InsufficientDataError(msg)
    source_ids = table.trace_id_set()
    leaked = source_ids.intersection(exclude_trace_ids)
    if leaked:
        msg = f"{len(leaked)} excluded traces would shape the encoding tables"
        raise LeakageError(msg)

    features: list[FeatureDef] = []
    fill: dict[str, float] = {}
    codes: dict[str, dict[str, int]] = {}
    bins: dict[str, dict[str, int]] = {}
    for field_spec in _included(include_tweet_meta):
        if field_spec.kind is not FieldKind.CATEGORICAL:
            column = table.numeric[:, _NUMERIC_COLUMN[field_spec.name]]
            present = column[~np.isnan(column)]
            fill[field_spec.name] = float(np.median(present)) if present.size else 0.0
            features.append(
                FeatureDef(
                    name=field_spec.name,
                    kind=FeatureKind.NUMERIC,
                    source=field_spec.source,
                    encoding=Encoding.VALUE,
                )
            )
            continue
        column = table.categorical[:, _CATEGORICAL_COLUMN[field_spec.name]]
        observed = [v for v in column if v is not None]
        if field_spec.identifier:
            counts = Counter(observed)
            bins[field_spec.name] = {v: frequency_bin(counts[v], n_bins) for v in sorted(counts)}
            features.append(
                FeatureDef(
                    name=field_spec.name,
                    kind=FeatureKind.CATEGORICAL,
                    source=field_spec.source,
                    encoding=Encoding.FREQUENCY,
                    n_codes=n_bins + 1,
                )
            )
        else:
            values = sorted(set(observed))
            codes[field_spec.name] = {v: i + 1 for i, v in enumerate(values)}
            features.append(
                FeatureDef(
                    name=field_spec.name,
                    kind=FeatureKind.CATEGORICAL,
                    source=field_spec.source,
                    encoding=Encoding.CODE,
                    n_codes=len(values) + 1,
                )
            )

    schema = FeatureSchema(
        features=tuple(features),
        include_tweet_meta=include_tweet_meta,
        numeric_fill=fill,
        category_codes=codes,
        frequency_bins=bins,
        n_bins=n_bins,
        source_trace_count=len(source_ids),
        source_digest=_digest(source_ids),
    ).sealed()
    logger.debug(
        "Built schema with %d features from %d snapshots of %d traces",
        schema.dimension,
        len(table),
        len(source_ids),
    )
    return schema


def _lookup(schema: FeatureSchema, feature: FeatureDef) -> dict[str, int]:
    if feature.encoding is Encoding.FREQUENCY:
        return schema.frequency_bins.get(feature.name, {})
    return schema.category_codes.get(feature.name, {})


def encode(snapshot: Snapshot, schema: FeatureSchema) -> FeatureVector:
    """Encode one snapshot; a pure function of (snapshot, schema).

    Raises:
        SchemaMismatchError: the snapshot does not carry the schema's fields
    """
    _check_field_set(snapshot)
    values: list[float] = []
    for feature in schema.features:
        field_spec = FIELDS_BY_NAME.get(feature.name)
        if field_spec is None:
            msg = f"Feature {feature.name} is not a catalogue field"
            raise SchemaMismatchError(msg)
        raw = _raw(snapshot, field_spec)
        if feature.kind is FeatureKind.NUMERIC:
            value = _as_float(raw, feature.name)
            fill = schema.numeric_fill.get(feature.name, 0.0)
            values.append(fill if math.isnan(value) else value)
        elif raw is None:
            values.append(float(RESERVED_CODE))
        else:
            values.append(float(_lookup(schema, feature).get(str(raw), RESERVED_CODE)))
    return FeatureVector(
        values=tuple(values), label=snapshot.label, fingerprint=schema.fingerprint
    )


@dataclass(frozen=True)
class FeatureMatrix:
    """Encoded rows with their labels and origin."""

    X: np.ndarray
    y: np.ndarray
    trace_ids: np.ndarray
    steps: np.ndarray
    schema: FeatureSchema

    def __len__(self) -> int:
        return int(self.X.shape[0])

    def subset(self, mask: np.ndarray) -> FeatureMatrix:
        """Rows where mask is true."""
        return FeatureMatrix(
            X=self.X[mask],
            y=self.y[mask],
            trace_ids=self.trace_ids[mask],
            steps=self.steps[mask],
            schema=self.schema,
        )

    def vector(self, i: int) -> FeatureVector:
        """Row i as a FeatureVector."""
        label = Label.from_index(int(self.y[i])) if self.y[i] != UNLABELED else None
        return FeatureVector(
            values=tuple(float(v) for v in self.X[i]),
            label=label,
            fingerprint=self.schema.fingerprint,
        )

    @classmethod
    def from_arrays(
        cls,
        X: Sequence[Sequence[float]] | np.ndarray,
        y: Sequence[int] | np.ndarray,
        *,
        categorical: dict[int, int] | None = None,
        names: Sequence[str] | None = None,
    ) -> FeatureMatrix:
        """Matrix over ad-hoc features, for training on arrays directly.

        Args:
            X: Rows of feature values
            y: Class indices (benign=0, malicious=1)
            categorical: Position -> code count for categorical features
            names: Feature names (default x0, x1, ...)
        """
        data = np.asarray(X, dtype=float)
        if data.ndim != 2:  # noqa: PLR2004
            msg = f"Expected a 2-D array, got shape {data.shape}"
            raise SchemaMismatchError(msg)
        categorical = categorical or {}
        labels = names or [f"x{i}" for i in range(data.shape[1])]
        features = tuple(
            FeatureDef(
                name=labels[i],
                kind=FeatureKind.CATEGORICAL if i in categorical else FeatureKind.NUMERIC,
                source=FieldSource.MACHINE,
                encoding=Encoding.CODE if i in categorical else Encoding.VALUE,
                n_codes=categorical.get(i, 0),
            )
            for i in range(data.shape[1])
        )
        schema = FeatureSchema(features=features, include_tweet_meta=False).sealed()
        n = data.shape[0]
        return cls(
            X=data,
            y=np.asarray(y, dtype=int),
            trace_ids=np.array([f"row-{i}" for i in range(n)], dtype=object),
            steps=np.ones(n, dtype=int),
            schema=schema,
        )


def encode_table(table: SnapshotTable, schema: FeatureSchema) -> FeatureMatrix:
    """Encode every row of a table; agrees row by row with encode()."""
    X = np.empty((len(table), schema.dimension), dtype=float)
    for j, feature in enumerate(schema.features):
        if feature.kind is FeatureKind.NUMERIC:
            if feature.name not in _NUMERIC_COLUMN:
                msg = f"Feature {feature.name} is not a numeric catalogue field"
                raise SchemaMismatchError(msg)
            column = table.numeric[:, _NUMERIC_COLUMN[feature.name]]
            fill = schema.numeric_fill.get(feature.name, 0.0)
            X[:, j] = np.where(np.isnan(column), fill, column)
        else:
            if feature.name not in _CATEGORICAL_COLUMN:
                msg = f"Feature {feature.name} is not a categorical catalogue field"
                raise SchemaMismatchError(msg)
            lookup = _lookup(schema, feature)
            column = table.categorical[:, _CATEGORICAL_COLUMN[feature.name]]
            X[:, j] = np.fromiter(
                (RESERVED_CODE if v is None else lookup.get(v, RESERVED_CODE) for v in column),
                dtype=float,
                count=len(column),
            )
    return FeatureMatrix(
        X=X,
        y=table.labels.copy(),
        trace_ids=table.trace_ids,
        steps=table.steps,
        schema=schema,
    )
