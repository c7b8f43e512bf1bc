"""
Uniform classifier interface.

Every learner produces a ClassifierParams implementation; a TrainedModel
bundles it with the feature schema it was trained against and the
provenance needed to retrain it. Probability columns are always ordered
[benign, malicious] to match the class indices.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from driveby_sentinel.errors import (
    InsufficientDataError,
    SchemaMismatchError,
    SingleClassError,
)
from driveby_sentinel.features.extraction import UNLABELED, FeatureMatrix
from driveby_sentinel.models.config import ModelKind, TrainConfig
from driveby_sentinel.models.types import ClassDistribution

if TYPE_CHECKING:
    from driveby_sentinel.features.extraction import FeatureSchema, FeatureVector

logger = logging.getLogger(__name__)

N_CLASSES = 2


class ClassifierParams(ABC):
    """Learned parameters of one classifier family."""

    kind: ClassVar[ModelKind]

    @abstractmethod
    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        """Class probabilities for each row, shape (n, 2), columns [benign, malicious]."""

    @abstractmethod
    def to_payload(self) -> dict[str, Any]:
        """JSON-ready representation; floats must round-trip exactly."""

    @classmethod
    @abstractmethod
    def from_payload(cls, payload: dict[str, Any], schema: FeatureSchema) -> ClassifierParams:
        """Inverse of to_payload."""


class Provenance(BaseModel):
    """How a model was trained."""

    model_config = ConfigDict(frozen=True)

    dataset_id: str = Field(description="Training dataset (or view) id")
    config: TrainConfig = Field(description="Algorithm, window, seed and hyperparameters")
    label_generation: int | None = Field(
        default=None, description="Exclusion-rule generation of the training labels"
    )
    n_instances: int = Field(ge=0, description="Training snapshots")
    n_traces: int = Field(ge=0, description="Training traces")
    n_malicious: int = Field(ge=0, description="Malicious training snapshots")
    summary: dict[str, Any] = Field(
        default_factory=dict, description="Learner-specific training summary"
    )


@dataclass(frozen=True)
class TrainedModel:
    """An immutable trained classifier."""

    kind: ModelKind
    schema: FeatureSchema
    provenance: Provenance
    params: ClassifierParams


def frozen_array(values: Any, dtype: type = float) -> np.ndarray:
    """Read-only copy of values as an array."""
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


def labeled_rows(data: FeatureMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Training rows with both classes present.

    Raises:
        InsufficientDataError: no labeled rows
        SingleClassError: only one class among the labeled rows
    """
    mask = data.y != UNLABELED
    X = data.X[mask]
    y = data.y[mask].astype(int)
    if y.size == 0:
        msg = "Training needs labeled snapshots, got none"
        raise InsufficientDataError(msg)
    present = np.unique(y)
    if present.size < N_CLASSES:
        msg = f"Training data holds a single class ({int(present[0])}); both are required"
        raise SingleClassError(msg)
    return X, y


def make_model(
    params: ClassifierParams,
    data: FeatureMatrix,
    config: TrainConfig,
    *,
    dataset_id: str = "adhoc",
    label_generation: int | None = None,
    summary: dict[str, Any] | None = None,
) -> TrainedModel:
    """Bundle learned parameters with their schema and provenance."""
    labeled = data.y != UNLABELED
    provenance = Provenance(
        dataset_id=dataset_id,
        config=config,
        label_generation=label_generation,
        n_instances=int(labeled.sum()),
        n_traces=len({str(t) for t in data.trace_ids[labeled]}),
        n_malicious=int((data.y == 1).sum()),
        summary=summary or {},
    )
    return TrainedModel(
        kind=params.kind, schema=data.schema, provenance=provenance, params=params
    )


def default_config(kind: ModelKind, data: FeatureMatrix, **updates: Any) -> TrainConfig:
    """TrainConfig for direct training calls outside the factory."""
    upto = int(data.steps.max()) if len(data) else 1
    return TrainConfig(
        algo=kind,
        upto_step=max(upto, 1),
        include_tweet_meta=data.schema.include_tweet_meta,
        **updates,
    )


def normalize_rows(P: np.ndarray) -> np.ndarray:
    """Rows rescaled to sum to one; all-zero rows become uniform."""
    totals = P.sum(axis=1, keepdims=True)
    uniform = np.full_like(P, 1.0 / P.shape[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(totals > 0, P / totals, uniform)


def softmax_log(log_p: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    """Normalize log-joint rows; rows with every class at -inf take the fallback."""
    dead = ~np.isfinite(log_p).any(axis=1)
    safe = np.where(dead[:, None], np.log(fallback)[None, :], log_p)
    shifted = safe - safe.max(axis=1, keepdims=True)
    P = np.exp(shifted)
    return P / P.sum(axis=1, keepdims=True)


def _check_width(model: TrainedModel, width: int) -> None:
    if width != model.schema.dimension:
        msg = (
            f"Vector has {width} features, model {model.kind.value} expects "
            f"{model.schema.dimension}"
        )
        raise SchemaMismatchError(msg)


def predict_proba_matrix(model: TrainedModel, data: FeatureMatrix | np.ndarray) -> np.ndarray:
    """Batch class probabilities, shape (n, 2), columns [benign, malicious].

    Raises:
        SchemaMismatchError: rows were encoded with another schema or have the wrong width
    """
    if isinstance(data, FeatureMatrix):
        if data.schema.fingerprint != model.schema.fingerprint:
            msg = "Feature matrix was encoded with a different schema than the model"
            raise SchemaMismatchError(msg)
        X = data.X
    else:
        X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    _check_width(model, X.shape[1])
    if X.shape[0] == 0:
        return np.empty((0, N_CLASSES))
    P = model.params.predict_matrix(X)
    return np.clip(P, 0.0, 1.0)


def predict_proba(model: TrainedModel, x: FeatureVector) -> ClassDistribution:
    """Class distribution for one encoded snapshot.

    Raises:
        SchemaMismatchError: the vector was encoded with another schema
    """
    if x.fingerprint and x.fingerprint != model.schema.fingerprint:
        msg = (
            f"Vector schema {x.fingerprint[:12]} does not match model schema "
            f"{model.schema.fingerprint[:12]}"
        )
        raise SchemaMismatchError(msg)
    _check_width(model, len(x.values))
    row = model.params.predict_matrix(np.asarray([x.values], dtype=float))[0]
    p_malicious = float(np.clip(row[1], 0.0, 1.0))
    return ClassDistribution(p_malicious=p_malicious, p_benign=1.0 - p_malicious)
