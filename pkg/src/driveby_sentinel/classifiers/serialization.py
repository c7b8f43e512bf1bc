"""
Model container: a versioned UTF-8 JSON envelope.

    {"format": "driveby-model", "version": 1, "kind": ..., "schema": {...},
     "provenance": {...}, "params": {...}}

The header is checked before anything else is decoded, so a file written
by another container version fails with ModelVersionError rather than a
confusing decode error.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from driveby_sentinel.errors import ModelFormatError, ModelVersionError
from driveby_sentinel.features.extraction import FeatureSchema
from driveby_sentinel.models.config import ModelKind

from .base import ClassifierParams, Provenance, TrainedModel
from .bayes_net import TanParams
from .decision_tree import DecisionTreeParams
from .mlp import MlpNetwork
from .naive_bayes import NaiveBayesParams
from .vote import VoteParams

logger = logging.getLogger(__name__)

MODEL_FORMAT = "driveby-model"
MODEL_VERSION = 1

PARAMS_BY_KIND: dict[ModelKind, type[ClassifierParams]] = {
    ModelKind.NAIVE_BAYES: NaiveBayesParams,
    ModelKind.BAYES_NET_TAN: TanParams,
    ModelKind.DECISION_TREE: DecisionTreeParams,
    ModelKind.MLP: MlpNetwork,
    ModelKind.VOTE: VoteParams,
}


class ModelEnvelope(BaseModel):
    """On-disk layout of a trained model."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    format: str = MODEL_FORMAT
    version: int = MODEL_VERSION
    kind: ModelKind
    feature_schema: FeatureSchema = Field(alias="schema")
    provenance: Provenance
    params: dict[str, Any]


def decode_params(
    kind: ModelKind, payload: dict[str, Any], schema: FeatureSchema
) -> ClassifierParams:
    """Learned parameters of a kind from their payload.

    Raises:
        ModelFormatError: the payload does not describe that kind
    """
    try:
        return PARAMS_BY_KIND[kind].from_payload(payload, schema)
    except (KeyError, TypeError, ValueError, IndexError) as e:
        msg = f"Corrupt {kind.value} parameters: {e!r}"
        raise ModelFormatError(msg) from e


def serialize_model(model: TrainedModel) -> str:
    """JSON text of a model."""
    envelope = ModelEnvelope(
        kind=model.kind,
        feature_schema=model.schema,
        provenance=model.provenance,
        params=model.params.to_payload(),
    )
    return envelope.model_dump_json(by_alias=True)


def deserialize_model(text: str | bytes) -> TrainedModel:
    """Inverse of serialize_model.

    Raises:
        ModelVersionError: the container version is not supported
        ModelFormatError: not a model container or corrupt content
    """
    try:
        raw = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        msg = f"Model payload is not valid JSON: {e}"
        raise ModelFormatError(msg) from e
    if not isinstance(raw, dict) or raw.get("format") != MODEL_FORMAT:
        msg = "Payload is not a driveby-model container"
        raise ModelFormatError(msg)
    if raw.get("version") != MODEL_VERSION:
        msg = (
            f"Model container version {raw.get('version')!r} is not supported "
            f"(expected {MODEL_VERSION})"
        )
        raise ModelVersionError(msg)
    try:
        envelope = ModelEnvelope.model_validate(raw)
    except ValidationError as e:
        msg = f"Corrupt model container: {e}"
        raise ModelFormatError(msg) from e

    schema = envelope.feature_schema
    if schema.compute_fingerprint() != schema.fingerprint:
        msg = "Model feature schema does not match its fingerprint"
        raise ModelFormatError(msg)
    params = decode_params(envelope.kind, envelope.params, schema)
    if params.kind is not envelope.kind:
        msg = f"Parameters decode as {params.kind.value}, container says {envelope.kind.value}"
        raise ModelFormatError(msg)
    return TrainedModel(
        kind=envelope.kind, schema=schema, provenance=envelope.provenance, params=params
    )


def save_model(model: TrainedModel, path: str | Path) -> Path:
    """Write a model file."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(serialize_model(model) + "\n", encoding="utf-8")
    logger.info("Saved %s model to %s", model.kind.value, target)
    return target


def load_model(path: str | Path) -> TrainedModel:
    """Read a model file.

    Raises:
        ModelFormatError: missing or corrupt file
        ModelVersionError: unsupported container version
    """
    source = Path(path)
    if not source.is_file():
        msg = f"Model file not found: {source}"
        raise ModelFormatError(msg)
    model = deserialize_model(source.read_text(encoding="utf-8"))
    logger.debug("Loaded %s model from %s", model.kind.value, source)
    return model
