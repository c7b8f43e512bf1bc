"""
Average-probability vote over member models.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np

from driveby_sentinel.errors import ConfigError, SchemaMismatchError
from driveby_sentinel.models.config import ModelKind

from .base import ClassifierParams, Provenance, TrainedModel

if TYPE_CHECKING:
    from driveby_sentinel.features.extraction import FeatureSchema
    from driveby_sentinel.models.config import TrainConfig

logger = logging.getLogger(__name__)

MIN_MEMBERS = 2


class VoteParams(ClassifierParams):
    """Member models; the distribution is the mean of theirs."""

    kind: ClassVar[ModelKind] = ModelKind.VOTE

    def __init__(self, members: Sequence[TrainedModel]) -> None:
        self.members = tuple(members)

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        stacked = np.stack([m.params.predict_matrix(X) for m in self.members])
        return stacked.mean(axis=0)

    def to_payload(self) -> dict[str, Any]:
        return {
            "members": [
                {
                    "kind": m.kind.value,
                    "provenance": m.provenance.model_dump(mode="json"),
                    "params": m.params.to_payload(),
                }
                for m in self.members
            ]
        }

    @classmethod
    def from_payload(cls, payload: dict[str, Any], schema: FeatureSchema) -> VoteParams:
        # Import here to avoid circular imports
        from .serialization import decode_params  # noqa: PLC0415

        members = []
        for entry in payload["members"]:
            kind = ModelKind(entry["kind"])
            members.append(
                TrainedModel(
                    kind=kind,
                    schema=schema,
                    provenance=Provenance.model_validate(entry["provenance"]),
                    params=decode_params(kind, entry["params"], schema),
                )
            )
        return cls(members)


def train_vote(
    members: Sequence[TrainedModel],
    *,
    config: TrainConfig | None = None,
    dataset_id: str | None = None,
) -> TrainedModel:
    """Combine trained members into a vote model.

    Raises:
        ConfigError: fewer than two members
        SchemaMismatchError: members were trained on different feature schemas
    """
    if len(members) < MIN_MEMBERS:
        msg = f"A vote model needs at least {MIN_MEMBERS} members, got {len(members)}"
        raise ConfigError(msg)
    schema = members[0].schema
    for member in members[1:]:
        if member.schema.fingerprint != schema.fingerprint:
            msg = (
                f"Vote member {member.kind.value} uses schema "
                f"{member.schema.fingerprint[:12]}, expected {schema.fingerprint[:12]}"
            )
            raise SchemaMismatchError(msg)

    first = members[0].provenance
    if config is None:
        kinds = tuple(m.kind for m in members)
        config = first.config.model_copy(
            update={"algo": ModelKind.VOTE, "vote_members": kinds}
        )
    provenance = Provenance(
        dataset_id=dataset_id or first.dataset_id,
        config=config,
        label_generation=first.label_generation,
        n_instances=first.n_instances,
        n_traces=first.n_traces,
        n_malicious=first.n_malicious,
        summary={"members": [m.kind.value for m in members]},
    )
    logger.debug("Vote over %s", [m.kind.value for m in members])
    return TrainedModel(
        kind=ModelKind.VOTE, schema=schema, provenance=provenance, params=VoteParams(members)
    )
