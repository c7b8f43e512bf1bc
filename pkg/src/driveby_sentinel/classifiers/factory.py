"""
Factory for training classifiers by name.

This module maps CLI algorithm names to model kinds and kinds to trainer
functions, so evaluation protocols and the adaptive cycle can retrain
"the same way" from a TrainConfig alone. Trainers can be replaced for
testing with set_trainer / reset_trainers.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from typing import TYPE_CHECKING

from driveby_sentinel.errors import ConfigError
from driveby_sentinel.models.config import ModelKind, TrainConfig

from .bayes_net import train_bayes_net_tan
from .decision_tree import train_decision_tree
from .mlp import train_mlp
from .naive_bayes import train_naive_bayes
from .vote import train_vote

if TYPE_CHECKING:
    from driveby_sentinel.features.extraction import FeatureMatrix

    from .base import TrainedModel

logger = logging.getLogger(__name__)

Trainer = Callable[["FeatureMatrix", TrainConfig, str, "int | None"], "TrainedModel"]

ALGORITHM_ALIASES: dict[str, ModelKind] = {
    "nb": ModelKind.NAIVE_BAYES,
    "tan": ModelKind.BAYES_NET_TAN,
    "j48": ModelKind.DECISION_TREE,
    "mlp": ModelKind.MLP,
    "vote": ModelKind.VOTE,
}


def _train_nb(
    data: FeatureMatrix, config: TrainConfig, dataset_id: str, generation: int | None
) -> TrainedModel:
    return train_naive_bayes(
        data, config.bayes, config=config, dataset_id=dataset_id, label_generation=generation
    )


def _train_tan(
    data: FeatureMatrix, config: TrainConfig, dataset_id: str, generation: int | None
) -> TrainedModel:
    return train_bayes_net_tan(
        data, config.bayes, config=config, dataset_id=dataset_id, label_generation=generation
    )


def _train_tree(
    data: FeatureMatrix, config: TrainConfig, dataset_id: str, generation: int | None
) -> TrainedModel:
    return train_decision_tree(
        data, config.tree, config=config, dataset_id=dataset_id, label_generation=generation
    )


def _train_mlp(
    data: FeatureMatrix, config: TrainConfig, dataset_id: str, generation: int | None
) -> TrainedModel:
    return train_mlp(
        data,
        config.mlp,
        seed=config.seed,
        config=config,
        dataset_id=dataset_id,
        label_generation=generation,
    )


def _train_vote(
    data: FeatureMatrix, config: TrainConfig, dataset_id: str, generation: int | None
) -> TrainedModel:
    members = [
        train_model(
            data,
            config.model_copy(update={"algo": kind}),
            dataset_id=dataset_id,
            label_generation=generation,
        )
        for kind in config.vote_members
    ]
    return train_vote(members, config=config, dataset_id=dataset_id)


_DEFAULT_TRAINERS: dict[ModelKind, Trainer] = {
    ModelKind.NAIVE_BAYES: _train_nb,
    ModelKind.BAYES_NET_TAN: _train_tan,
    ModelKind.DECISION_TREE: _train_tree,
    ModelKind.MLP: _train_mlp,
    ModelKind.VOTE: _train_vote,
}

# Active trainer table
_trainers: dict[ModelKind, Trainer] = dict(_DEFAULT_TRAINERS)


def resolve_algorithm(name: str | ModelKind) -> ModelKind:
    """Model kind for a CLI name (nb, tan, j48, mlp, vote) or kind value.

    Raises:
        ConfigError: unknown algorithm name
    """
    if isinstance(name, ModelKind):
        return name
    key = name.strip().lower()
    if key in ALGORITHM_ALIASES:
        return ALGORITHM_ALIASES[key]
    try:
        return ModelKind(key)
    except ValueError as e:
        known = ", ".join(ALGORITHM_ALIASES)
        msg = f"Unknown algorithm '{name}' (choose from {known})"
        raise ConfigError(msg) from e


def algorithm_name(kind: ModelKind) -> str:
    """Short CLI name of a kind, used as the report algorithm label."""
    for alias, value in ALGORITHM_ALIASES.items():
        if value is kind:
            return alias
    return kind.value


def get_trainer(kind: ModelKind) -> Trainer:
    """Trainer currently registered for a kind."""
    return _trainers[kind]


def set_trainer(kind: ModelKind, trainer: Trainer) -> None:
    """
    Replace the trainer for a kind.

    Useful for dependency injection in tests.
    """
    _trainers[kind] = trainer


def reset_trainers() -> None:
    """Restore the built-in trainers."""
    _trainers.clear()
    _trainers.update(_DEFAULT_TRAINERS)


def train_model(
    data: FeatureMatrix,
    config: TrainConfig,
    *,
    dataset_id: str = "adhoc",
    label_generation: int | None = None,
) -> TrainedModel:
    """Train the configured algorithm on encoded rows.

    Args:
        data: Encoded training rows (schema built on the same rows)
        config: Algorithm, window, seed and hyperparameters
        dataset_id: Recorded in provenance
        label_generation: Exclusion-rule generation of the labels

    Returns:
        The trained model
    """
    logger.debug(
        "Training %s on %d rows (upto_step=%d, seed=%d)",
        config.algo.value,
        len(data),
        config.upto_step,
        config.seed,
    )
    return get_trainer(config.algo)(data, config, dataset_id, label_generation)
