"""
Configuration models.

Hyperparameters, training configuration, adaptive-cycle settings and the
run echo written by every CLI invocation. All of them are pydantic models
so they validate on construction and serialize into model provenance,
reports and ``run_config.json``.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path  # noqa: TC003
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .types import ObservationConfig

DEFAULT_IDENTIFIER_BINS = 8


class ModelKind(str, Enum):
    """Classifier families a TrainedModel can hold."""

    NAIVE_BAYES = "naive_bayes"
    BAYES_NET_TAN = "bayes_net_tan"
    DECISION_TREE = "decision_tree"
    MLP = "mlp"
    VOTE = "vote"


class BayesParams(BaseModel):
    """Naive Bayes and tree-augmented network settings."""

    model_config = ConfigDict(frozen=True)

    smoothing: float = Field(
        default=1.0, ge=0.0, description="Additive smoothing on class and CPT counts"
    )
    n_bins: int = Field(
        default=10, ge=2, description="Equal-frequency bins for numeric features (TAN)"
    )
    variance_floor: float = Field(
        default=1e-6, gt=0.0, description="Lower bound on Gaussian variances (NB)"
    )


class TreeParams(BaseModel):
    """C4.5-style decision tree settings."""

    model_config = ConfigDict(frozen=True)

    min_leaf: int = Field(default=2, ge=1, description="Minimum instances per branch")
    confidence: float = Field(
        default=0.25, gt=0.0, le=0.5, description="Pruning confidence factor"
    )
    prune: bool = Field(default=True, description="Apply pessimistic-error pruning")
    laplace: bool = Field(default=False, description="Laplace-smoothed leaf estimates")


class MlpParams(BaseModel):
    """Multilayer perceptron settings."""

    model_config = ConfigDict(frozen=True)

    hidden_layout: tuple[int, ...] | None = Field(
        default=None,
        description="Hidden layer sizes; None means one layer of ceil((d + 2) / 2)",
    )
    learning_rate: float = Field(default=0.3, gt=0.0)
    momentum: float = Field(default=0.2, ge=0.0, lt=1.0)
    epochs: int = Field(default=500, ge=1)

    @field_validator("hidden_layout")
    @classmethod
    def positive_layers(cls, v: tuple[int, ...] | None) -> tuple[int, ...] | None:
        """Every hidden layer needs at least one unit."""
        if v is not None and any(size < 1 for size in v):
            msg = f"Hidden layer sizes must be positive, got {v}"
            raise ValueError(msg)
        return v


class TrainConfig(BaseModel):
    """Everything needed to retrain a model the same way on new data."""

    model_config = ConfigDict(frozen=True)

    algo: ModelKind = Field(description="Classifier family")
    upto_step: int = Field(ge=1, description="Cumulative window end step")
    include_tweet_meta: bool = Field(
        default=True, description="False drops the 24 tweet fields (ablation)"
    )
    seed: int = Field(default=0, description="Seed for stochastic learners")
    identifier_bins: int = Field(default=DEFAULT_IDENTIFIER_BINS, ge=1)
    bayes: BayesParams = Field(default_factory=BayesParams)
    tree: TreeParams = Field(default_factory=TreeParams)
    mlp: MlpParams = Field(default_factory=MlpParams)
    vote_members: tuple[ModelKind, ...] = Field(
        default=(ModelKind.NAIVE_BAYES, ModelKind.DECISION_TREE),
        description="Member families trained for a vote model",
    )

    @model_validator(mode="after")
    def check_vote_members(self) -> TrainConfig:
        """Vote needs two or more non-vote members."""
        if self.algo is ModelKind.VOTE:
            if len(self.vote_members) < 2:  # noqa: PLR2004
                msg = "A vote model needs at least two members"
                raise ValueError(msg)
            if ModelKind.VOTE in self.vote_members:
                msg = "Vote members cannot themselves be vote models"
                raise ValueError(msg)
        return self

    def with_step(self, upto_step: int) -> TrainConfig:
        """Same configuration for a different window end."""
        return self.model_copy(update={"upto_step": upto_step})

    def with_tweet_meta(self, *, include: bool) -> TrainConfig:
        """Same configuration with the ablation flag set."""
        return self.model_copy(update={"include_tweet_meta": include})


class CycleConfig(BaseModel):
    """One feed-forward retraining cycle."""

    model_config = ConfigDict(frozen=True)

    n_new_traces: int = Field(default=400, ge=0, description="Traces ingested per cycle")
    malicious_fraction: float = Field(default=0.13, ge=0.0, le=1.0)
    eval_n_traces: int = Field(
        default=400, ge=2, description="Size of the fresh evaluation batch"
    )
    seed: int = Field(default=0, description="Cycle seed (rules, traces, eval batch)")
    event_tag: str = Field(default="euro2016-like")
    tweet_separation: float = Field(default=0.6, ge=0.0, le=1.0)
    eval_profiles: tuple[str, ...] | None = Field(
        default=None, description="Malicious kits of the evaluation batch (None = all active)"
    )


class RunConfig(BaseModel):
    """Echo of one CLI run, written as run_config.json."""

    model_config = ConfigDict(frozen=True)

    subcommand: str = Field(description="Full subcommand path, e.g. 'eval sweep'")
    seed: int | None = Field(default=None)
    dataset_paths: tuple[str, ...] = Field(default=())
    algorithms: tuple[str, ...] = Field(default=())
    observation: ObservationConfig = Field(default_factory=ObservationConfig)
    include_tweet_meta: bool = Field(default=True)
    threshold: float | None = Field(default=None)
    out_dir: Path | None = Field(default=None)
    arguments: dict[str, Any] = Field(
        default_factory=dict, description="Every parsed flag, verbatim"
    )


class RunManifest(BaseModel):
    """Every artifact a CLI run wrote, relative to its output directory."""

    model_config = ConfigDict(frozen=True)

    subcommand: str
    artifacts: tuple[str, ...] = Field(default=())
