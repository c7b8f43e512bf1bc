"""
Multilayer perceptron: sigmoid hidden layers, softmax output, mean
cross-entropy, full-batch gradient descent with momentum.

Inputs are standardized with training statistics stored in the model.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np
from scipy.special import expit, log_softmax, softmax

from driveby_sentinel.errors import TrainingDivergedError
from driveby_sentinel.models.config import MlpParams, ModelKind

from .base import (
    N_CLASSES,
    ClassifierParams,
    TrainedModel,
    default_config,
    frozen_array,
    labeled_rows,
    make_model,
)

if TYPE_CHECKING:
    from driveby_sentinel.features.extraction import FeatureMatrix, FeatureSchema
    from driveby_sentinel.models.config import TrainConfig

logger = logging.getLogger(__name__)

Layer = tuple[np.ndarray, np.ndarray]


def default_hidden_layout(n_features: int) -> tuple[int, ...]:
    """One hidden layer of ceil((features + classes) / 2) units."""
    return (max(1, math.ceil((n_features + N_CLASSES) / 2)),)


def glorot_uniform(sizes: tuple[int, ...], rng: np.random.Generator) -> list[Layer]:
    """Weights U(-l, l) with l = sqrt(6 / (fan_in + fan_out)); zero biases."""
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:], strict=True):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        layers.append((rng.uniform(-limit, limit, size=(fan_in, fan_out)), np.zeros(fan_out)))
    return layers


def forward(layers: list[Layer], X: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """Hidden activations (input first) and output logits."""
    activations = [X]
    for W, b in layers[:-1]:
        activations.append(expit(activations[-1] @ W + b))
    W, b = layers[-1]
    return activations, activations[-1] @ W + b


def mlp_loss_and_gradients(
    layers: list[Layer], X: np.ndarray, Y: np.ndarray
) -> tuple[float, list[Layer]]:
    """Mean cross-entropy of one-hot targets Y and its gradient per layer."""
    n = X.shape[0]
    activations, logits = forward(layers, X)
    loss = float(-(Y * log_softmax(logits, axis=1)).sum() / n)
    delta = (softmax(logits, axis=1) - Y) / n
    grads: list[Layer] = []
    for k in range(len(layers) - 1, -1, -1):
        a = activations[k]
        grads.append((a.T @ delta, delta.sum(axis=0)))
        if k > 0:
            delta = (delta @ layers[k][0].T) * a * (1.0 - a)
    grads.reverse()
    return loss, grads


class MlpNetwork(ClassifierParams):
    """Standardization statistics plus layer weights."""

    kind: ClassVar[ModelKind] = ModelKind.MLP

    def __init__(self, mean: np.ndarray, scale: np.ndarray, layers: list[Layer]) -> None:
        self.mean = frozen_array(mean)
        self.scale = frozen_array(scale)
        self.layers = tuple((frozen_array(W), frozen_array(b)) for W, b in layers)

    def standardize(self, X: np.ndarray) -> np.ndarray:
        """(X - mean) / scale."""
        return (X - self.mean) / self.scale

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        _, logits = forward(list(self.layers), self.standardize(X))
        return softmax(logits, axis=1)

    def to_payload(self) -> dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "layers": [{"W": W.tolist(), "b": b.tolist()} for W, b in self.layers],
        }

    @classmethod
    def from_payload(
        cls,
        payload: dict[str, Any],
        schema: FeatureSchema,  # noqa: ARG003
    ) -> MlpNetwork:
        layers = []
        for layer in payload["layers"]:
            b = np.array(layer["b"], dtype=float)
            W = np.array(layer["W"], dtype=float).reshape(-1, b.size)
            layers.append((W, b))
        return cls(
            np.array(payload["mean"], dtype=float),
            np.array(payload["scale"], dtype=float),
            layers,
        )


def fit_mlp(
    X: np.ndarray, y: np.ndarray, params: MlpParams, seed: int
) -> tuple[MlpNetwork, list[float]]:
    """Train the network; returns it with the per-epoch loss history.

    Raises:
        TrainingDivergedError: the loss became non-finite
    """
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    Z = (X - mean) / scale
    Y = np.eye(N_CLASSES)[y]

    hidden = params.hidden_layout or default_hidden_layout(X.shape[1])
    sizes = (X.shape[1], *hidden, N_CLASSES)
    layers = glorot_uniform(sizes, np.random.default_rng(seed))
    velocity = [(np.zeros_like(W), np.zeros_like(b)) for W, b in layers]

    history: list[float] = []
    with np.errstate(over="ignore"):
        for epoch in range(1, params.epochs + 1):
            loss, grads = mlp_loss_and_gradients(layers, Z, Y)
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch, loss)
            history.append(loss)
            for k, (dW, db) in enumerate(grads):
                vW = params.momentum * velocity[k][0] - params.learning_rate * dW
                vb = params.momentum * velocity[k][1] - params.learning_rate * db
                velocity[k] = (vW, vb)
                layers[k] = (layers[k][0] + vW, layers[k][1] + vb)
        final, _ = mlp_loss_and_gradients(layers, Z, Y)
    if not math.isfinite(final):
        raise TrainingDivergedError(params.epochs, final)
    history.append(final)
    return MlpNetwork(mean, scale, layers), history


def train_mlp(
    data: FeatureMatrix,
    params: MlpParams | None = None,
    *,
    seed: int | None = None,
    config: TrainConfig | None = None,
    dataset_id: str = "adhoc",
    label_generation: int | None = None,
) -> TrainedModel:
    """Train a multilayer perceptron on labeled snapshot rows.

    Raises:
        SingleClassError: only one class present
        TrainingDivergedError: the loss became non-finite
    """
    if config is None:
        config = default_config(
            ModelKind.MLP, data, mlp=params or MlpParams(), seed=seed or 0
        )
    mlp_params = params or config.mlp
    X, y = labeled_rows(data)
    network, history = fit_mlp(X, y, mlp_params, config.seed if seed is None else seed)
    logger.debug(
        "MLP %s: loss %.6f -> %.6f over %d epochs",
        [W.shape[1] for W, _ in network.layers],
        history[0],
        history[-1],
        mlp_params.epochs,
    )
    return make_model(
        network,
        data,
        config,
        dataset_id=dataset_id,
        label_generation=label_generation,
        summary={
            "layer_sizes": [network.layers[0][0].shape[0]]
            + [W.shape[1] for W, _ in network.layers],
            "loss_initial": history[0],
            "loss_final": history[-1],
            "epochs": mlp_params.epochs,
        },
    )
