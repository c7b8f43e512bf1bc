"""
Naive Bayes with Gaussian numeric and multinomial categorical likelihoods.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np

from driveby_sentinel.models.config import BayesParams, ModelKind

from .base import (
    N_CLASSES,
    ClassifierParams,
    TrainedModel,
    default_config,
    frozen_array,
    labeled_rows,
    make_model,
    softmax_log,
)

if TYPE_CHECKING:
    from driveby_sentinel.features.extraction import FeatureMatrix, FeatureSchema
    from driveby_sentinel.models.config import TrainConfig

logger = logging.getLogger(__name__)


def class_priors(y: np.ndarray, smoothing: float) -> np.ndarray:
    """(n_c + a) / (n + 2a) for benign and malicious."""
    counts = np.bincount(y, minlength=N_CLASSES).astype(float)
    return (counts + smoothing) / (counts.sum() + N_CLASSES * smoothing)


def code_column(column: np.ndarray, n_codes: int) -> np.ndarray:
    """Integer codes; anything outside [0, n_codes) maps to the reserved 0."""
    codes = np.rint(column).astype(int)
    return np.where((codes >= 0) & (codes < n_codes), codes, 0)


def effective_codes(schema: FeatureSchema, X: np.ndarray, j: int) -> int:
    """Code count of categorical position j (schema value, else observed max + 1)."""
    declared = schema.features[j].n_codes
    if declared > 0:
        return declared
    return int(np.rint(X[:, j]).max()) + 1 if len(X) else 1


class NaiveBayesParams(ClassifierParams):
    """Priors, per-class Gaussians and per-class code tables."""

    kind: ClassVar[ModelKind] = ModelKind.NAIVE_BAYES

    def __init__(
        self,
        priors: np.ndarray,
        numeric_idx: np.ndarray,
        means: np.ndarray,
        variances: np.ndarray,
        categorical_idx: np.ndarray,
        code_probs: list[np.ndarray],
    ) -> None:
        self.priors = frozen_array(priors)
        self.numeric_idx = frozen_array(numeric_idx, int)
        self.means = frozen_array(means)
        self.variances = frozen_array(variances)
        self.categorical_idx = frozen_array(categorical_idx, int)
        self.code_probs = tuple(frozen_array(p) for p in code_probs)

    def log_joint(self, X: np.ndarray) -> np.ndarray:
        """log P(c) + sum_j log P(x_j | c), shape (n, 2)."""
        n = X.shape[0]
        log_p = np.tile(np.log(self.priors), (n, 1))
        if self.numeric_idx.size:
            values = X[:, self.numeric_idx]
            for c in range(N_CLASSES):
                var = self.variances[c]
                log_p[:, c] += (
                    -0.5 * np.log(2 * math.pi * var) - (values - self.means[c]) ** 2 / (2 * var)
                ).sum(axis=1)
        with np.errstate(divide="ignore"):
            for j, probs in zip(self.categorical_idx, self.code_probs, strict=True):
                codes = code_column(X[:, j], probs.shape[1])
                log_p += np.log(probs[:, codes]).T
        return log_p

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        return softmax_log(self.log_joint(X), self.priors)

    def to_payload(self) -> dict[str, Any]:
        return {
            "priors": self.priors.tolist(),
            "numeric_idx": self.numeric_idx.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "categorical_idx": self.categorical_idx.tolist(),
            "code_probs": [p.tolist() for p in self.code_probs],
        }

    @classmethod
    def from_payload(
        cls,
        payload: dict[str, Any],
        schema: FeatureSchema,  # noqa: ARG003
    ) -> NaiveBayesParams:
        n_numeric = len(payload["numeric_idx"])
        return cls(
            priors=np.array(payload["priors"], dtype=float),
            numeric_idx=np.array(payload["numeric_idx"], dtype=int),
            means=np.array(payload["means"], dtype=float).reshape(N_CLASSES, n_numeric),
            variances=np.array(payload["variances"], dtype=float).reshape(N_CLASSES, n_numeric),
            categorical_idx=np.array(payload["categorical_idx"], dtype=int),
            code_probs=[np.array(p, dtype=float) for p in payload["code_probs"]],
        )


def fit_naive_bayes(
    X: np.ndarray,
    y: np.ndarray,
    schema: FeatureSchema,
    params: BayesParams,
) -> NaiveBayesParams:
    """Estimate priors, Gaussian moments and smoothed code frequencies."""
    mask = schema.categorical_mask.astype(bool)
    numeric_idx = np.flatnonzero(~mask)
    categorical_idx = np.flatnonzero(mask)
    alpha = params.smoothing

    means = np.zeros((N_CLASSES, numeric_idx.size))
    variances = np.ones((N_CLASSES, numeric_idx.size))
    code_probs = []
    for j in categorical_idx:
        n_codes = effective_codes(schema, X, j)
        codes = code_column(X[:, j], n_codes)
        table = np.zeros((N_CLASSES, n_codes))
        for c in range(N_CLASSES):
            counts = np.bincount(codes[y == c], minlength=n_codes).astype(float)
            denominator = counts.sum() + alpha * n_codes
            table[c] = (counts + alpha) / denominator if denominator > 0 else 1.0 / n_codes
        code_probs.append(table)
    for c in range(N_CLASSES):
        rows = X[y == c][:, numeric_idx]
        means[c] = rows.mean(axis=0)
        variances[c] = np.maximum(rows.var(axis=0), params.variance_floor)

    return NaiveBayesParams(
        priors=class_priors(y, alpha),
        numeric_idx=numeric_idx,
        means=means,
        variances=variances,
        categorical_idx=categorical_idx,
        code_probs=code_probs,
    )


def train_naive_bayes(
    data: FeatureMatrix,
    params: BayesParams | None = None,
    *,
    config: TrainConfig | None = None,
    dataset_id: str = "adhoc",
    label_generation: int | None = None,
) -> TrainedModel:
    """Train naive Bayes on labeled snapshot rows.

    Raises:
        SingleClassError: only one class present
    """
    if config is None:
        config = default_config(ModelKind.NAIVE_BAYES, data, bayes=params or BayesParams())
    bayes = params or config.bayes
    X, y = labeled_rows(data)
    fitted = fit_naive_bayes(X, y, data.schema, bayes)
    logger.debug(
        "Naive Bayes: %d numeric, %d categorical features, priors %s",
        fitted.numeric_idx.size,
        fitted.categorical_idx.size,
        fitted.priors.round(4).tolist(),
    )
    return make_model(
        fitted,
        data,
        config,
        dataset_id=dataset_id,
        label_generation=label_generation,
        summary={"priors": fitted.priors.tolist()},
    )
