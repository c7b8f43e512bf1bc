"""
Pearson correlation ranking of features against the class.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict

from driveby_sentinel.errors import InsufficientDataError, SingleClassError

from .extraction import UNLABELED

if TYPE_CHECKING:
    from .extraction import FeatureMatrix

logger = logging.getLogger(__name__)


class FeatureCorrelation(BaseModel):
    """Correlation of one feature with the class indicator."""

    model_config = ConfigDict(frozen=True)

    name: str
    r: float
    abs_r: float


def pearson_rank(data: FeatureMatrix) -> list[FeatureCorrelation]:
    """Features ordered by |r| with the class (benign=0, malicious=1).

    Constant features get r = 0. Ties keep schema order.

    Raises:
        InsufficientDataError: fewer than two labeled rows
        SingleClassError: only one class present
    """
    labeled = data.y != UNLABELED
    X = data.X[labeled]
    y = data.y[labeled].astype(float)
    if len(y) < 2:  # noqa: PLR2004
        msg = f"Pearson ranking needs at least 2 labeled samples, got {len(y)}"
        raise InsufficientDataError(msg)
    if np.unique(y).size < 2:  # noqa: PLR2004
        msg = "Pearson ranking needs both classes"
        raise SingleClassError(msg)

    xc = X - X.mean(axis=0)
    yc = y - y.mean()
    sxx = np.einsum("ij,ij->j", xc, xc)
    sxy = xc.T @ yc
    syy = float(yc @ yc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(np.ptp(X, axis=0) > 0, sxy / np.sqrt(sxx * syy), 0.0)
    r = np.clip(r, -1.0, 1.0)

    order = sorted(range(len(r)), key=lambda j: (-abs(float(r[j])), j))
    ranking = [
        FeatureCorrelation(
            name=data.schema.features[j].name, r=float(r[j]), abs_r=abs(float(r[j]))
        )
        for j in order
    ]
    if ranking:
        logger.debug("Top feature %s with |r|=%.4f", ranking[0].name, ranking[0].abs_r)
    return ranking
