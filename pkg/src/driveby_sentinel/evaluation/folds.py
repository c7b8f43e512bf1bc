"""
Trace-level stratified fold assignment.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from driveby_sentinel.errors import ConfigError, InsufficientDataError

logger = logging.getLogger(__name__)

MIN_FOLDS = 2


def stratified_trace_folds(
    trace_ids: Sequence[str], labels: Sequence[int], k: int, seed: int
) -> list[list[str]]:
    """Partition traces into k folds, stratified by class.

    Each class is shuffled with the seed and dealt round-robin, the
    malicious class continuing where the benign class stopped, so every
    fold holds floor or ceil of n_c / k traces of each class. Folds list
    their traces in input order.

    Raises:
        ConfigError: k < 2 or mismatched inputs
        InsufficientDataError: a class has fewer than k traces
    """
    if k < MIN_FOLDS:
        msg = f"Cross-validation needs k >= {MIN_FOLDS}, got {k}"
        raise ConfigError(msg)
    if len(trace_ids) != len(labels):
        msg = f"{len(trace_ids)} trace ids but {len(labels)} labels"
        raise ConfigError(msg)
    if len(set(trace_ids)) != len(trace_ids):
        msg = "Trace ids must be unique for fold assignment"
        raise ConfigError(msg)

    y = np.asarray(labels, dtype=int)
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(y), dtype=int)
    offset = 0
    for label in (0, 1):
        members = np.flatnonzero(y == label)
        if members.size < k:
            name = "malicious" if label == 1 else "benign"
            msg = f"{k}-fold cross-validation needs {k} {name} traces, got {members.size}"
            raise InsufficientDataError(msg)
        shuffled = members[rng.permutation(members.size)]
        assignment[shuffled] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k

    folds = [[trace_ids[i] for i in np.flatnonzero(assignment == f)] for f in range(k)]
    logger.debug("Fold sizes %s (seed %d)", [len(f) for f in folds], seed)
    return folds
