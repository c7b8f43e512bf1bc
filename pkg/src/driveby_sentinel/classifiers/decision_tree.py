"""
C4.5-style decision tree.

Numeric features split on a binary threshold chosen among the midpoints of
consecutive distinct values; categorical codes split multiway. The split
maximising gain ratio wins (ties: lower feature index, then lower
threshold). Pruning replaces a subtree by a leaf when the leaf's
pessimistic error estimate is no worse than the subtree's.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import norm

from driveby_sentinel.errors import ConfigError
from driveby_sentinel.models.config import ModelKind, TreeParams

from .base import (
    N_CLASSES,
    ClassifierParams,
    TrainedModel,
    default_config,
    labeled_rows,
    make_model,
)
from .naive_bayes import code_column, effective_codes

if TYPE_CHECKING:
    from driveby_sentinel.features.extraction import FeatureMatrix, FeatureSchema
    from driveby_sentinel.models.config import TrainConfig

logger = logging.getLogger(__name__)

LEAF = -1
MIN_GAIN = 1e-12
PRUNE_TOLERANCE = 0.1


class TreeNode(BaseModel):
    """One node of the flattened tree."""

    model_config = ConfigDict(frozen=True)

    feature: int = Field(default=LEAF, description="Split feature, -1 for a leaf")
    threshold: float | None = Field(
        default=None, description="Numeric split: x <= threshold goes to children[0]"
    )
    codes: tuple[int, ...] = Field(
        default=(), description="Categorical split: code of each child"
    )
    children: tuple[int, ...] = ()
    counts: tuple[float, float] = Field(description="Training counts [benign, malicious]")

    @property
    def is_leaf(self) -> bool:
        """True when the node does not split."""
        return self.feature == LEAF


def entropy(counts: np.ndarray) -> np.ndarray:
    """Entropy in bits along the last axis of a count array."""
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, counts / totals, 0.0)
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


class SplitCandidate(BaseModel):
    """Best split found for one feature."""

    model_config = ConfigDict(frozen=True)

    feature: int
    gain_ratio: float
    gain: float
    threshold: float | None = None
    codes: tuple[int, ...] = ()


def best_numeric_split(
    x: np.ndarray, y: np.ndarray, feature: int, min_leaf: int
) -> SplitCandidate | None:
    """Gain-ratio-maximising threshold over all distinct-value midpoints."""
    n = y.size
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    boundaries = np.flatnonzero(xs[:-1] != xs[1:])
    if boundaries.size == 0:
        return None
    malicious = np.cumsum(ys == 1)
    n_left = boundaries + 1
    m_left = malicious[boundaries]
    left = np.stack([n_left - m_left, m_left], axis=1).astype(float)
    total = np.array([n - malicious[-1], malicious[-1]], dtype=float)
    right = total - left
    n_right = n - n_left
    weighted = (n_left * entropy(left) + n_right * entropy(right)) / n
    gain = entropy(total) - weighted
    split_info = entropy(np.stack([n_left, n_right], axis=1).astype(float))
    valid = (n_left >= min_leaf) & (n_right >= min_leaf) & (gain > MIN_GAIN) & (split_info > 0)
    if not valid.any():
        return None
    ratio = np.where(valid, gain / np.where(split_info > 0, split_info, 1.0), -np.inf)
    best = int(np.argmax(ratio))
    i = boundaries[best]
    return SplitCandidate(
        feature=feature,
        gain_ratio=float(ratio[best]),
        gain=float(gain[best]),
        threshold=float((xs[i] + xs[i + 1]) / 2.0),
    )


def best_categorical_split(
    codes: np.ndarray, y: np.ndarray, feature: int, n_codes: int, min_leaf: int
) -> SplitCandidate | None:
    """Multiway split on every code present at the node."""
    n = y.size
    table = np.zeros((n_codes, N_CLASSES))
    np.add.at(table, (codes, y), 1.0)
    present = np.flatnonzero(table.sum(axis=1) > 0)
    sizes = table[present].sum(axis=1)
    if present.size < 2 or (sizes >= min_leaf).sum() < 2:  # noqa: PLR2004
        return None
    total = table.sum(axis=0)
    gain = float(entropy(total) - (sizes * entropy(table[present])).sum() / n)
    split_info = float(entropy(sizes))
    if gain <= MIN_GAIN or split_info <= 0:
        return None
    return SplitCandidate(
        feature=feature,
        gain_ratio=gain / split_info,
        gain=gain,
        codes=tuple(int(c) for c in present),
    )


def added_errors(n: float, e: float, confidence: float) -> float:
    """Extra errors of the upper confidence bound on a leaf's error rate."""
    if confidence > 0.5:  # noqa: PLR2004
        msg = f"Pruning confidence must be <= 0.5, got {confidence}"
        raise ConfigError(msg)
    if e < 1:
        base = n * (1.0 - confidence ** (1.0 / n))
        if e == 0:
            return base
        return base + e * (added_errors(n, 1.0, confidence) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = float(norm.ppf(1.0 - confidence))
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (
        1 + z * z / n
    )
    return r * n - e


def leaf_error_estimate(counts: np.ndarray, confidence: float) -> float:
    """Pessimistic error count of a node turned into a leaf."""
    n = float(counts.sum())
    e = n - float(counts.max())
    return e + added_errors(n, e, confidence)


class _Grower:
    def __init__(
        self,
        X: np.ndarray,
        y: np.ndarray,
        categorical: np.ndarray,
        n_codes: np.ndarray,
        params: TreeParams,
    ) -> None:
        self.X = X
        self.y = y
        self.categorical = categorical
        self.n_codes = n_codes
        self.params = params
        self.nodes: list[dict[str, Any]] = []

    def best_split(self, rows: np.ndarray) -> SplitCandidate | None:
        y = self.y[rows]
        best: SplitCandidate | None = None
        for j in range(self.X.shape[1]):
            column = self.X[rows, j]
            if self.categorical[j]:
                candidate = best_categorical_split(
                    code_column(column, int(self.n_codes[j])),
                    y,
                    j,
                    int(self.n_codes[j]),
                    self.params.min_leaf,
                )
            else:
                candidate = best_numeric_split(column, y, j, self.params.min_leaf)
            if candidate is not None and (best is None or candidate.gain_ratio > best.gain_ratio):
                best = candidate
        return best

    def grow(self, rows: np.ndarray) -> int:
        index = len(self.nodes)
        counts = np.bincount(self.y[rows], minlength=N_CLASSES).astype(float)
        node: dict[str, Any] = {"counts": (float(counts[0]), float(counts[1]))}
        self.nodes.append(node)
        if (counts > 0).sum() < 2 or rows.size < 2 * self.params.min_leaf:  # noqa: PLR2004
            return index
        split = self.best_split(rows)
        if split is None:
            return index
        column = self.X[rows, split.feature]
        if split.threshold is not None:
            branches = [rows[column <= split.threshold], rows[column > split.threshold]]
        else:
            codes = code_column(column, int(self.n_codes[split.feature]))
            branches = [rows[codes == c] for c in split.codes]
        node["feature"] = split.feature
        node["threshold"] = split.threshold
        node["codes"] = split.codes
        node["children"] = tuple(self.grow(branch) for branch in branches)
        return index

    def prune(self, index: int) -> float:
        """Prune bottom-up; returns the subtree's estimated errors."""
        node = self.nodes[index]
        counts = np.array(node["counts"])
        as_leaf = leaf_error_estimate(counts, self.params.confidence)
        children = node.get("children", ())
        if not children:
            return as_leaf
        subtree = sum(self.prune(child) for child in children)
        if as_leaf <= subtree + PRUNE_TOLERANCE:
            for key in ("feature", "threshold", "codes", "children"):
                node.pop(key, None)
            return as_leaf
        return subtree

    def flatten(self) -> list[TreeNode]:
        """Reachable nodes renumbered in depth-first order."""
        out: list[TreeNode] = []

        def visit(index: int) -> int:
            node = self.nodes[index]
            position = len(out)
            out.append(TreeNode(counts=node["counts"]))
            if node.get("children"):
                children = tuple(visit(child) for child in node["children"])
                out[position] = TreeNode(
                    feature=node["feature"],
                    threshold=node["threshold"],
                    codes=node["codes"],
                    children=children,
                    counts=node["counts"],
                )
            return position

        visit(0)
        return out


class DecisionTreeParams(ClassifierParams):
    """Flattened tree; node 0 is the root."""

    kind: ClassVar[ModelKind] = ModelKind.DECISION_TREE

    def __init__(self, nodes: list[TreeNode], n_codes: np.ndarray, *, laplace: bool) -> None:
        self.nodes = tuple(nodes)
        self.n_codes = np.array(n_codes, dtype=int)
        self.n_codes.setflags(write=False)
        self.laplace = laplace

    @property
    def root(self) -> TreeNode:
        """Root node."""
        return self.nodes[0]

    @property
    def depth(self) -> int:
        """Edges on the longest root-to-leaf path."""

        def depth_of(index: int) -> int:
            node = self.nodes[index]
            return 0 if node.is_leaf else 1 + max(depth_of(c) for c in node.children)

        return depth_of(0)

    @property
    def n_leaves(self) -> int:
        """Leaf count."""
        return sum(1 for node in self.nodes if node.is_leaf)

    def node_distribution(self, node: TreeNode) -> np.ndarray:
        """[benign, malicious] estimate stored at a node."""
        counts = np.array(node.counts, dtype=float)
        if self.laplace:
            return (counts + 1.0) / (counts.sum() + N_CLASSES)
        total = counts.sum()
        return counts / total if total > 0 else np.full(N_CLASSES, 1.0 / N_CLASSES)

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        P = np.empty((X.shape[0], N_CLASSES))
        stack: list[tuple[int, np.ndarray]] = [(0, np.arange(X.shape[0]))]
        while stack:
            index, rows = stack.pop()
            if rows.size == 0:
                continue
            node = self.nodes[index]
            if node.is_leaf:
                P[rows] = self.node_distribution(node)
                continue
            column = X[rows, node.feature]
            if node.threshold is not None:
                stack.append((node.children[0], rows[column <= node.threshold]))
                stack.append((node.children[1], rows[column > node.threshold]))
                continue
            codes = code_column(column, int(self.n_codes[node.feature]))
            routed = np.zeros(rows.size, dtype=bool)
            for code, child in zip(node.codes, node.children, strict=True):
                hit = codes == code
                routed |= hit
                stack.append((child, rows[hit]))
            # codes never seen at this node keep the node's own distribution
            P[rows[~routed]] = self.node_distribution(node)
        return P

    def to_payload(self) -> dict[str, Any]:
        return {
            "nodes": [node.model_dump() for node in self.nodes],
            "n_codes": self.n_codes.tolist(),
            "laplace": self.laplace,
        }

    @classmethod
    def from_payload(
        cls,
        payload: dict[str, Any],
        schema: FeatureSchema,  # noqa: ARG003
    ) -> DecisionTreeParams:
        return cls(
            [TreeNode.model_validate(node) for node in payload["nodes"]],
            np.array(payload["n_codes"], dtype=int),
            laplace=bool(payload["laplace"]),
        )


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    *,
    categorical: np.ndarray | None = None,
    n_codes: np.ndarray | None = None,
    params: TreeParams | None = None,
) -> DecisionTreeParams:
    """Grow (and optionally prune) a tree on any labeled rows, single-class included."""
    params = params or TreeParams()
    d = X.shape[1]
    categorical = (
        np.zeros(d, dtype=bool) if categorical is None else np.asarray(categorical, bool)
    )
    n_codes = np.zeros(d, dtype=int) if n_codes is None else np.asarray(n_codes, int)
    grower = _Grower(X, np.asarray(y, dtype=int), categorical, n_codes, params)
    grower.grow(np.arange(X.shape[0]))
    if params.prune:
        grower.prune(0)
    return DecisionTreeParams(grower.flatten(), n_codes, laplace=params.laplace)


def train_decision_tree(
    data: FeatureMatrix,
    params: TreeParams | None = None,
    *,
    config: TrainConfig | None = None,
    dataset_id: str = "adhoc",
    label_generation: int | None = None,
) -> TrainedModel:
    """Train a C4.5-style tree on labeled snapshot rows.

    Raises:
        SingleClassError: only one class present
    """
    if config is None:
        config = default_config(ModelKind.DECISION_TREE, data, tree=params or TreeParams())
    tree_params = params or config.tree
    X, y = labeled_rows(data)
    mask = data.schema.categorical_mask.astype(bool)
    n_codes = np.array(
        [effective_codes(data.schema, X, j) if mask[j] else 0 for j in range(X.shape[1])],
        dtype=int,
    )
    fitted = grow_tree(X, y, categorical=mask, n_codes=n_codes, params=tree_params)
    logger.debug(
        "Decision tree: %d nodes, %d leaves, depth %d",
        len(fitted.nodes),
        fitted.n_leaves,
        fitted.depth,
    )
    return make_model(
        fitted,
        data,
        config,
        dataset_id=dataset_id,
        label_generation=label_generation,
        summary={
            "nodes": len(fitted.nodes),
            "leaves": fitted.n_leaves,
            "depth": fitted.depth,
            "root_feature": (
                data.schema.features[fitted.root.feature].name
                if not fitted.root.is_leaf
                else None
            ),
        },
    )
