"""
Tree-augmented naive Bayes.

Numeric features are discretized into equal-frequency bins learned on the
training rows. The feature tree is the maximum spanning tree over
class-conditional mutual information, rooted at the first feature; every
feature then depends on the class and at most one feature parent.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, minimum_spanning_tree

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
from .naive_bayes import class_priors, code_column, effective_codes

if TYPE_CHECKING:
    from driveby_sentinel.features.extraction import FeatureMatrix, FeatureSchema
    from driveby_sentinel.models.config import TrainConfig

logger = logging.getLogger(__name__)

NO_PARENT = -1


def equal_frequency_cuts(column: np.ndarray, n_bins: int) -> np.ndarray:
    """Distinct cut points splitting the column into n_bins equal-frequency bins."""
    quantiles = np.arange(1, n_bins) / n_bins
    cuts = np.quantile(column, quantiles, method="inverted_cdf")
    return np.unique(cuts)


def apply_cuts(column: np.ndarray, cuts: np.ndarray) -> np.ndarray:
    """Bin index of each value: number of cuts <= value."""
    return np.searchsorted(cuts, column, side="right")


def conditional_mutual_information(
    a: np.ndarray, b: np.ndarray, y: np.ndarray, card_a: int, card_b: int
) -> float:
    """Empirical I(A; B | C) in nats for discrete columns a, b and class y."""
    n = y.size
    joint = np.bincount(
        (y * card_a + a) * card_b + b, minlength=N_CLASSES * card_a * card_b
    ).reshape(N_CLASSES, card_a, card_b).astype(float)
    p_abc = joint / n
    n_c = joint.sum(axis=(1, 2))
    n_ac = joint.sum(axis=2)
    n_bc = joint.sum(axis=1)
    total = 0.0
    for c in range(N_CLASSES):
        if n_c[c] == 0:
            continue
        nz = joint[c] > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = joint[c] * n_c[c] / np.outer(n_ac[c], n_bc[c])
        total += float((p_abc[c][nz] * np.log(ratio[nz])).sum())
    return max(total, 0.0)


def maximum_spanning_tree(weights: np.ndarray) -> list[tuple[int, int]]:
    """Edges (i < j) of a maximum-weight spanning tree of a symmetric weight matrix."""
    d = weights.shape[0]
    if d < 2:  # noqa: PLR2004
        return []
    upper = np.triu(np.ones((d, d), dtype=bool), k=1)
    # scipy drops zero entries, so shift every edge to a strictly positive cost
    costs = np.where(upper, weights.max() + 1.0 - weights, 0.0)
    tree = minimum_spanning_tree(csr_matrix(costs)).tocoo()
    return sorted((min(i, j), max(i, j)) for i, j in zip(tree.row, tree.col, strict=True))


def orient_tree(edges: list[tuple[int, int]], d: int, root: int = 0) -> np.ndarray:
    """Parent of every node when the undirected tree is rooted at root."""
    parents = np.full(d, NO_PARENT, dtype=int)
    if not edges:
        return parents
    rows = [i for i, _ in edges] + [j for _, j in edges]
    cols = [j for _, j in edges] + [i for i, _ in edges]
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(d, d))
    _, predecessors = breadth_first_order(graph, root, directed=False, return_predecessors=True)
    for node in range(d):
        if node != root and predecessors[node] >= 0:
            parents[node] = predecessors[node]
    return parents


class TanParams(ClassifierParams):
    """Discretization, tree structure and conditional probability tables."""

    kind: ClassVar[ModelKind] = ModelKind.BAYES_NET_TAN

    def __init__(
        self,
        priors: np.ndarray,
        cuts: list[np.ndarray | None],
        cards: np.ndarray,
        parents: np.ndarray,
        cpts: list[np.ndarray],
        cmi: np.ndarray,
    ) -> None:
        self.priors = frozen_array(priors)
        self.cuts = tuple(None if c is None else frozen_array(c) for c in cuts)
        self.cards = frozen_array(cards, int)
        self.parents = frozen_array(parents, int)
        self.cpts = tuple(frozen_array(t) for t in cpts)
        self.cmi = frozen_array(cmi)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Undirected tree edges (i < j)."""
        return sorted(
            (min(j, int(p)), max(j, int(p)))
            for j, p in enumerate(self.parents)
            if p != NO_PARENT
        )

    def tree_weight(self) -> float:
        """Sum of CMI over the tree edges."""
        return float(sum(self.cmi[i, j] for i, j in self.edges))

    def discretize(self, X: np.ndarray) -> np.ndarray:
        """Discrete value of every feature, shape (n, d)."""
        D = np.empty(X.shape, dtype=int)
        for j, cuts in enumerate(self.cuts):
            if cuts is None:
                D[:, j] = code_column(X[:, j], int(self.cards[j]))
            else:
                D[:, j] = apply_cuts(X[:, j], cuts)
        return D

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        D = self.discretize(X)
        log_p = np.tile(np.log(self.priors), (X.shape[0], 1))
        with np.errstate(divide="ignore"):
            for j, table in enumerate(self.cpts):
                parent = self.parents[j]
                parent_values = D[:, parent] if parent != NO_PARENT else np.zeros(len(D), int)
                # table[c, parent value, own value]
                log_p += np.log(table[:, parent_values, D[:, j]]).T
        return softmax_log(log_p, self.priors)

    def to_payload(self) -> dict[str, Any]:
        return {
            "priors": self.priors.tolist(),
            "cuts": [None if c is None else c.tolist() for c in self.cuts],
            "cards": self.cards.tolist(),
            "parents": self.parents.tolist(),
            "cpts": [t.tolist() for t in self.cpts],
            "cmi": self.cmi.tolist(),
        }

    @classmethod
    def from_payload(
        cls,
        payload: dict[str, Any],
        schema: FeatureSchema,  # noqa: ARG003
    ) -> TanParams:
        d = len(payload["cards"])
        return cls(
            priors=np.array(payload["priors"], dtype=float),
            cuts=[None if c is None else np.array(c, dtype=float) for c in payload["cuts"]],
            cards=np.array(payload["cards"], dtype=int),
            parents=np.array(payload["parents"], dtype=int),
            cpts=[np.array(t, dtype=float) for t in payload["cpts"]],
            cmi=np.array(payload["cmi"], dtype=float).reshape(d, d),
        )


def _cpt(
    own: np.ndarray,
    parent: np.ndarray | None,
    y: np.ndarray,
    card: int,
    parent_card: int,
    alpha: float,
) -> np.ndarray:
    parent_values = parent if parent is not None else np.zeros_like(own)
    counts = np.bincount(
        (y * parent_card + parent_values) * card + own,
        minlength=N_CLASSES * parent_card * card,
    ).reshape(N_CLASSES, parent_card, card).astype(float)
    denominator = counts.sum(axis=2, keepdims=True) + alpha * card
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denominator > 0, (counts + alpha) / denominator, 1.0 / card)


def fit_tan(
    X: np.ndarray,
    y: np.ndarray,
    schema: FeatureSchema,
    params: BayesParams,
) -> TanParams:
    """Discretize, learn the CMI spanning tree and estimate the CPTs."""
    d = X.shape[1]
    mask = schema.categorical_mask.astype(bool)
    cuts: list[np.ndarray | None] = []
    cards = np.zeros(d, dtype=int)
    D = np.empty(X.shape, dtype=int)
    for j in range(d):
        if mask[j]:
            cards[j] = effective_codes(schema, X, j)
            cuts.append(None)
            D[:, j] = code_column(X[:, j], int(cards[j]))
        else:
            column_cuts = equal_frequency_cuts(X[:, j], params.n_bins)
            cuts.append(column_cuts)
            cards[j] = column_cuts.size + 1
            D[:, j] = apply_cuts(X[:, j], column_cuts)

    cmi = np.zeros((d, d))
    for i in range(d):
        for j in range(i + 1, d):
            cmi[i, j] = cmi[j, i] = conditional_mutual_information(
                D[:, i], D[:, j], y, int(cards[i]), int(cards[j])
            )
    parents = orient_tree(maximum_spanning_tree(cmi), d)

    cpts = []
    for j in range(d):
        p = int(parents[j])
        if p == NO_PARENT:
            cpts.append(_cpt(D[:, j], None, y, int(cards[j]), 1, params.smoothing))
        else:
            cpts.append(
                _cpt(D[:, j], D[:, p], y, int(cards[j]), int(cards[p]), params.smoothing)
            )
    return TanParams(
        priors=class_priors(y, params.smoothing),
        cuts=cuts,
        cards=cards,
        parents=parents,
        cpts=cpts,
        cmi=cmi,
    )


def train_bayes_net_tan(
    data: FeatureMatrix,
    params: BayesParams | None = None,
    *,
    config: TrainConfig | None = None,
    dataset_id: str = "adhoc",
    label_generation: int | None = None,
) -> TrainedModel:
    """Train a tree-augmented naive Bayes network.

    Raises:
        SingleClassError: only one class present
    """
    if config is None:
        config = default_config(ModelKind.BAYES_NET_TAN, data, bayes=params or BayesParams())
    bayes = params or config.bayes
    X, y = labeled_rows(data)
    fitted = fit_tan(X, y, data.schema, bayes)
    logger.debug(
        "TAN: %d features, tree weight %.4f", len(fitted.cards), fitted.tree_weight()
    )
    return make_model(
        fitted,
        data,
        config,
        dataset_id=dataset_id,
        label_generation=label_generation,
        summary={
            "edges": [list(e) for e in fitted.edges],
            "tree_weight": fitted.tree_weight(),
        },
    )
