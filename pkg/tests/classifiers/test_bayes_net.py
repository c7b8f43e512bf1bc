"""
Unit tests for classifiers/bayes_net.py.
"""

import itertools

import numpy as np
import pytest

from driveby_sentinel.classifiers.base import predict_proba_matrix
from driveby_sentinel.classifiers.bayes_net import (
    NO_PARENT,
    apply_cuts,
    conditional_mutual_information,
    equal_frequency_cuts,
    maximum_spanning_tree,
    orient_tree,
    train_bayes_net_tan,
)
from driveby_sentinel.classifiers.naive_bayes import train_naive_bayes
from driveby_sentinel.errors import SingleClassError
from driveby_sentinel.features.extraction import FeatureMatrix
from driveby_sentinel.models.config import BayesParams


def _is_spanning_tree(edges, d):
    parent = list(range(d))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            return False
        parent[ri] = rj
    return True


def brute_force_tree_weight(weights):
    """Largest total weight over every spanning tree of the complete graph."""
    d = weights.shape[0]
    all_edges = list(itertools.combinations(range(d), 2))
    return max(
        sum(weights[i, j] for i, j in edges)
        for edges in itertools.combinations(all_edges, d - 1)
        if _is_spanning_tree(edges, d)
    )


@pytest.fixture
def correlated():
    """Features 0 and 1 are copies; feature 2 is independent noise."""
    rng = np.random.default_rng(7)
    y = rng.integers(0, 2, 200)
    a = (y + rng.integers(0, 3, 200)) % 3
    noise = rng.integers(0, 3, 200)
    X = np.column_stack([a, a, noise]).astype(float)
    return FeatureMatrix.from_arrays(X, y, categorical={0: 3, 1: 3, 2: 3})


class TestStructure:
    """Test the Chow-Liu tree."""

    def test_copies_are_linked(self, correlated):
        """Test the tree links two perfectly correlated features."""
        model = train_bayes_net_tan(correlated)
        assert (0, 1) in model.params.edges
        cmi = model.params.cmi
        assert cmi[0, 1] > cmi[0, 2]
        assert cmi[0, 1] > cmi[1, 2]

    def test_cmi_is_symmetric(self, correlated):
        """Test I(A; B | C) = I(B; A | C)."""
        cmi = train_bayes_net_tan(correlated).params.cmi
        np.testing.assert_allclose(cmi, cmi.T)

    def test_cmi_of_copy_is_conditional_entropy(self):
        """Test I(A; A | C) equals H(A | C)."""
        a = np.array([0, 1, 0, 1, 1, 1])
        y = np.array([0, 0, 0, 1, 1, 1])
        # class 0 holds a = (0, 1, 0), class 1 holds a = (1, 1, 1)
        h = -(2 / 3 * np.log(2 / 3) + 1 / 3 * np.log(1 / 3)) * 0.5
        assert conditional_mutual_information(a, a, y, 2, 2) == pytest.approx(h)

    @pytest.mark.parametrize("seed", range(5))
    def test_spanning_tree_weight_is_maximal(self, seed):
        """Test the spanning tree matches exhaustive search on five nodes."""
        rng = np.random.default_rng(seed)
        upper = np.triu(rng.random((5, 5)), k=1)
        weights = upper + upper.T
        edges = maximum_spanning_tree(weights)
        assert len(edges) == 4
        assert _is_spanning_tree(edges, 5)
        assert sum(weights[i, j] for i, j in edges) == pytest.approx(
            brute_force_tree_weight(weights)
        )

    def test_orientation(self):
        """Test rooting a path at node 0 points every parent toward the root."""
        parents = orient_tree([(0, 1), (1, 2), (1, 3)], 4)
        assert parents.tolist() == [NO_PARENT, 0, 1, 1]

    def test_each_feature_has_at_most_one_parent(self, correlated):
        """Test exactly one feature is the root."""
        parents = train_bayes_net_tan(correlated).params.parents
        assert (parents == NO_PARENT).sum() == 1


class TestDiscretization:
    """Test equal-frequency bins."""

    def test_ten_bins(self):
        """Test 100 distinct values fall into ten bins of about ten."""
        column = np.arange(100, dtype=float)
        cuts = equal_frequency_cuts(column, 10)
        counts = np.bincount(apply_cuts(column, cuts))
        assert len(counts) == 10
        assert counts.min() >= 9
        assert counts.max() <= 11

    def test_ties_collapse_cuts(self):
        """Test repeated values give fewer, distinct cuts."""
        cuts = equal_frequency_cuts(np.array([1.0] * 9 + [2.0]), 10)
        assert len(cuts) == len(np.unique(cuts))
        assert len(cuts) < 9


class TestPrediction:
    """Test TAN posteriors."""

    def test_one_feature_is_naive_bayes(self):
        """Test a single categorical feature gives the naive Bayes posterior."""
        X = [[0], [1], [1], [2], [2], [2]]
        y = [0, 0, 1, 1, 1, 0]
        data = FeatureMatrix.from_arrays(X, y, categorical={0: 3})
        queries = np.array([[0.0], [1.0], [2.0]])
        np.testing.assert_allclose(
            predict_proba_matrix(train_bayes_net_tan(data), queries),
            predict_proba_matrix(train_naive_bayes(data), queries),
            rtol=1e-12,
        )

    def test_rows_sum_to_one(self, correlated):
        """Test outputs are distributions, unseen codes included."""
        model = train_bayes_net_tan(correlated)
        X = np.array([[0, 0, 0], [2, 1, 0], [9, 9, 9], [-3, 0, 1]], dtype=float)
        np.testing.assert_allclose(predict_proba_matrix(model, X).sum(axis=1), 1.0, atol=1e-9)

    def test_duplication_invariance(self):
        """Test doubling every row leaves posteriors unchanged without smoothing."""
        rng = np.random.default_rng(3)
        X = rng.normal(size=(60, 3))
        y = (X[:, 0] + X[:, 1] > 0).astype(int)
        params = BayesParams(smoothing=0.0, n_bins=4)
        single = train_bayes_net_tan(FeatureMatrix.from_arrays(X, y), params)
        double = train_bayes_net_tan(
            FeatureMatrix.from_arrays(np.vstack([X, X]), np.concatenate([y, y])), params
        )
        np.testing.assert_allclose(
            predict_proba_matrix(single, X), predict_proba_matrix(double, X), rtol=1e-12
        )

    def test_summary_records_tree(self, correlated):
        """Test provenance carries the learned edges."""
        model = train_bayes_net_tan(correlated)
        assert [tuple(e) for e in model.provenance.summary["edges"]] == model.params.edges

    def test_single_class(self):
        """Test one class only is refused."""
        with pytest.raises(SingleClassError):
            train_bayes_net_tan(FeatureMatrix.from_arrays([[1.0], [2.0]], [0, 0]))
