"""
Unit tests for classifiers/vote.py.
"""

import numpy as np
import pytest

from driveby_sentinel.classifiers.base import predict_proba, predict_proba_matrix
from driveby_sentinel.classifiers.decision_tree import train_decision_tree
from driveby_sentinel.classifiers.naive_bayes import train_naive_bayes
from driveby_sentinel.classifiers.vote import train_vote
from driveby_sentinel.errors import ConfigError, SchemaMismatchError
from driveby_sentinel.features.extraction import FeatureMatrix, FeatureVector
from driveby_sentinel.models.config import ModelKind
from driveby_sentinel.models.types import Label
from tests.fixtures.stub_models import SCHEMA, constant_model


def _vector():
    return FeatureVector(values=(0.5,), fingerprint=SCHEMA.fingerprint)


class TestVote:
    """Test the average-probability vote."""

    def test_mean_of_members(self):
        """Test members at 0.4 and 0.2 malicious average to 0.3."""
        vote = train_vote([constant_model(0.4), constant_model(0.2)])
        assert predict_proba(vote, _vector()).p_malicious == pytest.approx(0.3)

    def test_identical_members(self):
        """Test a vote of copies answers exactly like the copy."""
        member = constant_model(0.37)
        pair = train_vote([member, member])
        triple = train_vote([member, member, member])
        assert predict_proba(pair, _vector()) == predict_proba(member, _vector())
        assert predict_proba(triple, _vector()).p_malicious == pytest.approx(0.37, abs=1e-15)

    def test_tie_goes_benign(self):
        """Test opposite members average to 0.5, resolved benign."""
        vote = train_vote([constant_model(0.9), constant_model(0.1)])
        distribution = predict_proba(vote, _vector())
        assert distribution.p_malicious == pytest.approx(0.5)
        assert distribution.label is Label.BENIGN

    def test_mean_not_majority(self):
        """Test the mean decides even when most members disagree."""
        members = [constant_model(0.9), constant_model(0.4), constant_model(0.4)]
        distribution = predict_proba(train_vote(members), _vector())
        assert distribution.p_malicious == pytest.approx(1.7 / 3)
        assert distribution.label is Label.MALICIOUS
        assert sum(predict_proba(m, _vector()).label is Label.BENIGN for m in members) == 2

    def test_trained_members(self):
        """Test a vote of real learners averages their matrices."""
        rng = np.random.default_rng(0)
        X = rng.normal(size=(40, 2))
        data = FeatureMatrix.from_arrays(X, (X[:, 0] > 0).astype(int))
        nb = train_naive_bayes(data)
        tree = train_decision_tree(data)
        vote = train_vote([nb, tree])
        expected = (predict_proba_matrix(nb, data) + predict_proba_matrix(tree, data)) / 2
        np.testing.assert_allclose(predict_proba_matrix(vote, data), expected)
        assert vote.provenance.config.algo is ModelKind.VOTE
        assert vote.provenance.config.vote_members == (
            ModelKind.NAIVE_BAYES,
            ModelKind.DECISION_TREE,
        )

    def test_one_member(self):
        """Test a single member is refused."""
        with pytest.raises(ConfigError):
            train_vote([constant_model(0.5)])

    def test_schema_mismatch(self):
        """Test members trained on different schemas are refused."""
        other = FeatureMatrix.from_arrays([[0.0, 1.0]], [0]).schema
        with pytest.raises(SchemaMismatchError):
            train_vote([constant_model(0.5), constant_model(0.5, other)])


class TestPredictProba:
    """Test the single-vector entry point."""

    def test_foreign_fingerprint(self):
        """Test a vector encoded with another schema is refused."""
        with pytest.raises(SchemaMismatchError):
            predict_proba(constant_model(0.5), FeatureVector(values=(1.0,), fingerprint="abc"))

    def test_wrong_width(self):
        """Test a vector of the wrong length is refused."""
        with pytest.raises(SchemaMismatchError):
            predict_proba(constant_model(0.5), FeatureVector(values=(1.0, 2.0)))

    def test_distribution_sums_to_one(self):
        """Test p_benign is the complement of p_malicious."""
        distribution = predict_proba(constant_model(0.3), _vector())
        assert distribution.p_benign + distribution.p_malicious == pytest.approx(1.0, abs=1e-9)
