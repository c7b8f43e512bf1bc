"""
Test the classifier factory.
"""

import pytest

from driveby_sentinel.classifiers.factory import (
    ALGORITHM_ALIASES,
    algorithm_name,
    get_trainer,
    reset_trainers,
    resolve_algorithm,
    set_trainer,
    train_model,
)
from driveby_sentinel.errors import ConfigError
from driveby_sentinel.features.extraction import FeatureMatrix
from driveby_sentinel.models.config import ModelKind, TrainConfig


@pytest.fixture
def data():
    """A tiny separable matrix."""
    return FeatureMatrix.from_arrays(
        [[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]], [0] * 3 + [1] * 3
    )


@pytest.fixture(autouse=True)
def _restore_trainers():
    yield
    reset_trainers()


class TestNames:
    """Test algorithm name resolution."""

    @pytest.mark.parametrize(
        ("name", "kind"),
        [
            ("nb", ModelKind.NAIVE_BAYES),
            ("tan", ModelKind.BAYES_NET_TAN),
            ("J48", ModelKind.DECISION_TREE),
            (" mlp ", ModelKind.MLP),
            ("vote", ModelKind.VOTE),
            ("decision_tree", ModelKind.DECISION_TREE),
        ],
    )
    def test_resolve(self, name, kind):
        """Test short names, kind values, case and whitespace."""
        assert resolve_algorithm(name) is kind

    def test_kind_passes_through(self):
        """Test a ModelKind resolves to itself."""
        assert resolve_algorithm(ModelKind.MLP) is ModelKind.MLP

    def test_unknown(self):
        """Test an unknown name is a configuration error listing the choices."""
        with pytest.raises(ConfigError, match="j48"):
            resolve_algorithm("svm")

    def test_names_invert_aliases(self):
        """Test algorithm_name gives the short name back."""
        for alias, kind in ALGORITHM_ALIASES.items():
            assert algorithm_name(kind) == alias


class TestTrainModel:
    """Test training through the factory."""

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_every_kind(self, data, kind):
        """Test each kind trains and records its configuration."""
        config = TrainConfig(algo=kind, upto_step=1, seed=3)
        model = train_model(data, config, dataset_id="tiny", label_generation=2)
        assert model.kind is kind
        assert model.provenance.config == config
        assert model.provenance.dataset_id == "tiny"
        assert model.provenance.label_generation == 2

    def test_vote_members_trained_from_config(self, data):
        """Test vote members are trained with the vote's settings."""
        config = TrainConfig(
            algo=ModelKind.VOTE,
            upto_step=1,
            vote_members=(ModelKind.NAIVE_BAYES, ModelKind.MLP, ModelKind.DECISION_TREE),
        )
        model = train_model(data, config)
        assert [m.kind for m in model.params.members] == list(config.vote_members)
        assert all(m.provenance.config.algo is m.kind for m in model.params.members)

    def test_injected_trainer(self, data):
        """Test set_trainer replaces a trainer until reset."""
        calls = []
        original = get_trainer(ModelKind.NAIVE_BAYES)

        def spy(matrix, config, dataset_id, generation):
            calls.append(dataset_id)
            return original(matrix, config, dataset_id, generation)

        set_trainer(ModelKind.NAIVE_BAYES, spy)
        train_model(data, TrainConfig(algo=ModelKind.NAIVE_BAYES, upto_step=1), dataset_id="x")
        assert calls == ["x"]
        reset_trainers()
        assert get_trainer(ModelKind.NAIVE_BAYES) is original
