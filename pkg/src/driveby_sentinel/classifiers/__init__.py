"""
Snapshot classifiers behind one train/predict interface.

Naive Bayes, tree-augmented naive Bayes, a C4.5-style decision tree, a
multilayer perceptron and the average-probability vote, plus the model
container and the name-based training factory.
"""

from .base import (
    ClassifierParams,
    Provenance,
    TrainedModel,
    predict_proba,
    predict_proba_matrix,
)
from .bayes_net import (
    TanParams,
    conditional_mutual_information,
    maximum_spanning_tree,
    train_bayes_net_tan,
)
from .decision_tree import DecisionTreeParams, TreeNode, grow_tree, train_decision_tree
from .factory import (
    ALGORITHM_ALIASES,
    algorithm_name,
    get_trainer,
    reset_trainers,
    resolve_algorithm,
    set_trainer,
    train_model,
)
from .mlp import MlpNetwork, mlp_loss_and_gradients, train_mlp
from .naive_bayes import NaiveBayesParams, train_naive_bayes
from .serialization import (
    MODEL_FORMAT,
    MODEL_VERSION,
    deserialize_model,
    load_model,
    save_model,
    serialize_model,
)
from .vote import VoteParams, train_vote

__all__ = [
    "ALGORITHM_ALIASES",
    "MODEL_FORMAT",
    "MODEL_VERSION",
    "ClassifierParams",
    "DecisionTreeParams",
    "MlpNetwork",
    "NaiveBayesParams",
    "Provenance",
    "TanParams",
    "TrainedModel",
    "TreeNode",
    "VoteParams",
    "algorithm_name",
    "conditional_mutual_information",
    "deserialize_model",
    "get_trainer",
    "grow_tree",
    "load_model",
    "maximum_spanning_tree",
    "mlp_loss_and_gradients",
    "predict_proba",
    "predict_proba_matrix",
    "reset_trainers",
    "resolve_algorithm",
    "save_model",
    "serialize_model",
    "set_trainer",
    "train_bayes_net_tan",
    "train_decision_tree",
    "train_mlp",
    "train_model",
    "train_naive_bayes",
    "train_vote",
]
