"""
driveby-sentinel

Early-kill prediction of drive-by downloads from per-second behavioral
snapshots of a URL interaction.

Key Features:
- Seeded synthetic trace generator with a versioned exclusion-rule oracle
- Line-delimited snapshot store with systematic samples and nested splits
- Prefix-trained classifiers: naive Bayes, tree-augmented Bayes network,
  C4.5-style decision tree, multilayer perceptron and average-probability vote
- Evaluation harness: cumulative-time sweeps, ablation, cross-event tests,
  sample-size growth study
- Online sentinel that stops a trace at its first malicious snapshot
- CLI for seeded, reproducible experiment runs

Quick Start:
    from driveby_sentinel import ObservationConfig, TrainConfig
    from driveby_sentinel import generate_dataset, load_profiles, monitor
    from driveby_sentinel.classifiers import train_model
    from driveby_sentinel.features import encode_table, build_schema, tabulate

    data = generate_dataset(200, 0.13, load_profiles(), ObservationConfig(), seed=42)
    table = tabulate(data.traces).window(3)
    matrix = encode_table(table, build_schema(table))
    model = train_model(matrix, TrainConfig(algo="decision_tree", upto_step=3))
    verdict = monitor(iter(data.traces[0].snapshots), model)
"""

__version__ = "0.1.0"

from .models import (
    ExclusionRuleSet,
    Label,
    ObservationConfig,
    Snapshot,
    TrainConfig,
    UrlTrace,
)
from .sentinel import monitor
from .synthesis import generate_dataset, label_trace, load_profiles

__all__ = [
    "ExclusionRuleSet",
    "Label",
    "ObservationConfig",
    "Snapshot",
    "TrainConfig",
    "UrlTrace",
    "generate_dataset",
    "label_trace",
    "load_profiles",
    "monitor",
]
