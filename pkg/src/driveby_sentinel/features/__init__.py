"""
Feature extraction for snapshot classifiers.

This package turns traces into model-ready vectors: cumulative time
windows, schema building on training rows, encoding and Pearson ranking.
"""

from .extraction import (
    CATEGORICAL_FIELDS,
    NUMERIC_FIELDS,
    RESERVED_CODE,
    UNLABELED,
    Encoding,
    FeatureDef,
    FeatureKind,
    FeatureMatrix,
    FeatureSchema,
    FeatureVector,
    SnapshotTable,
    build_schema,
    cumulative_window,
    encode,
    encode_table,
    frequency_bin,
    tabulate,
)
from .ranking import FeatureCorrelation, pearson_rank

__all__ = [
    "CATEGORICAL_FIELDS",
    "NUMERIC_FIELDS",
    "RESERVED_CODE",
    "UNLABELED",
    "Encoding",
    "FeatureCorrelation",
    "FeatureDef",
    "FeatureKind",
    "FeatureMatrix",
    "FeatureSchema",
    "FeatureVector",
    "SnapshotTable",
    "build_schema",
    "cumulative_window",
    "encode",
    "encode_table",
    "frequency_bin",
    "pearson_rank",
    "tabulate",
]
