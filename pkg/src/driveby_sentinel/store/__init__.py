"""
Persistent snapshot storage.

Datasets are directories of line-delimited records plus a manifest.
Samples and splits are trace-level views over a dataset.
"""

from .snapshot_store import (
    ClassCounts,
    DatasetHandle,
    DatasetProvenance,
    DatasetStats,
    StoreManifest,
    TraceRecord,
    append_snapshots,
    append_trace,
    append_traces,
    create_dataset,
    dataset_stats,
    import_traces,
    iter_snapshots,
    iter_trace_records,
    load_traces,
    materialize,
    nested_fraction_split,
    open_dataset,
    register_trace,
    seal,
    split_by_fraction,
    stratified_take,
    systematic_sample,
    trace_index,
    verify_dataset,
    write_dataset,
)

__all__ = [
    "ClassCounts",
    "DatasetHandle",
    "DatasetProvenance",
    "DatasetStats",
    "StoreManifest",
    "TraceRecord",
    "append_snapshots",
    "append_trace",
    "append_traces",
    "create_dataset",
    "dataset_stats",
    "import_traces",
    "iter_snapshots",
    "iter_trace_records",
    "load_traces",
    "materialize",
    "nested_fraction_split",
    "open_dataset",
    "register_trace",
    "seal",
    "split_by_fraction",
    "stratified_take",
    "systematic_sample",
    "trace_index",
    "verify_dataset",
    "write_dataset",
]
