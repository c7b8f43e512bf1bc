"""
Snapshot sources for the sentinel.

This package provides the different ways a live or replayed trace
reaches the monitor.
"""

from .factory import create_snapshot_source
from .interfaces import RecordingStream, SnapshotSource, TraceStream
from .replay import STDIN, DatasetSource, JsonlSnapshotSource

__all__ = [
    "STDIN",
    "DatasetSource",
    "JsonlSnapshotSource",
    "RecordingStream",
    "SnapshotSource",
    "TraceStream",
    "create_snapshot_source",
]
