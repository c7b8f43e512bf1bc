"""
Abstract interface for snapshot sources.

A source hands the sentinel one lazy snapshot iterator per trace. The
sentinel pulls from that iterator one snapshot at a time and stops
pulling at its decision, so a source must never materialise a trace's
remaining snapshots on its behalf.
"""

from abc import ABC, abstractmethod
from collections.abc import Iterator

from driveby_sentinel.models.types import Snapshot

TraceStream = tuple[str, Iterator[Snapshot]]


class SnapshotSource(ABC):
    """
    Abstract interface for per-trace snapshot streams.

    Implementations replay stored datasets or read snapshot lines from a
    file or pipe.
    """

    @abstractmethod
    def traces(self) -> Iterator[TraceStream]:
        """Yield (trace_id, snapshot iterator) pairs in arrival order."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Human-readable description used in logs."""


class RecordingStream(Iterator[Snapshot]):
    """Iterator wrapper recording every step handed out."""

    def __init__(self, snapshots: Iterator[Snapshot] | list[Snapshot]):
        self._inner = iter(snapshots)
        self.steps_read: list[int] = []

    def __iter__(self) -> "RecordingStream":
        return self

    def __next__(self) -> Snapshot:
        snapshot = next(self._inner)
        self.steps_read.append(snapshot.time_step)
        return snapshot

    @property
    def last_step(self) -> int | None:
        """Highest step consumed so far."""
        return self.steps_read[-1] if self.steps_read else None
