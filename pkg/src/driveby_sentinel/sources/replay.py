"""
Snapshot sources replaying stored or line-delimited traces.
"""

from __future__ import annotations

import itertools
import logging
import sys
from collections.abc import Iterator
from pathlib import Path
from typing import TextIO

from pydantic import ValidationError

from driveby_sentinel.errors import DataError, SchemaMismatchError
from driveby_sentinel.models.types import Snapshot
from driveby_sentinel.store.snapshot_store import DatasetHandle, FileHeader, load_traces

from .interfaces import SnapshotSource, TraceStream

logger = logging.getLogger(__name__)

STDIN = "-"


class DatasetSource(SnapshotSource):
    """Replays every trace of a stored dataset (or view) in step order."""

    def __init__(self, handle: DatasetHandle):
        self.handle = handle

    @property
    def name(self) -> str:
        return f"dataset {self.handle.dataset_id}"

    def traces(self) -> Iterator[TraceStream]:
        for trace in load_traces(self.handle):
            ordered = sorted(trace.snapshots, key=lambda s: s.time_step)
            yield trace.trace_id, (s.without_label() for s in ordered)


class JsonlSnapshotSource(SnapshotSource):
    """
    Snapshot lines from a file or stdin.

    Consecutive lines sharing a trace_id form one trace. A leading store
    file header is skipped, so a dataset's snapshots.jsonl can be piped in
    directly.
    """

    def __init__(self, path: str | Path = STDIN, stream: TextIO | None = None):
        self.path = str(path)
        self._stream = stream

    @property
    def name(self) -> str:
        return "stdin" if self.path == STDIN else self.path

    def _lines(self) -> Iterator[str]:
        if self._stream is not None:
            yield from self._stream
            return
        if self.path == STDIN:
            yield from sys.stdin
            return
        target = Path(self.path)
        if not target.is_file():
            msg = f"Snapshot stream not found: {target}"
            raise DataError(msg)
        with target.open(encoding="utf-8") as handle:
            yield from handle

    def _snapshots(self) -> Iterator[Snapshot]:
        for number, line in enumerate(self._lines(), start=1):
            text = line.strip()
            if not text:
                continue
            try:
                yield Snapshot.model_validate_json(text)
            except ValidationError as e:
                if number == 1 and _is_header(text):
                    continue
                msg = f"{self.name}:{number}: not a snapshot record: {e}"
                raise SchemaMismatchError(msg) from e

    def traces(self) -> Iterator[TraceStream]:
        for trace_id, group in itertools.groupby(self._snapshots(), key=lambda s: s.trace_id):
            yield trace_id, group


def _is_header(text: str) -> bool:
    try:
        FileHeader.model_validate_json(text)
    except ValidationError:
        return False
    return True
