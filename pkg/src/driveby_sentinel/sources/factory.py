"""
Factory for snapshot sources.

Picks the source implementation from the --in argument: "-" reads stdin,
a directory holding a dataset manifest replays the dataset and any
other path is read as snapshot lines.
"""

from __future__ import annotations

import logging
from pathlib import Path

from driveby_sentinel.errors import DataError
from driveby_sentinel.store.snapshot_store import MANIFEST_FILE, open_dataset

from .interfaces import SnapshotSource
from .replay import STDIN, DatasetSource, JsonlSnapshotSource

logger = logging.getLogger(__name__)


def create_snapshot_source(path: str | Path) -> SnapshotSource:
    """
    Create the snapshot source for a path.

    Raises:
        DataError: the path does not exist
        StoreError: a dataset directory that cannot be opened
    """
    if str(path) == STDIN:
        return JsonlSnapshotSource(STDIN)
    target = Path(path)
    if target.is_dir():
        if (target / MANIFEST_FILE).is_file():
            logger.debug("Replaying dataset at %s", target)
            return DatasetSource(open_dataset(target))
        msg = f"Directory {target} holds no dataset manifest"
        raise DataError(msg)
    if not target.exists():
        msg = f"Snapshot stream not found: {target}"
        raise DataError(msg)
    return JsonlSnapshotSource(target)
