"""
Long-running sentinel holding the current model.

Traces are monitored against the model captured when their stream
starts; ``swap_model`` replaces the model for later traces only.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor

from driveby_sentinel.classifiers.base import TrainedModel
from driveby_sentinel.errors import ConfigError
from driveby_sentinel.models.reports import Verdict
from driveby_sentinel.models.types import ObservationConfig, Snapshot
from driveby_sentinel.sources.interfaces import SnapshotSource

from .monitor import DEFAULT_DEADLINE_MS, DEFAULT_THRESHOLD, monitor

logger = logging.getLogger(__name__)


class Sentinel:
    """Early-kill runtime shared by concurrent trace monitors."""

    def __init__(
        self,
        model: TrainedModel,
        threshold: float = DEFAULT_THRESHOLD,
        cfg: ObservationConfig | None = None,
        *,
        deadline_ms: float = DEFAULT_DEADLINE_MS,
    ):
        self._model = model
        self._lock = threading.Lock()
        self.threshold = threshold
        self.cfg = cfg or ObservationConfig()
        self.deadline_ms = deadline_ms
        self.stats = {"traces": 0, "killed": 0, "swaps": 0}

    @property
    def model(self) -> TrainedModel:
        """Model new traces will be monitored with."""
        with self._lock:
            return self._model

    def swap_model(self, model: TrainedModel) -> TrainedModel:
        """Install a new model; traces already being watched keep the old one.

        Returns:
            The replaced model
        """
        with self._lock:
            previous, self._model = self._model, model
            self.stats["swaps"] += 1
        logger.info(
            "Swapped model: %s (generation %s) -> %s (generation %s)",
            previous.kind.value,
            previous.provenance.label_generation,
            model.kind.value,
            model.provenance.label_generation,
        )
        return previous

    def watch(self, stream: Iterable[Snapshot]) -> Verdict:
        """Monitor one trace with the model current at its start."""
        model = self.model
        verdict = monitor(stream, model, self.threshold, self.cfg, deadline_ms=self.deadline_ms)
        with self._lock:
            self.stats["traces"] += 1
            self.stats["killed"] += int(verdict.killed)
        return verdict

    def run(self, source: SnapshotSource) -> Iterator[Verdict]:
        """Monitor every trace of a source in arrival order."""
        logger.info("Sentinel watching %s (threshold %.3f)", source.name, self.threshold)
        for _, stream in source.traces():
            yield self.watch(stream)

    def watch_many(
        self, streams: Iterable[Iterable[Snapshot]], *, workers: int = 4
    ) -> list[Verdict]:
        """Monitor independent traces on a thread pool; verdicts keep input order.

        Each stream must be private to its trace (a list or its own
        iterator), unlike the shared line reader of a JSONL source.
        """
        if workers < 1:
            msg = f"workers must be >= 1, got {workers}"
            raise ConfigError(msg)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.watch, streams))
