"""
Early-kill sentinel.

Online monitoring of live or replayed traces, the batch stopping rule it
must agree with, the model-holding runtime and the feed-forward
retraining cycle.
"""

from .adaptive import AFTER, BEFORE, CycleOutcome, adaptive_cycle, next_trace_index
from .monitor import (
    DEFAULT_DEADLINE_MS,
    DEFAULT_GRACE_STEPS,
    DEFAULT_THRESHOLD,
    batch_decision,
    batch_monitor,
    monitor,
)
from .runtime import Sentinel

__all__ = [
    "AFTER",
    "BEFORE",
    "DEFAULT_DEADLINE_MS",
    "DEFAULT_GRACE_STEPS",
    "DEFAULT_THRESHOLD",
    "CycleOutcome",
    "Sentinel",
    "adaptive_cycle",
    "batch_decision",
    "batch_monitor",
    "monitor",
    "next_trace_index",
]
