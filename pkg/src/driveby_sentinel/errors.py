"""
Exception hierarchy for driveby-sentinel.

Every error raised on purpose by the package derives from SentinelError.
The CLI maps the two families below to distinct exit codes:
ConfigError (bad parameters) and DataError (bad or missing inputs).
"""

from __future__ import annotations


class SentinelError(Exception):
    """Base class for all driveby-sentinel errors."""


class ConfigError(SentinelError):
    """Invalid configuration: parameters, fractions, profile or algorithm names."""


class DataError(SentinelError):
    """Input data is missing, malformed or unusable for the requested operation."""


class SchemaMismatchError(DataError):
    """A record or vector does not match the expected field schema."""


class SingleClassError(DataError):
    """Training or ranking data contains only one class."""


class InsufficientDataError(DataError):
    """Not enough traces (per class) for the requested protocol."""


class LeakageError(DataError):
    """A test trace would influence training or schema encoding."""


class OutOfOrderSnapshotError(DataError):
    """A snapshot stream delivered steps out of order."""


class StoreError(DataError):
    """Snapshot store is missing, sealed or corrupt."""


class ModelFormatError(DataError):
    """A serialized model payload is corrupt or not a model container."""


class ModelVersionError(ModelFormatError):
    """A serialized model uses an unsupported container version."""


class TrainingDivergedError(SentinelError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, loss: float) -> None:
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"Non-finite training loss {loss!r} at epoch {epoch}")
