"""
Core trace checks shared by the generator, the store and the CLI.
"""

from .validation import validate_snapshot, validate_trace

__all__ = [
    "validate_snapshot",
    "validate_trace",
]
