"""
External interfaces for driveby-sentinel.

- CLI for command-line usage
- Seeded end-to-end reproduction run
"""

# Note: the CLI is not imported by default; use the console script or
# from .cli import main

from .repro import ReproPlan, ReproResult, run_repro

__all__ = ["ReproPlan", "ReproResult", "run_repro"]
