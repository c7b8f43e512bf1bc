"""
Test the model-holding sentinel runtime.
"""

import io

import pytest

from driveby_sentinel.errors import ConfigError
from driveby_sentinel.models.types import Label
from driveby_sentinel.sentinel.runtime import Sentinel
from driveby_sentinel.sources.replay import JsonlSnapshotSource
from tests.fixtures.stub_models import CPU_SCHEMA, constant_model
from tests.fixtures.toy_data import make_trace, toy_config

PERIOD = 4
CFG = toy_config(PERIOD)


def _snapshots(trace_id):
    return [s.without_label() for s in make_trace(trace_id, Label.BENIGN, period=PERIOD).snapshots]


@pytest.fixture
def quiet():
    """A model that never kills."""
    return constant_model(0.1, CPU_SCHEMA, generation=1)


@pytest.fixture
def alarmed():
    """A model that kills at the first snapshot."""
    return constant_model(0.9, CPU_SCHEMA, generation=2)


class TestWatch:
    """Test monitoring through the runtime."""

    def test_stats(self, quiet):
        """Test trace and kill counters."""
        sentinel = Sentinel(quiet, cfg=CFG)
        verdict = sentinel.watch(_snapshots("a"))
        assert not verdict.killed
        assert verdict.decision_step == PERIOD
        assert sentinel.stats == {"traces": 1, "killed": 0, "swaps": 0}

    def test_run_over_source(self, alarmed):
        """Test every trace of a source gets a verdict in arrival order."""
        lines = "".join(s.model_dump_json() + "\n" for t in ("a", "b") for s in _snapshots(t))
        sentinel = Sentinel(alarmed, cfg=CFG)
        verdicts = list(sentinel.run(JsonlSnapshotSource(stream=io.StringIO(lines))))
        assert [(v.trace_id, v.decision_step) for v in verdicts] == [("a", 1), ("b", 1)]
        assert sentinel.stats["killed"] == 2


class TestSwap:
    """Test replacing the model while traces are in flight."""

    def test_swap_returns_previous(self, quiet, alarmed):
        """Test the old model is handed back and the swap counted."""
        sentinel = Sentinel(quiet, cfg=CFG)
        assert sentinel.swap_model(alarmed) is quiet
        assert sentinel.model is alarmed
        assert sentinel.stats["swaps"] == 1

    def test_trace_in_flight_keeps_its_model(self, quiet, alarmed):
        """Test a swap during a trace only affects later traces."""
        sentinel = Sentinel(quiet, cfg=CFG)

        def swapping_stream():
            snapshots = _snapshots("a")
            yield snapshots[0]
            sentinel.swap_model(alarmed)
            yield from snapshots[1:]

        first = sentinel.watch(swapping_stream())
        second = sentinel.watch(_snapshots("b"))
        assert not first.killed
        assert first.decision_step == PERIOD
        assert second.killed
        assert second.decision_step == 1


class TestWatchMany:
    """Test concurrent monitoring."""

    def test_order_kept(self, alarmed):
        """Test verdicts come back in input order."""
        sentinel = Sentinel(alarmed, cfg=CFG)
        ids = [f"t-{i}" for i in range(10)]
        verdicts = sentinel.watch_many([_snapshots(t) for t in ids], workers=3)
        assert [v.trace_id for v in verdicts] == ids
        assert sentinel.stats["traces"] == 10
        assert sentinel.stats["killed"] == 10

    def test_workers_must_be_positive(self, quiet):
        """Test a pool without workers is refused."""
        with pytest.raises(ConfigError):
            Sentinel(quiet).watch_many([], workers=0)
