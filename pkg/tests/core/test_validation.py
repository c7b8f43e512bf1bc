"""
Test trace validation.
"""

from driveby_sentinel.core.validation import validate_snapshot, validate_trace
from driveby_sentinel.models.types import EventKind, Label, LowLevelEvent
from tests.fixtures.toy_data import make_snapshot, make_trace, toy_config

PERIOD = 4


def _codes(result):
    return [v.code for v in result.violations]


def test_well_formed_trace_is_ok():
    """A generated-shape trace has no violations."""
    trace = make_trace("t-0", Label.MALICIOUS, onset=2, period=PERIOD)
    result = validate_trace(trace, toy_config(PERIOD))
    assert result.ok
    assert result.messages() == []


def test_short_trace_reports_length():
    """A trace with fewer snapshots than the period is flagged."""
    trace = make_trace(period=PERIOD - 1)
    result = validate_trace(trace, toy_config(PERIOD))
    assert "length" in _codes(result)


def test_missing_tail_steps_are_named():
    """Steps cut off at the end are reported one by one, not just as a length."""
    trace = make_trace(period=PERIOD - 2)
    result = validate_trace(trace, toy_config(PERIOD))
    tail = [v for v in result.violations if v.code == "gap"]
    assert [v.step for v in tail] == [PERIOD - 1, PERIOD]
    assert f"missing step {PERIOD}" in result.messages()


def test_missing_field_reports_field_count():
    """Dropping one machine field gives a field-count violation naming it."""
    snapshot = make_snapshot()
    values = dict(snapshot.machine.values)
    del values["bytes_sent"]
    broken = snapshot.model_copy(
        update={"machine": snapshot.machine.model_copy(update={"values": values})}
    )
    violations = validate_snapshot(broken)
    assert [v.code for v in violations] == ["field_count"]
    assert "field-count mismatch" in violations[0].message
    assert "bytes_sent" in violations[0].message


def test_counter_regression():
    """A counter that decreases between steps is flagged at the later step."""
    trace = make_trace(period=PERIOD)
    snapshots = list(trace.snapshots)
    snapshots[2] = make_snapshot(
        trace.trace_id, 3, label=Label.BENIGN, machine={"bytes_sent": 0.0}
    )
    broken = trace.model_copy(update={"snapshots": tuple(snapshots)})
    result = validate_trace(broken, toy_config(PERIOD))
    regressions = [v for v in result.violations if v.code == "counter_regression"]
    assert [(v.field, v.step) for v in regressions] == [("bytes_sent", 3)]


def test_percent_and_negative_values():
    """Percents above 100 and negative numbers are flagged."""
    snapshot = make_snapshot(machine={"cpu_percent": 120.0, "process_count": -1.0})
    codes = {v.code for v in validate_snapshot(snapshot)}
    assert codes == {"percent_range", "negative"}


def test_wrong_value_type():
    """A string in a numeric field and a number in a boolean field are flagged."""
    snapshot = make_snapshot(machine={"cpu_percent": "high"}, tweet={"user_verified": 1})
    fields = {v.field for v in validate_snapshot(snapshot) if v.code == "type"}
    assert fields == {"cpu_percent", "user_verified"}


def test_absent_values_are_allowed():
    """None is the absent marker, not a violation."""
    assert validate_snapshot(make_snapshot(machine={"cpu_percent": None})) == []


def test_gap_duplicate_and_order():
    """Gaps, duplicate steps and unsorted snapshots are all reported."""
    trace = make_trace(period=PERIOD)
    s = trace.snapshots
    shuffled = trace.model_copy(update={"snapshots": (s[1], s[0], s[3], s[3])})
    codes = _codes(validate_trace(shuffled, toy_config(PERIOD)))
    assert "order" in codes
    assert "duplicate" in codes
    assert "gap" in codes


def test_label_and_trace_id_mismatch():
    """Snapshot labels and owners must agree with the trace."""
    trace = make_trace("t-0", Label.BENIGN, period=PERIOD)
    s = list(trace.snapshots)
    s[0] = s[0].model_copy(update={"label": Label.MALICIOUS})
    s[1] = s[1].model_copy(update={"trace_id": "t-9"})
    broken = trace.model_copy(update={"snapshots": tuple(s)})
    codes = _codes(validate_trace(broken, toy_config(PERIOD)))
    assert "label" in codes
    assert "trace_id" in codes


def test_tweet_metadata_must_be_constant():
    """Tweet metadata may not change within a trace."""
    trace = make_trace(period=PERIOD)
    s = list(trace.snapshots)
    s[2] = make_snapshot(trace.trace_id, 3, label=Label.BENIGN, tweet={"retweet_count": 99.0})
    broken = trace.model_copy(update={"snapshots": tuple(s)})
    result = validate_trace(broken, toy_config(PERIOD))
    assert "tweet_constancy" in _codes(result)


def test_onset_rules():
    """A benign trace with an onset, or an onset past the period, is flagged."""
    benign = make_trace(period=PERIOD).model_copy(update={"onset_step": 2})
    late = make_trace("t-1", Label.MALICIOUS, onset=2, period=PERIOD).model_copy(
        update={"onset_step": PERIOD + 1}
    )
    assert _codes(validate_trace(benign, toy_config(PERIOD))) == ["onset"]
    assert _codes(validate_trace(late, toy_config(PERIOD))) == ["onset"]


def test_event_after_period():
    """Events must happen within the observation period."""
    trace = make_trace(period=PERIOD).model_copy(
        update={
            "events": (
                LowLevelEvent(time_step=PERIOD + 2, kind=EventKind.FILE_WRITE, target="x"),
            )
        }
    )
    assert _codes(validate_trace(trace, toy_config(PERIOD))) == ["event_step"]
