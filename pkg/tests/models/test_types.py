"""
Unit tests for models/types.py, models/config.py and models/schema.py.

Tests the Pydantic models for validation and serialization.
"""

import pytest
from pydantic import ValidationError

from driveby_sentinel.models.config import (
    CycleConfig,
    MlpParams,
    ModelKind,
    TrainConfig,
)
from driveby_sentinel.models.reports import ConfusionCounts, EvalReport, MetricRow
from driveby_sentinel.models.schema import (
    COUNTER_FIELDS,
    MACHINE_FIELD_COUNT,
    MACHINE_FIELD_NAMES,
    PERCENT_FIELDS,
    TWEET_FIELD_COUNT,
    TWEET_FIELD_NAMES,
)
from driveby_sentinel.models.types import (
    ClassDistribution,
    EventKind,
    ExclusionRule,
    ExclusionRuleSet,
    Label,
    LowLevelEvent,
    ObservationConfig,
)
from tests.fixtures.toy_data import make_snapshot, make_trace

SNAPSHOT_ATTRIBUTES = 78
HALF = 0.5


class TestCatalogue:
    """Test the published field catalogue."""

    def test_field_counts(self):
        """Test 54 machine and 24 tweet fields."""
        assert len(MACHINE_FIELD_NAMES) == MACHINE_FIELD_COUNT
        assert len(TWEET_FIELD_NAMES) == TWEET_FIELD_COUNT

    def test_names_unique(self):
        """Test no field name appears twice."""
        names = MACHINE_FIELD_NAMES + TWEET_FIELD_NAMES
        assert len(set(names)) == len(names)

    def test_counters_and_percents_are_machine_fields(self):
        """Test counter and percent flags only apply to machine metrics."""
        assert set(COUNTER_FIELDS) <= set(MACHINE_FIELD_NAMES)
        assert "cpu_percent" in PERCENT_FIELDS
        assert "bytes_received" in COUNTER_FIELDS


class TestLabel:
    """Test Label codes."""

    def test_index(self):
        """Test benign=0, malicious=1."""
        assert Label.BENIGN.index == 0
        assert Label.MALICIOUS.index == 1

    def test_from_index_roundtrip(self):
        """Test from_index inverts index."""
        for label in Label:
            assert Label.from_index(label.index) is label


class TestObservationConfig:
    """Test ObservationConfig."""

    def test_defaults(self):
        """Test one snapshot per second for ten seconds."""
        cfg = ObservationConfig()
        assert cfg.interval_t == 1.0
        assert cfg.period_p == 10

    def test_seconds_after_click(self):
        """Test step 1 is the click itself."""
        cfg = ObservationConfig(interval_t=2.0, period_p=5)
        assert cfg.seconds_after_click(1) == 0.0
        assert cfg.seconds_after_click(4) == 6.0

    @pytest.mark.parametrize(("interval", "period"), [(0.0, 10), (1.0, 0), (-1.0, 3)])
    def test_rejects_invalid(self, interval, period):
        """Test non-positive interval or period is rejected."""
        with pytest.raises(ValidationError):
            ObservationConfig(interval_t=interval, period_p=period)


class TestSnapshot:
    """Test Snapshot and UrlTrace models."""

    def test_attribute_count(self):
        """Test a well-formed snapshot has 78 attributes."""
        assert make_snapshot().attribute_count == SNAPSHOT_ATTRIBUTES

    def test_without_label(self):
        """Test the inference view drops the label only."""
        snapshot = make_snapshot(label=Label.MALICIOUS)
        stripped = snapshot.without_label()
        assert stripped.label is None
        assert stripped.machine == snapshot.machine
        assert snapshot.label is Label.MALICIOUS

    def test_missing_fields_reported(self):
        """Test missing and unexpected fields are listed, not rejected."""
        snapshot = make_snapshot(machine={"not_a_field": 1.0})
        values = dict(snapshot.machine.values)
        del values["cpu_percent"]
        broken = snapshot.machine.model_copy(update={"values": values})
        assert broken.missing_fields() == ["cpu_percent"]
        assert broken.unexpected_fields() == ["not_a_field"]

    def test_step_lookup(self):
        """Test UrlTrace.step finds a snapshot or raises KeyError."""
        trace = make_trace(period=3)
        assert trace.step(2).time_step == 2
        with pytest.raises(KeyError):
            trace.step(4)

    def test_time_step_is_one_based(self):
        """Test step 0 is rejected."""
        with pytest.raises(ValidationError):
            make_snapshot(step=0)

    def test_json_roundtrip(self):
        """Test a trace survives JSON serialization."""
        trace = make_trace("t-1", Label.MALICIOUS, onset=2, period=4)
        assert type(trace).model_validate_json(trace.model_dump_json()) == trace


class TestExclusionRules:
    """Test rule matching."""

    def test_rule_matches_kind_and_pattern(self):
        """Test a rule needs both the kind and the target pattern."""
        rule = ExclusionRule(kind=EventKind.FILE_WRITE, pattern="C:\\Temp\\*.exe")
        hit = LowLevelEvent(time_step=1, kind=EventKind.FILE_WRITE, target="C:\\Temp\\a.exe")
        other_kind = hit.model_copy(update={"kind": EventKind.PROCESS_CREATE})
        other_target = hit.model_copy(update={"target": "C:\\Temp\\a.txt"})
        assert rule.matches(hit)
        assert not rule.matches(other_kind)
        assert not rule.matches(other_target)

    def test_empty_rule_set_rejected(self):
        """Test a rule set needs at least one rule."""
        with pytest.raises(ValidationError):
            ExclusionRuleSet(version=1, rules=())


class TestClassDistribution:
    """Test the argmax tie rule."""

    def test_tie_resolves_benign(self):
        """Test an exact tie predicts benign."""
        assert ClassDistribution(p_malicious=HALF, p_benign=HALF).label is Label.BENIGN

    def test_malicious_argmax(self):
        """Test a larger malicious probability predicts malicious."""
        assert ClassDistribution(p_malicious=0.7, p_benign=0.3).label is Label.MALICIOUS


class TestConfigModels:
    """Test configuration validators."""

    def test_vote_needs_two_members(self):
        """Test a one-member vote is rejected."""
        with pytest.raises(ValidationError):
            TrainConfig(
                algo=ModelKind.VOTE, upto_step=1, vote_members=(ModelKind.NAIVE_BAYES,)
            )

    def test_vote_members_cannot_vote(self):
        """Test nested votes are rejected."""
        with pytest.raises(ValidationError):
            TrainConfig(
                algo=ModelKind.VOTE,
                upto_step=1,
                vote_members=(ModelKind.NAIVE_BAYES, ModelKind.VOTE),
            )

    def test_with_step_and_meta(self):
        """Test copies change one knob only."""
        config = TrainConfig(algo=ModelKind.DECISION_TREE, upto_step=1, seed=7)
        moved = config.with_step(4).with_tweet_meta(include=False)
        assert moved.upto_step == 4
        assert moved.include_tweet_meta is False
        assert moved.seed == 7
        assert config.upto_step == 1

    def test_hidden_layers_positive(self):
        """Test zero-sized hidden layers are rejected."""
        with pytest.raises(ValidationError):
            MlpParams(hidden_layout=(4, 0))

    def test_config_is_frozen(self):
        """Test configuration objects are immutable."""
        config = TrainConfig(algo=ModelKind.MLP, upto_step=2)
        with pytest.raises(ValidationError):
            config.upto_step = 3

    def test_cycle_defaults(self):
        """Test the default cycle ingests 400 traces."""
        cycle = CycleConfig()
        assert cycle.n_new_traces == 400
        assert cycle.eval_profiles is None


class TestReports:
    """Test report helpers."""

    def test_confusion_addition(self):
        """Test pooled confusion counts add cell by cell."""
        total = ConfusionCounts(tp=1, fp=2, tn=3, fn=4) + ConfusionCounts(tp=1, tn=1)
        assert total == ConfusionCounts(tp=2, fp=2, tn=4, fn=4)
        assert total.total == 12

    def test_row_lookup_and_curve(self):
        """Test EvalReport.row and f_curve order by step."""
        rows = tuple(
            MetricRow(algorithm="j48", upto_step=s, precision=f, recall=f, f_measure=f)
            for s, f in ((2, 0.8), (1, 0.6))
        )
        report = EvalReport(experiment="sweep", rows=rows)
        assert report.row("j48", 2).f_measure == 0.8
        assert report.f_curve("j48") == [0.6, 0.8]
        with pytest.raises(KeyError):
            report.row("nb", 1)
