"""
Unit tests for features/extraction.py and features/ranking.py.

Tests windows, schema building, encoding and the Pearson ranking.
"""

import numpy as np
import pytest

from driveby_sentinel.errors import (
    ConfigError,
    InsufficientDataError,
    LeakageError,
    SchemaMismatchError,
    SingleClassError,
)
from driveby_sentinel.features.extraction import (
    RESERVED_CODE,
    UNLABELED,
    FeatureKind,
    FeatureMatrix,
    build_schema,
    cumulative_window,
    encode,
    encode_table,
    frequency_bin,
    tabulate,
)
from driveby_sentinel.features.ranking import pearson_rank
from driveby_sentinel.models.schema import MACHINE_FIELD_COUNT, TWEET_FIELD_COUNT
from driveby_sentinel.models.types import Label
from tests.fixtures.toy_data import (
    BUSY_CPU,
    make_snapshot,
    make_trace,
    toy_config,
    toy_traces,
)

FULL_DIMENSION = MACHINE_FIELD_COUNT + TWEET_FIELD_COUNT
PERIOD = 5


@pytest.fixture
def traces():
    """Four benign and two malicious toy traces of five steps."""
    return toy_traces(4, 2, period=PERIOD)


@pytest.fixture
def table(traces):
    """Tabulated toy traces."""
    return tabulate(traces)


class TestCumulativeWindow:
    """Test cumulative_window."""

    def test_prefix(self):
        """Test the window holds steps 1..k in order."""
        trace = make_trace(period=PERIOD)
        window = cumulative_window(trace, 3, toy_config(PERIOD))
        assert [s.time_step for s in window] == [1, 2, 3]

    def test_full_window(self):
        """Test upto_step = period gives the whole trace."""
        trace = make_trace(period=PERIOD)
        assert len(cumulative_window(trace, PERIOD, toy_config(PERIOD))) == PERIOD

    @pytest.mark.parametrize("step", [0, PERIOD + 1])
    def test_out_of_range(self, step):
        """Test steps outside [1, period] are rejected."""
        with pytest.raises(ConfigError):
            cumulative_window(make_trace(period=PERIOD), step, toy_config(PERIOD))


class TestTabulate:
    """Test the columnar table."""

    def test_shape_and_labels(self, table):
        """Test one row per snapshot with the trace's truth as label."""
        assert len(table) == 6 * PERIOD
        assert set(table.labels.tolist()) == {0, 1}
        assert table.trace_labels()[1].tolist() == [0, 0, 0, 0, 1, 1]

    def test_window_selects_steps(self, table):
        """Test window keeps rows with step <= k."""
        windowed = table.window(2)
        assert len(windowed) == 6 * 2
        assert windowed.steps.max() == 2

    def test_bare_snapshots_keep_label(self):
        """Test unlabeled snapshots tabulate as UNLABELED."""
        rows = tabulate([make_snapshot(), make_snapshot(label=Label.MALICIOUS)])
        assert rows.labels.tolist() == [UNLABELED, 1]

    def test_missing_field_rejected(self):
        """Test a snapshot lacking a catalogue field cannot be tabulated."""
        snapshot = make_snapshot()
        values = dict(snapshot.machine.values)
        del values["cpu_percent"]
        broken = snapshot.model_copy(
            update={"machine": snapshot.machine.model_copy(update={"values": values})}
        )
        with pytest.raises(SchemaMismatchError):
            tabulate([broken])

    def test_unknown_field_rejected(self):
        """Test an extra field is a schema mismatch."""
        with pytest.raises(SchemaMismatchError):
            tabulate([make_snapshot(machine={"gpu_percent": 3.0})])


class TestBuildSchema:
    """Test schema building."""

    def test_dimension_with_and_without_tweets(self, table):
        """Test 78 features with tweet metadata and 54 without."""
        assert build_schema(table).dimension == FULL_DIMENSION
        assert build_schema(table, include_tweet_meta=False).dimension == MACHINE_FIELD_COUNT

    def test_codes_start_after_reserved(self, table):
        """Test category codes are 1-based so 0 stays reserved."""
        schema = build_schema(table)
        codes = schema.category_codes["process_name"]
        assert codes == {"process_name-a": 1}
        assert RESERVED_CODE not in codes.values()

    def test_fingerprint_is_stable(self, table):
        """Test the same rows give the same fingerprint."""
        assert build_schema(table).fingerprint == build_schema(table).fingerprint
        assert build_schema(table).fingerprint != build_schema(
            table, include_tweet_meta=False
        ).fingerprint

    def test_empty_table(self, table):
        """Test an empty table cannot shape a schema."""
        with pytest.raises(InsufficientDataError):
            build_schema(table.select(np.zeros(len(table), dtype=bool)))

    def test_excluded_traces_leak(self, table):
        """Test rows of excluded traces are refused."""
        with pytest.raises(LeakageError):
            build_schema(table, exclude_trace_ids={"toy-000"})

    def test_source_count(self, table):
        """Test the schema records how many traces shaped it."""
        assert build_schema(table).source_trace_count == 6


class TestEncode:
    """Test encoding."""

    def test_unseen_category_maps_to_reserved(self, table):
        """Test a value never seen in training encodes as 0."""
        schema = build_schema(table)
        vector = encode(make_snapshot(machine={"process_name": "never-seen"}), schema)
        assert vector.values[schema.index("process_name")] == RESERVED_CODE

    def test_absent_numeric_takes_median(self, table):
        """Test None in a numeric field encodes as the training median."""
        schema = build_schema(table)
        vector = encode(make_snapshot(machine={"cpu_percent": None}), schema)
        assert vector.values[schema.index("cpu_percent")] == schema.numeric_fill["cpu_percent"]

    def test_single_matches_table(self, traces, table):
        """Test encode and encode_table agree row by row."""
        schema = build_schema(table)
        matrix = encode_table(table, schema)
        ordered = [s for t in traces for s in sorted(t.snapshots, key=lambda s: s.time_step)]
        for i, snapshot in enumerate(ordered):
            assert encode(snapshot, schema).values == tuple(matrix.X[i])

    def test_encoding_is_pure(self, table):
        """Test the same snapshot encodes identically twice."""
        schema = build_schema(table)
        snapshot = make_snapshot(machine={"cpu_percent": BUSY_CPU})
        assert encode(snapshot, schema) == encode(snapshot, schema)

    def test_fingerprint_carried(self, table):
        """Test vectors name the schema they were encoded with."""
        schema = build_schema(table)
        assert encode(make_snapshot(), schema).fingerprint == schema.fingerprint

    def test_frequency_bins(self):
        """Test log2 frequency bins capped at n_bins."""
        assert frequency_bin(0, 8) == 0
        assert frequency_bin(1, 8) == 1
        assert frequency_bin(3, 8) == 2
        assert frequency_bin(4, 8) == 3
        assert frequency_bin(10_000, 8) == 8

    def test_identifier_encodes_frequency(self, table):
        """Test identifier fields encode the frequency bin of their value."""
        schema = build_schema(table)
        position = schema.index("user_id")
        assert schema.features[position].kind is FeatureKind.CATEGORICAL
        vector = encode(make_snapshot(), schema)
        assert vector.values[position] == frequency_bin(len(table), schema.n_bins)

    def test_from_arrays(self):
        """Test ad-hoc matrices carry categorical code counts."""
        matrix = FeatureMatrix.from_arrays([[0, 1.5], [1, 2.5]], [0, 1], categorical={0: 2})
        assert matrix.schema.names == ("x0", "x1")
        assert matrix.schema.categorical_mask.tolist() == [True, False]
        assert matrix.schema.n_codes.tolist() == [2, 0]


class TestPearsonRank:
    """Test the correlation ranking."""

    def test_signal_feature_ranks_first(self, table):
        """Test cpu_percent separates the toy classes perfectly."""
        matrix = encode_table(table, build_schema(table))
        ranking = pearson_rank(matrix)
        assert ranking[0].name == "cpu_percent"
        assert ranking[0].r == pytest.approx(1.0)

    def test_constant_features_score_zero(self, table):
        """Test features without variance get r = 0."""
        ranking = {c.name: c for c in pearson_rank(encode_table(table, build_schema(table)))}
        assert ranking["process_name"].r == 0.0

    def test_matches_numpy(self):
        """Test r agrees with numpy's correlation coefficient."""
        rng = np.random.default_rng(0)
        X = rng.normal(size=(50, 3))
        y = (X[:, 1] + 0.5 * rng.normal(size=50) > 0).astype(int)
        ranking = {c.name: c.r for c in pearson_rank(FeatureMatrix.from_arrays(X, y))}
        for j in range(3):
            assert ranking[f"x{j}"] == pytest.approx(np.corrcoef(X[:, j], y)[0, 1])

    def test_single_class(self):
        """Test ranking one class is refused."""
        with pytest.raises(SingleClassError):
            pearson_rank(FeatureMatrix.from_arrays([[1.0], [2.0]], [0, 0]))

    def test_too_few_samples(self):
        """Test a single sample is refused."""
        with pytest.raises(InsufficientDataError):
            pearson_rank(FeatureMatrix.from_arrays([[1.0]], [1]))
