"""
Test snapshot sources and the source factory.
"""

import io

import pytest

from driveby_sentinel.errors import DataError, SchemaMismatchError, StoreError
from driveby_sentinel.sources.factory import create_snapshot_source
from driveby_sentinel.sources.interfaces import RecordingStream
from driveby_sentinel.sources.replay import STDIN, DatasetSource, JsonlSnapshotSource
from driveby_sentinel.store.snapshot_store import MANIFEST_FILE, SNAPSHOTS_FILE, write_dataset
from tests.fixtures.toy_data import make_trace, toy_config, toy_traces

PERIOD = 4


@pytest.fixture
def stored(tmp_path):
    """A dataset of two benign and one malicious trace."""
    traces = toy_traces(2, 1, period=PERIOD)
    return write_dataset(
        tmp_path / "ds", traces, dataset_id="ds", observation=toy_config(PERIOD)
    )


def _lines(*traces):
    return "".join(s.model_dump_json() + "\n" for t in traces for s in t.snapshots)


class TestDatasetSource:
    """Test replaying a stored dataset."""

    def test_replays_every_trace_in_step_order(self, stored):
        """Test one stream per trace with steps 1..period."""
        source = DatasetSource(stored)
        streams = {tid: [s.time_step for s in it] for tid, it in source.traces()}
        assert sorted(streams) == ["toy-000", "toy-001", "toy-002"]
        assert all(steps == list(range(1, PERIOD + 1)) for steps in streams.values())

    def test_labels_are_hidden(self, stored):
        """Test replayed snapshots carry no label."""
        for _, stream in DatasetSource(stored).traces():
            assert all(s.label is None for s in stream)

    def test_name(self, stored):
        """Test the log name mentions the dataset."""
        assert DatasetSource(stored).name == "dataset ds"


class TestJsonlSource:
    """Test reading snapshot lines."""

    def test_groups_consecutive_lines(self):
        """Test consecutive lines of one trace form one stream."""
        text = _lines(make_trace("a", period=3), make_trace("b", period=2))
        source = JsonlSnapshotSource(stream=io.StringIO(text))
        streams = [(tid, [s.time_step for s in it]) for tid, it in source.traces()]
        assert streams == [("a", [1, 2, 3]), ("b", [1, 2])]

    def test_blank_lines_skipped(self):
        """Test empty lines between records are ignored."""
        text = "\n" + _lines(make_trace("a", period=2)) + "\n\n"
        source = JsonlSnapshotSource(stream=io.StringIO(text))
        assert [tid for tid, _ in source.traces()] == ["a"]

    def test_store_file_can_be_piped(self, stored):
        """Test the header line of a store snapshot file is skipped."""
        source = JsonlSnapshotSource(stored.root / SNAPSHOTS_FILE)
        ids = [tid for tid, stream in source.traces() if list(stream)]
        assert ids == ["toy-000", "toy-001", "toy-002"]

    def test_bad_line(self):
        """Test a malformed record names its line."""
        text = _lines(make_trace("a", period=1)) + '{"trace_id": "b"}\n'
        source = JsonlSnapshotSource(stream=io.StringIO(text))
        with pytest.raises(SchemaMismatchError, match=":2:"):
            for _, stream in source.traces():
                list(stream)

    def test_missing_file(self, tmp_path):
        """Test a missing file is a data error on first read."""
        source = JsonlSnapshotSource(tmp_path / "absent.jsonl")
        with pytest.raises(DataError):
            list(source.traces())

    def test_names(self, tmp_path):
        """Test stdin and file names."""
        assert JsonlSnapshotSource().name == "stdin"
        assert JsonlSnapshotSource(tmp_path / "x.jsonl").name == str(tmp_path / "x.jsonl")


class TestFactory:
    """Test source selection from a path."""

    def test_stdin(self):
        """Test "-" reads stdin."""
        source = create_snapshot_source(STDIN)
        assert isinstance(source, JsonlSnapshotSource)
        assert source.name == "stdin"

    def test_dataset_directory(self, stored):
        """Test a directory with a manifest replays the dataset."""
        assert isinstance(create_snapshot_source(stored.root), DatasetSource)

    def test_directory_without_manifest(self, tmp_path):
        """Test a plain directory is refused."""
        with pytest.raises(DataError):
            create_snapshot_source(tmp_path)

    def test_broken_manifest(self, tmp_path):
        """Test an unreadable manifest is a store error."""
        (tmp_path / MANIFEST_FILE).write_text("{", encoding="utf-8")
        with pytest.raises(StoreError):
            create_snapshot_source(tmp_path)

    def test_missing_path(self, tmp_path):
        """Test a path that does not exist is refused."""
        with pytest.raises(DataError):
            create_snapshot_source(tmp_path / "nothing")

    def test_file(self, tmp_path):
        """Test any other file is read as snapshot lines."""
        path = tmp_path / "snaps.jsonl"
        path.write_text(_lines(make_trace("a", period=1)), encoding="utf-8")
        assert isinstance(create_snapshot_source(path), JsonlSnapshotSource)


class TestRecordingStream:
    """Test the step-recording wrapper."""

    def test_records_only_what_was_pulled(self):
        """Test steps are recorded as they are consumed."""
        stream = RecordingStream(list(make_trace("a", period=5).snapshots))
        assert stream.last_step is None
        next(stream)
        next(stream)
        assert stream.steps_read == [1, 2]
        assert stream.last_step == 2
