"""
Test the command-line interface: subcommands, run files and exit codes.
"""

import json
import shutil

import pytest

from driveby_sentinel.classifiers.serialization import load_model
from driveby_sentinel.interfaces.cli import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_OK,
    RUN_CONFIG_FILE,
    RUN_MANIFEST_FILE,
    main,
)
from driveby_sentinel.models.config import ModelKind
from driveby_sentinel.store.snapshot_store import (
    MANIFEST_FILE,
    SNAPSHOTS_FILE,
    load_traces,
    open_dataset,
)

N = 40
FRACTION = 0.25
PERIOD = 4


def _generate(out_dir, *, n=N, tag="euro2016-like", seed=1):
    return main(
        [
            "generate",
            "--n", str(n),
            "--fraction", str(FRACTION),
            "--seed", str(seed),
            "--period", str(PERIOD),
            "--event-tag", tag,
            "--out-dir", str(out_dir),
        ]
    )


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Generated in-event and unseen datasets plus a step-2 tree."""
    root = tmp_path_factory.mktemp("cli")
    assert _generate(root / "euro") == EXIT_OK
    assert _generate(root / "rio", n=30, tag="rio2016-like", seed=2) == EXIT_OK
    code = main(
        [
            "train",
            "--dataset", str(root / "euro"),
            "--algo", "j48",
            "--upto-step", "2",
            "--out", str(root / "models" / "j48.json"),
        ]
    )
    assert code == EXIT_OK
    return root


class TestUsage:
    """Test argument handling."""

    def test_no_command(self, capsys):
        """Test a bare invocation prints help and exits with the usage code."""
        assert main([]) == EXIT_CONFIG
        assert "generate" in capsys.readouterr().err

    def test_help(self):
        """Test --help exits cleanly."""
        assert main(["--help"]) == EXIT_OK

    def test_bad_flag_value(self):
        """Test argparse rejections are usage errors."""
        assert main(["generate", "--n", "many", "--out-dir", "x"]) == EXIT_CONFIG

    def test_rejected_config_value(self, tmp_path):
        """Test a value refused by a config model is a configuration error."""
        code = main(["generate", "--n", "10", "--period", "0", "--out-dir", str(tmp_path / "d")])
        assert code == EXIT_CONFIG


class TestGenerateAndStore:
    """Test dataset creation and store commands."""

    def test_generate_writes_dataset_and_run_files(self, workspace):
        """Test the dataset, rules and run echo files."""
        euro = workspace / "euro"
        handle = open_dataset(euro)
        assert handle.counts.total == N
        assert handle.counts.malicious == int(N * FRACTION)
        assert handle.observation.period_p == PERIOD
        config = json.loads((euro / RUN_CONFIG_FILE).read_text(encoding="utf-8"))
        assert config["subcommand"] == "generate"
        assert config["seed"] == 1
        manifest = json.loads((euro / RUN_MANIFEST_FILE).read_text(encoding="utf-8"))
        assert manifest["artifacts"] == sorted([MANIFEST_FILE, "rules.json", RUN_CONFIG_FILE])

    def test_generate_prints_stats(self, tmp_path, capsys):
        """Test stdout carries the dataset statistics as JSON."""
        assert _generate(tmp_path / "d", n=20) == EXIT_OK
        stats = json.loads(capsys.readouterr().out)
        assert stats["trace_counts"] == {"malicious": 5, "benign": 15}
        assert stats["snapshot_count"] == 20 * PERIOD

    def test_generate_into_existing_dataset(self, workspace):
        """Test an existing dataset directory is a data error."""
        assert _generate(workspace / "euro") == EXIT_DATA

    def test_stats_with_ranking(self, workspace, capsys):
        """Test the Pearson ranking is printed after the statistics."""
        code = main(["store", "stats", "--dataset", str(workspace / "euro"), "--rank", "5"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "Top 5 features" in out
        assert len([line for line in out.splitlines() if line.startswith(("  1", "  5"))]) == 2

    def test_sample(self, workspace, tmp_path):
        """Test a materialized half sample."""
        out = tmp_path / "half"
        code = main(
            ["store", "sample", "--dataset", str(workspace / "euro"), "--fraction", "0.5",
             "--out", str(out)]
        )
        assert code == EXIT_OK
        assert open_dataset(out).counts.total == N // 2

    def test_split(self, workspace, tmp_path, capsys):
        """Test nested fractions each become a dataset."""
        code = main(
            ["store", "split", "--dataset", str(workspace / "euro"), "--fractions", "0.5,1",
             "--out-dir", str(tmp_path)]
        )
        assert code == EXIT_OK
        assert open_dataset(tmp_path / "split-0.5").counts.total == N // 2
        assert open_dataset(tmp_path / "split-1").counts.total == N
        assert len(capsys.readouterr().out.splitlines()) == 2

    def test_import(self, workspace, tmp_path):
        """Test trace lines exported from one store import into another."""
        traces = tmp_path / "traces.jsonl"
        source = open_dataset(workspace / "euro")
        traces.write_text(
            "".join(t.model_dump_json() + "\n" for t in load_traces(source)), encoding="utf-8"
        )
        code = main(
            ["store", "import", "--in", str(traces), "--out", str(tmp_path / "copy"),
             "--dataset-id", "copy", "--period", str(PERIOD)]
        )
        assert code == EXIT_OK
        assert open_dataset(tmp_path / "copy").counts == source.counts

    def test_missing_dataset(self, tmp_path):
        """Test a missing dataset is a data error."""
        assert main(["store", "stats", "--dataset", str(tmp_path / "none")]) == EXIT_DATA


class TestTrainAndEval:
    """Test training and evaluation protocols."""

    def test_model_file(self, workspace):
        """Test the model records its configuration and data."""
        model = load_model(workspace / "models" / "j48.json")
        assert model.kind is ModelKind.DECISION_TREE
        assert model.provenance.config.upto_step == 2
        assert model.provenance.label_generation == 1
        assert (workspace / "models" / RUN_CONFIG_FILE).is_file()

    def test_unknown_algorithm(self, workspace, tmp_path):
        """Test an unknown algorithm is a configuration error."""
        code = main(
            ["train", "--dataset", str(workspace / "euro"), "--algo", "svm",
             "--out", str(tmp_path / "m.json")]
        )
        assert code == EXIT_CONFIG

    def test_eval_needs_model(self, workspace):
        """Test evaluation without a model is a data error."""
        assert main(["eval", "sweep", "--dataset", str(workspace / "euro")]) == EXIT_DATA

    def test_sweep(self, workspace, tmp_path, capsys):
        """Test the sweep table, JSON report and plot CSV."""
        out = tmp_path / "sweep.json"
        csv = tmp_path / "sweep.csv"
        code = main(
            ["eval", "sweep", "--dataset", str(workspace / "euro"),
             "--model", str(workspace / "models" / "j48.json"), "--folds", "3",
             "--steps", "1,2", "--out", str(out), "--csv", str(csv)]
        )
        assert code == EXIT_OK
        assert "Time sweep (3-fold CV)" in capsys.readouterr().out
        report = json.loads(out.read_text(encoding="utf-8"))
        assert [r["upto_step"] for r in report["rows"]] == [1, 2]
        assert len(csv.read_text(encoding="utf-8").splitlines()) == 3
        manifest = json.loads((tmp_path / RUN_MANIFEST_FILE).read_text(encoding="utf-8"))
        assert "sweep.json" in manifest["artifacts"]

    def test_ablate(self, workspace, tmp_path):
        """Test both ablation arms reach the report."""
        out = tmp_path / "ablation.json"
        code = main(
            ["eval", "ablate", "--dataset", str(workspace / "euro"),
             "--model", str(workspace / "models" / "j48.json"), "--folds", "3",
             "--steps", "1", "--out", str(out)]
        )
        assert code == EXIT_OK
        report = json.loads(out.read_text(encoding="utf-8"))
        assert len(report["deltas"]) == 1

    def test_cross_event(self, workspace, capsys):
        """Test training on one event and scoring the other."""
        code = main(
            ["eval", "cross-event", "--train", str(workspace / "euro"),
             "--test", str(workspace / "rio"), "--model", str(workspace / "models" / "j48.json"),
             "--steps", "1,4"]
        )
        assert code == EXIT_OK
        assert "Cross-event" in capsys.readouterr().out

    def test_cross_event_same_dataset(self, workspace):
        """Test scoring the training set is refused as leakage."""
        code = main(
            ["eval", "cross-event", "--train", str(workspace / "euro"),
             "--test", str(workspace / "euro"), "--model", str(workspace / "models" / "j48.json")]
        )
        assert code == EXIT_DATA

    def test_growth(self, workspace, tmp_path):
        """Test the growth CSV has one line per fraction."""
        csv = tmp_path / "growth.csv"
        code = main(
            ["eval", "growth", "--dataset", str(workspace / "euro"),
             "--unseen", str(workspace / "rio"), "--model", str(workspace / "models" / "j48.json"),
             "--fractions", "0.5,1", "--folds", "3", "--csv", str(csv)]
        )
        assert code == EXIT_OK
        assert len(csv.read_text(encoding="utf-8").splitlines()) == 3

    def test_holdout(self, workspace, capsys):
        """Test the hold-out table."""
        code = main(
            ["eval", "holdout", "--dataset", str(workspace / "euro"),
             "--model", str(workspace / "models" / "j48.json"), "--test-fraction", "0.25"]
        )
        assert code == EXIT_OK
        assert "Hold-out (0.25)" in capsys.readouterr().out


class TestSentinel:
    """Test the sentinel subcommands."""

    def test_run_on_dataset(self, workspace, capsys):
        """Test one verdict line per replayed trace."""
        code = main(
            ["sentinel", "run", "--model", str(workspace / "models" / "j48.json"),
             "--in", str(workspace / "rio")]
        )
        assert code == EXIT_OK
        records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
        assert len(records) == 30
        assert {r["decision"] for r in records} <= {"killed_malicious", "completed_benign"}
        assert all(1 <= r["decision_step"] <= PERIOD for r in records)

    def test_run_on_snapshot_file(self, workspace, tmp_path):
        """Test a snapshot line file with a verdict log output."""
        log = tmp_path / "verdicts.jsonl"
        code = main(
            ["sentinel", "run", "--model", str(workspace / "models" / "j48.json"),
             "--in", str(workspace / "rio" / SNAPSHOTS_FILE), "--period", str(PERIOD),
             "--out", str(log)]
        )
        assert code == EXIT_OK
        assert len(log.read_text(encoding="utf-8").splitlines()) == 30
        assert (tmp_path / RUN_MANIFEST_FILE).is_file()

    def test_bad_threshold(self, workspace):
        """Test a threshold outside [0, 1] is a configuration error."""
        code = main(
            ["sentinel", "run", "--model", str(workspace / "models" / "j48.json"),
             "--in", str(workspace / "rio"), "--threshold", "2"]
        )
        assert code == EXIT_CONFIG

    def test_missing_model(self, workspace, tmp_path):
        """Test a missing model file is a data error."""
        code = main(
            ["sentinel", "batch", "--model", str(tmp_path / "none.json"),
             "--dataset", str(workspace / "rio")]
        )
        assert code == EXIT_DATA

    def test_batch(self, workspace, tmp_path, capsys):
        """Test the labeled replay summary and report."""
        out = tmp_path / "batch.json"
        code = main(
            ["sentinel", "batch", "--model", str(workspace / "models" / "j48.json"),
             "--dataset", str(workspace / "rio"), "--out", str(out)]
        )
        assert code == EXIT_OK
        assert "Sentinel batch" in capsys.readouterr().out
        report = json.loads(out.read_text(encoding="utf-8"))
        assert len(report["verdicts"]) == 30

    def test_cycle(self, workspace, tmp_path):
        """Test one retraining cycle writes new rules, model and report."""
        live = tmp_path / "live"
        shutil.copytree(workspace / "euro", live)
        out = tmp_path / "cycle"
        code = main(
            ["sentinel", "cycle", "--dataset", str(live), "--n-new", "10", "--eval-n", "10",
             "--fraction", "0.3", "--algo", "nb", "--upto-step", str(PERIOD),
             "--out-dir", str(out)]
        )
        assert code == EXIT_OK
        assert json.loads((out / "rules.json").read_text(encoding="utf-8"))["version"] == 2
        assert load_model(out / "model.json").provenance.label_generation == 2
        report = json.loads((out / "cycle_report.json").read_text(encoding="utf-8"))
        assert [r["variant"] for r in report["rows"]] == ["before", "after"]
        assert open_dataset(live).counts.total == N + 10
