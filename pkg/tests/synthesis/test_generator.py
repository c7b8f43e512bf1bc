"""
Test the seeded trace generator and behavior profiles.
"""

import json

import pytest

from driveby_sentinel.core.validation import validate_trace
from driveby_sentinel.errors import ConfigError, DataError
from driveby_sentinel.models.types import Label, ObservationConfig
from driveby_sentinel.synthesis.generator import blend_tweet_profiles, generate_dataset
from driveby_sentinel.synthesis.oracle import (
    advance_rule_generation,
    default_rules,
    label_trace,
)
from driveby_sentinel.synthesis.profiles import load_profiles

SEED = 42
N_TRACES = 40
FRACTION = 0.25
EXPECTED_MALICIOUS = 10
STEALTH = "stealth-dropper"


@pytest.fixture(scope="module")
def profiles():
    """Packaged default profiles."""
    return load_profiles()


@pytest.fixture(scope="module")
def dataset(profiles):
    """A small generation-1 dataset."""
    return generate_dataset(N_TRACES, FRACTION, profiles, ObservationConfig(), SEED)


class TestProfiles:
    """Test profile loading."""

    def test_defaults_load(self, profiles):
        """Test the packaged file carries kits of two generations."""
        generations = {p.introduced_in for p in profiles.malicious}
        assert generations == {1, 2}
        assert {e.tag for e in profiles.events} >= {"euro2016-like", "rio2016-like"}

    def test_generation_filter(self, profiles):
        """Test the stealth kit is only active from generation 2."""
        gen1 = {p.name for p in profiles.malicious_for_generation(1)}
        gen2 = {p.name for p in profiles.malicious_for_generation(2)}
        assert STEALTH not in gen1
        assert STEALTH in gen2

    def test_unknown_profile(self, profiles):
        """Test asking for an unknown kit is a configuration error."""
        with pytest.raises(ConfigError):
            profiles.profile("no-such-kit")

    def test_missing_file(self, tmp_path):
        """Test a missing profile file is a data error."""
        with pytest.raises(DataError):
            load_profiles(tmp_path / "absent.json")

    def test_invalid_file(self, tmp_path, profiles):
        """Test a profile file with a benign kit in the malicious slot is rejected."""
        data = json.loads(profiles.model_dump_json())
        data["malicious"][0]["label"] = "benign"
        path = tmp_path / "profiles.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(ConfigError):
            load_profiles(path)

    def test_blend_zero_separation(self, profiles):
        """Test separation 0 gives malicious posts the benign distribution."""
        blended = blend_tweet_profiles(profiles.tweets.benign, profiles.tweets.malicious, 0.0)
        assert blended == profiles.tweets.benign


class TestGenerateDataset:
    """Test generate_dataset."""

    def test_exact_class_counts(self, dataset):
        """Test round(n * fraction) traces are malicious."""
        assert len(dataset.traces) == N_TRACES
        assert dataset.n_malicious == EXPECTED_MALICIOUS
        assert dataset.request.n_malicious == EXPECTED_MALICIOUS

    def test_traces_are_valid(self, dataset):
        """Test every trace passes validation."""
        cfg = ObservationConfig()
        assert all(validate_trace(t, cfg).ok for t in dataset.traces)

    def test_labels_agree_with_oracle(self, dataset):
        """Test truth equals the oracle applied to the trace's events."""
        for trace in dataset.traces:
            assert label_trace(trace.events, dataset.rules) is trace.truth
            assert trace.label_generation == dataset.rules.version

    def test_onsets(self, dataset):
        """Test malicious traces carry an onset in the period, benign ones none."""
        for trace in dataset.traces:
            if trace.truth is Label.MALICIOUS:
                assert 1 <= trace.onset_step <= ObservationConfig().period_p
            else:
                assert trace.onset_step is None

    def test_trace_ids(self, dataset):
        """Test ids are the event tag plus a zero-padded index."""
        assert dataset.traces[0].trace_id == "euro2016-like-000000"
        assert len({t.trace_id for t in dataset.traces}) == N_TRACES

    def test_deterministic(self, profiles, dataset):
        """Test the same arguments reproduce the dataset exactly."""
        again = generate_dataset(N_TRACES, FRACTION, profiles, ObservationConfig(), SEED)
        assert again.model_dump_json() == dataset.model_dump_json()

    def test_seed_changes_output(self, profiles, dataset):
        """Test another seed gives other traces."""
        other = generate_dataset(N_TRACES, FRACTION, profiles, ObservationConfig(), SEED + 1)
        assert other.traces != dataset.traces

    def test_zero_early_signal(self, profiles, dataset):
        """Test strength 0 leaves benign traces alone and pre-onset behavior benign-shaped."""
        quiet = generate_dataset(
            N_TRACES, FRACTION, profiles, ObservationConfig(), SEED, early_signal_strength=0.0
        )
        assert quiet.request.early_signal_strength == 0.0
        pools = {k: v for k, v in profiles.pools.benign.items() if k != "remote_ip"}
        assert pools
        changed = 0
        for plain, silent in zip(dataset.traces, quiet.traces, strict=True):
            if plain.truth is Label.BENIGN:
                assert silent == plain
                continue
            assert silent.onset_step == plain.onset_step
            for snapshot in silent.snapshots[: silent.onset_step - 1]:
                for name, pool in pools.items():
                    assert snapshot.machine.values[name] in pool, name
            changed += silent.snapshots[0].machine != plain.snapshots[0].machine
        assert changed == EXPECTED_MALICIOUS

    def test_start_index(self, profiles):
        """Test start_index shifts trace ids."""
        data = generate_dataset(
            3, 0.0, profiles, ObservationConfig(), SEED, event_tag="rio2016-like", start_index=7
        )
        assert [t.trace_id for t in data.traces] == [
            "rio2016-like-000007",
            "rio2016-like-000008",
            "rio2016-like-000009",
        ]

    def test_all_benign_and_all_malicious(self, profiles):
        """Test fractions 0 and 1."""
        cfg = ObservationConfig()
        assert generate_dataset(5, 0.0, profiles, cfg, SEED).n_malicious == 0
        assert generate_dataset(5, 1.0, profiles, cfg, SEED).n_malicious == 5

    def test_shorter_period(self, profiles):
        """Test the generator follows the observation period."""
        cfg = ObservationConfig(interval_t=0.5, period_p=4)
        data = generate_dataset(6, 0.5, profiles, cfg, SEED)
        assert all(len(t.snapshots) == cfg.period_p for t in data.traces)
        assert all(validate_trace(t, cfg).ok for t in data.traces)

    def test_stealth_kit_needs_generation_two(self, profiles):
        """Test the stealth kit is refused under generation-1 rules."""
        with pytest.raises(ConfigError):
            generate_dataset(
                4, 0.5, profiles, ObservationConfig(), SEED, profile_names=(STEALTH,)
            )

    def test_generation_two_rules(self, profiles):
        """Test the stealth kit under advanced rules labels through the new rules."""
        rules = advance_rule_generation(default_rules(), SEED)
        data = generate_dataset(
            8, 0.5, profiles, ObservationConfig(), SEED, rules=rules, profile_names=(STEALTH,)
        )
        assert data.n_malicious == 4
        assert all(t.label_generation == 2 for t in data.traces)

    @pytest.mark.parametrize(
        ("n", "fraction", "seed"), [(0, 0.1, 1), (5, 1.5, 1), (5, 0.1, -1)]
    )
    def test_invalid_arguments(self, profiles, n, fraction, seed):
        """Test invalid sizes, fractions and seeds are configuration errors."""
        with pytest.raises(ConfigError):
            generate_dataset(n, fraction, profiles, ObservationConfig(), seed)

    def test_unknown_event_tag(self, profiles):
        """Test an unknown event tag is a configuration error."""
        with pytest.raises(ConfigError):
            generate_dataset(2, 0.5, profiles, ObservationConfig(), SEED, event_tag="nope")
