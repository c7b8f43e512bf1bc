"""
Seeded synthetic trace generator.

Replaces the honeypot's data collection: every trace gets its own random
stream derived from (seed, event tag, trace index), so a dataset is
bit-identical for identical arguments and traces can be produced in any
order. Each trace's label comes from the exclusion-rule oracle over the
low-level events the trace emitted.
"""

from __future__ import annotations

import logging
import math
import zlib
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from driveby_sentinel.core.validation import validate_trace
from driveby_sentinel.errors import ConfigError
from driveby_sentinel.models.schema import (
    MACHINE_FIELDS,
    Channel,
    FieldKind,
)
from driveby_sentinel.models.types import (
    EventKind,
    ExclusionRuleSet,
    Label,
    LowLevelEvent,
    MachineMetrics,
    MetricValue,
    ObservationConfig,
    Snapshot,
    TweetMeta,
    UrlTrace,
)

from .oracle import default_rules, label_trace, target_for_rule
from .profiles import (
    ACTIVITY_CHANNELS,
    BehaviorProfile,
    ProfileSet,
    TweetProfile,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

FIELD_JITTER = 0.1
MAX_BENIGN_EVENTS_PER_STEP = 2
INTEGER_GAUGES = frozenset(
    {"process_id", "process_id_net", "connection_count", "process_num_threads", "process_count"}
)
# Counters driven by the trace's own low-level events rather than a channel.
EVENT_COUNTERS: dict[str, EventKind] = {
    "file_write_count": EventKind.FILE_WRITE,
    "registry_write_count": EventKind.REGISTRY_WRITE,
}
TWEET_TYPES = ("original", "reply", "quote")
TWEET_TYPE_WEIGHTS = (0.7, 0.2, 0.1)


class GenerationRequest(BaseModel):
    """Arguments of one generate_dataset call, recorded as dataset provenance."""

    model_config = ConfigDict(frozen=True)

    n_traces: int = Field(ge=1)
    malicious_fraction: float = Field(ge=0.0, le=1.0)
    seed: int = Field(ge=0)
    event_tag: str
    observation: ObservationConfig
    label_generation: int = Field(ge=1)
    tweet_separation: float = Field(ge=0.0, le=1.0)
    early_signal_strength: float | None = Field(default=None, ge=0.0, le=1.0)
    profile_names: tuple[str, ...] | None = None
    start_index: int = Field(default=0, ge=0)

    @property
    def n_malicious(self) -> int:
        """round(n * fraction), halves rounded up."""
        return math.floor(self.n_traces * self.malicious_fraction + 0.5)


class GeneratedDataset(BaseModel):
    """Traces produced by one request together with the rules that labeled them."""

    model_config = ConfigDict(frozen=True)

    request: GenerationRequest
    rules: ExclusionRuleSet
    traces: tuple[UrlTrace, ...]

    @property
    def n_malicious(self) -> int:
        """Traces labeled malicious."""
        return sum(1 for t in self.traces if t.truth is Label.MALICIOUS)


def _lerp(a: float, b: float, w: float) -> float:
    return a + (b - a) * w


def _blend_weights(a: dict[str, float], b: dict[str, float], w: float) -> dict[str, float]:
    keys = sorted(set(a) | set(b))
    return {k: _lerp(a.get(k, 0.0), b.get(k, 0.0), w) for k in keys}


def blend_tweet_profiles(
    benign: TweetProfile, malicious: TweetProfile, separation: float
) -> TweetProfile:
    """Tweet distribution part-way from benign (0) to fully malicious (1)."""
    if separation == 0.0:
        return benign
    numeric = {
        name: _lerp(getattr(benign, name), getattr(malicious, name), separation)
        for name in (
            "followers_log_mean",
            "followers_log_sigma",
            "friends_log_mean",
            "friends_log_sigma",
            "account_age_log_mean",
            "account_age_log_sigma",
            "favourites_log_mean",
            "retweet_count_log_mean",
            "verified_prob",
            "retweet_prob",
            "coordinates_prob",
            "spreader_prob",
        )
    }
    return TweetProfile(
        **numeric,
        languages=_blend_weights(benign.languages, malicious.languages, separation),
        time_zones=_blend_weights(benign.time_zones, malicious.time_zones, separation),
        locations=_blend_weights(benign.locations, malicious.locations, separation),
    )


def _weighted_choice(rng: np.random.Generator, weights: dict[str, float]) -> str:
    keys = sorted(weights)
    p = np.array([weights[k] for k in keys], dtype=float)
    return keys[int(rng.choice(len(keys), p=p / p.sum()))]


def _c2_address(i: int) -> str:
    return f"185.{17 + i}.{(i * 37) % 256}.{(i * 91 + 5) % 256}"


class _TraceBuilder:
    """Draws one trace from its own random stream."""

    def __init__(
        self,
        profiles: ProfileSet,
        request: GenerationRequest,
        rules: ExclusionRuleSet,
    ) -> None:
        self.profiles = profiles
        self.request = request
        self.rules = rules
        self.period = request.observation.period_p
        self.variant = profiles.event(request.event_tag)
        self.malicious_tweets = blend_tweet_profiles(
            profiles.tweets.benign, profiles.tweets.malicious, request.tweet_separation
        )
        self.kits = profiles.malicious_for_generation(
            request.label_generation, request.profile_names
        )
        weights = np.array([k.weight for k in self.kits], dtype=float)
        self.kit_p = weights / weights.sum()
        self.tag_code = zlib.crc32(request.event_tag.encode("utf-8"))

    def rng_for(self, index: int) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence([self.request.seed, self.tag_code, index])
        )

    def intensity(
        self, profile: BehaviorProfile | None, rng: np.random.Generator
    ) -> tuple[np.ndarray, int | None]:
        steps = np.arange(1, self.period + 1)
        if profile is None or profile.onset is None:
            return np.zeros(self.period), None
        first = min(profile.onset.first, self.period)
        last = min(profile.onset.last, self.period)
        onset = int(rng.integers(first, last + 1))
        strength = (
            self.request.early_signal_strength
            if self.request.early_signal_strength is not None
            else profile.early_signal_strength
        )
        pre = strength * profile.precursor_level
        return np.where(steps >= onset, 1.0, pre), onset

    def levels(
        self,
        profile: BehaviorProfile | None,
        intensity: np.ndarray,
        rng: np.random.Generator,
    ) -> dict[Channel, np.ndarray]:
        curves = self.profiles.curves_for(profile or self.profiles.benign)
        burst = (profile.burst if profile and profile.burst else self.profiles.benign.burst)
        deltas = profile.payload.channel_deltas if profile and profile.payload else {}
        levels: dict[Channel, np.ndarray] = {}
        for channel in ACTIVITY_CHANNELS:
            stats = [curves[channel].at(s) for s in range(1, self.period + 1)]
            mean = np.array([m for m, _ in stats])
            std = np.array([s for _, s in stats])
            level = mean + std * rng.standard_normal(self.period)
            if burst is not None:
                level = level + np.array([burst.at(s) for s in range(1, self.period + 1)])
            level = np.maximum(level, 0.0)
            payload = deltas.get(channel, 0.0) * self.variant.payload_scale
            levels[channel] = level + intensity * payload
        return levels

    def machine_values(
        self,
        levels: dict[Channel, np.ndarray],
        intensity: np.ndarray,
        switch: float,
        events: list[LowLevelEvent],
        rng: np.random.Generator,
    ) -> list[dict[str, MetricValue]]:
        pools = self.profiles.pools
        site_ip = ".".join(str(int(x)) for x in rng.integers(1, 255, size=4))
        columns: dict[str, list[MetricValue]] = {}
        for field_spec in MACHINE_FIELDS:
            name = field_spec.name
            if name in EVENT_COUNTERS:
                kind = EVENT_COUNTERS[name]
                per_step = np.zeros(self.period, dtype=int)
                for event in events:
                    if event.kind is kind:
                        per_step[event.time_step - 1] += 1
                columns[name] = [int(v) for v in np.cumsum(per_step)]
                continue
            if field_spec.channel is Channel.STATIC:
                columns[name] = [float(field_spec.base)] * self.period
                continue
            if field_spec.kind is FieldKind.CATEGORICAL or name in pools.benign:
                to_malicious = rng.random(self.period) < switch * intensity
                if name == "remote_ip":
                    benign_pool: tuple[str | int, ...] = (site_ip,)
                    malicious_pool: tuple[str | int, ...] = tuple(
                        _c2_address(i) for i in range(self.profiles.c2_pool_size)
                    )
                else:
                    benign_pool = pools.benign[name]
                    malicious_pool = pools.malicious[name]
                b_idx = rng.integers(0, len(benign_pool), size=self.period)
                m_idx = rng.integers(0, len(malicious_pool), size=self.period)
                columns[name] = [
                    malicious_pool[int(m)] if flip else benign_pool[int(b)]
                    for flip, b, m in zip(to_malicious, b_idx, m_idx, strict=True)
                ]
                continue

            assert field_spec.channel is not None
            level = levels[field_spec.channel] + FIELD_JITTER * rng.standard_normal(self.period)
            if field_spec.counter:
                increments = np.maximum(field_spec.scale * level, 0.0)
                columns[name] = [int(v) for v in np.floor(np.cumsum(increments))]
                continue
            values = field_spec.base + field_spec.scale * level
            values = np.clip(values, 0.0, 100.0) if field_spec.percent else np.maximum(values, 0.0)
            if name in INTEGER_GAUGES:
                columns[name] = [int(v) for v in np.rint(values)]
            else:
                columns[name] = [float(v) for v in values]

        return [
            {field_spec.name: columns[field_spec.name][i] for field_spec in MACHINE_FIELDS}
            for i in range(self.period)
        ]

    def tweet_values(
        self, truth: Label, rng: np.random.Generator
    ) -> dict[str, MetricValue]:
        tp = self.malicious_tweets if truth is Label.MALICIOUS else self.profiles.tweets.benign

        def account() -> tuple[str, str, str]:
            spreader = rng.random() < tp.spreader_prob
            if spreader:
                j = int(rng.integers(0, self.profiles.spreader_pool_size))
                return f"spreader_{j:03d}", f"sp{j:03d}x", str(9_000_000 + j)
            k = int(rng.integers(0, 10**7))
            prefix = self.variant.user_prefix
            return f"{prefix}_{k}", f"{prefix}{k}", str(10**8 + k)

        def lognormal(mu: float, sigma: float) -> int:
            return int(math.exp(mu + sigma * rng.standard_normal()))

        name, screen, uid = account()
        is_retweet = rng.random() < tp.retweet_prob
        tweet_type = (
            "retweet"
            if is_retweet
            else TWEET_TYPES[int(rng.choice(len(TWEET_TYPES), p=TWEET_TYPE_WEIGHTS))]
        )
        coordinates: str | None = None
        if rng.random() < tp.coordinates_prob:
            lat, lon = rng.uniform(-60, 60), rng.uniform(-120, 120)
            coordinates = f"{lat:.3f},{lon:.3f}"

        values: dict[str, MetricValue] = {
            "user_name": name,
            "user_screen_name": screen,
            "user_id": uid,
            "user_followers_count": lognormal(tp.followers_log_mean, tp.followers_log_sigma),
            "user_friends_count": lognormal(tp.friends_log_mean, tp.friends_log_sigma),
            "user_account_age_days": lognormal(
                tp.account_age_log_mean, tp.account_age_log_sigma
            ),
            "user_verified": bool(rng.random() < tp.verified_prob),
            "user_language": _weighted_choice(rng, tp.languages),
            "user_time_zone": _weighted_choice(rng, tp.time_zones),
            "user_location": _weighted_choice(rng, tp.locations),
            "user_coordinates": coordinates,
            "retweet_count": lognormal(tp.retweet_count_log_mean, 1.0),
            "favourite_count": lognormal(tp.favourites_log_mean - 3.0, 1.0),
        }
        if is_retweet:
            r_name, r_screen, r_uid = account()
            values.update(
                {
                    "retweet_user_name": r_name,
                    "retweet_user_screen_name": r_screen,
                    "retweet_user_id": r_uid,
                    "retweet_user_verified": bool(rng.random() < tp.verified_prob),
                    "retweet_user_time_zone": _weighted_choice(rng, tp.time_zones),
                    "retweet_user_location": _weighted_choice(rng, tp.locations),
                    "retweet_user_friends_count": lognormal(
                        tp.friends_log_mean, tp.friends_log_sigma
                    ),
                    "retweet_user_followers_count": lognormal(
                        tp.followers_log_mean, tp.followers_log_sigma
                    ),
                    "retweet_user_favourites_count": lognormal(tp.favourites_log_mean, 1.0),
                    "retweet_favourite_count": lognormal(tp.favourites_log_mean - 3.0, 1.0),
                }
            )
        else:
            for absent in (
                "retweet_user_name",
                "retweet_user_screen_name",
                "retweet_user_id",
                "retweet_user_verified",
                "retweet_user_time_zone",
                "retweet_user_location",
                "retweet_user_friends_count",
                "retweet_user_followers_count",
                "retweet_user_favourites_count",
                "retweet_favourite_count",
            ):
                values[absent] = None
        values["tweet_type"] = tweet_type
        return values

    def events(
        self,
        profile: BehaviorProfile | None,
        onset: int | None,
        rng: np.random.Generator,
    ) -> list[LowLevelEvent]:
        cache_root = self.profiles.benign_cache_root
        payload = profile.payload if profile else None
        candidates = []
        if payload is not None:
            candidates = [r for r in self.rules.rules if r.kind in payload.event_kinds]
            if not candidates:
                candidates = list(self.rules.rules)
        events: list[LowLevelEvent] = []
        for step in range(1, self.period + 1):
            for _ in range(int(rng.integers(0, MAX_BENIGN_EVENTS_PER_STEP + 1))):
                token = "".join(chr(97 + int(c)) for c in rng.integers(0, 26, size=8))
                events.append(
                    LowLevelEvent(
                        time_step=step,
                        kind=EventKind.FILE_WRITE,
                        target=f"{cache_root}\\{token}.tmp",
                    )
                )
            if payload is not None and onset is not None and step >= onset:
                count = int(rng.integers(1, payload.max_events_per_step + 1))
                for _ in range(count):
                    rule = candidates[int(rng.integers(0, len(candidates)))]
                    events.append(
                        LowLevelEvent(
                            time_step=step, kind=rule.kind, target=target_for_rule(rule, rng)
                        )
                    )
        return events

    def build(self, index: int, malicious: bool) -> UrlTrace:  # noqa: FBT001
        rng = self.rng_for(index)
        profile: BehaviorProfile | None = None
        if malicious:
            profile = self.kits[int(rng.choice(len(self.kits), p=self.kit_p))]
        intended = Label.MALICIOUS if malicious else Label.BENIGN

        intensity, onset = self.intensity(profile, rng)
        levels = self.levels(profile, intensity, rng)
        events = self.events(profile, onset, rng)
        switch = profile.payload.categorical_switch if profile and profile.payload else 0.0
        machine_rows = self.machine_values(levels, intensity, switch, events, rng)
        tweet = TweetMeta(values=self.tweet_values(intended, rng))

        truth = label_trace(events, self.rules)
        if truth is not intended:
            msg = (
                f"Oracle labeled trace {index} {truth.value} but it was generated "
                f"{intended.value}; rules overlap the benign namespace?"
            )
            raise ConfigError(msg)

        trace_id = f"{self.request.event_tag}-{index:06d}"
        snapshots = tuple(
            Snapshot(
                trace_id=trace_id,
                time_step=step,
                machine=MachineMetrics(values=machine_rows[step - 1]),
                tweet=tweet,
                label=truth,
            )
            for step in range(1, self.period + 1)
        )
        return UrlTrace(
            trace_id=trace_id,
            event_tag=self.request.event_tag,
            snapshots=snapshots,
            truth=truth,
            onset_step=onset,
            label_generation=self.rules.version,
            events=tuple(events),
        )


def generate_dataset(
    n_traces: int,
    malicious_fraction: float,
    profiles: ProfileSet,
    cfg: ObservationConfig,
    seed: int,
    *,
    event_tag: str = "euro2016-like",
    rules: ExclusionRuleSet | None = None,
    tweet_separation: float = 0.6,
    early_signal_strength: float | None = None,
    profile_names: Sequence[str] | None = None,
    start_index: int = 0,
) -> GeneratedDataset:
    """Generate a labeled synthetic dataset.

    Args:
        n_traces: Number of traces (>= 1)
        malicious_fraction: Share of malicious traces in [0, 1]
        profiles: Behavior profiles
        cfg: Observation protocol
        seed: Master seed
        event_tag: Collection event, selects the event variant
        rules: Exclusion rules used for labeling (generation 1 by default);
            their version also selects which malicious kits are active
        tweet_separation: 0 gives both classes the benign tweet distribution
        early_signal_strength: Overrides every kit's pre-onset signal
        profile_names: Restrict malicious traces to these kits
        start_index: Index of the first trace (keeps ids unique across batches)

    Returns:
        GeneratedDataset with exactly round(n * fraction) malicious traces

    Raises:
        ConfigError: invalid size or fraction, unknown profile or event tag
    """
    if n_traces < 1:
        msg = f"n_traces must be >= 1, got {n_traces}"
        raise ConfigError(msg)
    if not 0.0 <= malicious_fraction <= 1.0:
        msg = f"malicious_fraction must lie in [0, 1], got {malicious_fraction}"
        raise ConfigError(msg)
    if seed < 0:
        msg = f"seed must be non-negative, got {seed}"
        raise ConfigError(msg)
    if not 0.0 <= tweet_separation <= 1.0:
        msg = f"tweet_separation must lie in [0, 1], got {tweet_separation}"
        raise ConfigError(msg)
    if early_signal_strength is not None and not 0.0 <= early_signal_strength <= 1.0:
        msg = f"early_signal_strength must lie in [0, 1], got {early_signal_strength}"
        raise ConfigError(msg)

    rules = rules or default_rules()
    request = GenerationRequest(
        n_traces=n_traces,
        malicious_fraction=malicious_fraction,
        seed=seed,
        event_tag=event_tag,
        observation=cfg,
        label_generation=rules.version,
        tweet_separation=tweet_separation,
        early_signal_strength=early_signal_strength,
        profile_names=tuple(profile_names) if profile_names is not None else None,
        start_index=start_index,
    )
    builder = _TraceBuilder(profiles, request, rules)

    master = np.random.default_rng(np.random.SeedSequence([seed, builder.tag_code]))
    malicious_positions = set(master.permutation(n_traces)[: request.n_malicious].tolist())

    logger.info(
        "Generating %d %s traces (%d malicious, rule generation %d, seed %d)",
        n_traces,
        event_tag,
        request.n_malicious,
        rules.version,
        seed,
    )
    traces = []
    for position in range(n_traces):
        trace = builder.build(start_index + position, position in malicious_positions)
        result = validate_trace(trace, cfg)
        if not result.ok:
            msg = f"Generated trace {trace.trace_id} is invalid: {result.messages()}"
            raise ConfigError(msg)
        traces.append(trace)

    return GeneratedDataset(request=request, rules=rules, traces=tuple(traces))
