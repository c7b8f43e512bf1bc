"""
Behavior profiles for the synthetic trace generator.

A ProfileSet is loaded from a human-editable JSON file (the packaged
``default_profiles.json`` documents the format). The benign profile owns
the per-channel activity curves; malicious profiles add a payload on top
of the same curves from their onset step, so with no early signal their
pre-onset snapshots are drawn exactly like benign ones.
"""

from __future__ import annotations

import logging
from importlib import resources
from pathlib import Path

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from driveby_sentinel.errors import ConfigError, DataError
from driveby_sentinel.models.schema import Channel
from driveby_sentinel.models.types import EventKind, Label

logger = logging.getLogger(__name__)

DEFAULT_PROFILE_RESOURCE = "default_profiles.json"

ACTIVITY_CHANNELS: tuple[Channel, ...] = (
    Channel.CPU,
    Channel.MEMORY,
    Channel.DISK,
    Channel.NETWORK,
    Channel.PROCESS,
)


class ChannelCurve(BaseModel):
    """Per-step mean and standard deviation of one activity channel's level."""

    model_config = ConfigDict(frozen=True)

    mean: tuple[float, ...] = Field(min_length=1, description="Mean level per step")
    std: tuple[float, ...] = Field(min_length=1, description="Level spread per step")

    @field_validator("mean", "std")
    @classmethod
    def non_negative(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        """Curve means and spreads are never negative."""
        if any(x < 0 for x in v):
            msg = f"Curve values must be >= 0, got {v}"
            raise ValueError(msg)
        return v

    def at(self, step: int) -> tuple[float, float]:
        """(mean, std) at a 1-based step; short curves repeat their last value."""
        mean = self.mean[min(step, len(self.mean)) - 1]
        std = self.std[min(step, len(self.std)) - 1]
        return mean, std


class BurstModel(BaseModel):
    """Page-load spike: amplitude * decay**(step - 1) for the first steps."""

    model_config = ConfigDict(frozen=True)

    amplitude: float = Field(default=1.0, ge=0.0)
    decay: float = Field(default=0.5, ge=0.0, le=1.0)
    steps: int = Field(default=2, ge=0, description="Steps the burst lasts")

    def at(self, step: int) -> float:
        """Burst level added at a step."""
        if step > self.steps:
            return 0.0
        return self.amplitude * self.decay ** (step - 1)


class OnsetModel(BaseModel):
    """Uniform distribution of the payload onset step."""

    model_config = ConfigDict(frozen=True)

    first: int = Field(default=3, ge=1)
    last: int = Field(default=8, ge=1)

    @model_validator(mode="after")
    def ordered(self) -> OnsetModel:
        """first <= last."""
        if self.first > self.last:
            msg = f"Onset range [{self.first}, {self.last}] is empty"
            raise ValueError(msg)
        return self


class PayloadSpec(BaseModel):
    """What a malicious payload does once it runs."""

    model_config = ConfigDict(frozen=True)

    channel_deltas: dict[Channel, float] = Field(
        description="Level added per channel at full payload intensity"
    )
    categorical_switch: float = Field(
        default=0.9,
        ge=0.0,
        le=1.0,
        description="Chance per unit intensity that categoricals come from the malicious pools",
    )
    event_kinds: tuple[EventKind, ...] = Field(
        min_length=1, description="Kinds of low-level changes the payload makes"
    )
    max_events_per_step: int = Field(default=2, ge=1)

    @field_validator("channel_deltas")
    @classmethod
    def non_negative(cls, v: dict[Channel, float]) -> dict[Channel, float]:
        """Payloads only add activity."""
        if any(delta < 0 for delta in v.values()):
            msg = "Payload channel deltas must be >= 0"
            raise ValueError(msg)
        if Channel.STATIC in v:
            msg = "The static channel cannot carry a payload"
            raise ValueError(msg)
        return v


class BehaviorProfile(BaseModel):
    """Behavioral model of one class of URL interaction."""

    model_config = ConfigDict(frozen=True)

    name: str
    label: Label
    channels: dict[Channel, ChannelCurve] = Field(
        default_factory=dict,
        description="Activity curves; malicious profiles may omit them to share the benign ones",
    )
    burst: BurstModel | None = Field(default=None)
    onset: OnsetModel | None = Field(default=None)
    payload: PayloadSpec | None = Field(default=None)
    early_signal_strength: float = Field(
        default=0.0,
        ge=0.0,
        le=1.0,
        description="How much pre-onset behavior differs from benign",
    )
    precursor_level: float = Field(
        default=0.35, ge=0.0, le=1.0, description="Pre-onset payload intensity at strength 1"
    )
    introduced_in: int = Field(
        default=1, ge=1, description="First rule generation this kit appears in"
    )
    weight: float = Field(default=1.0, gt=0.0, description="Mixture weight among kits")

    @model_validator(mode="after")
    def class_shape(self) -> BehaviorProfile:
        """Malicious profiles need an onset and a payload; benign ones neither."""
        if self.label is Label.MALICIOUS:
            if self.onset is None or self.payload is None:
                msg = f"Malicious profile {self.name!r} needs onset and payload"
                raise ValueError(msg)
        elif self.onset is not None or self.payload is not None:
            msg = f"Benign profile {self.name!r} cannot have onset or payload"
            raise ValueError(msg)
        return self


class TweetProfile(BaseModel):
    """Distribution of the metadata of the tweet that carried a URL."""

    model_config = ConfigDict(frozen=True)

    followers_log_mean: float
    followers_log_sigma: float = Field(ge=0.0)
    friends_log_mean: float
    friends_log_sigma: float = Field(ge=0.0)
    account_age_log_mean: float
    account_age_log_sigma: float = Field(ge=0.0)
    favourites_log_mean: float
    retweet_count_log_mean: float
    verified_prob: float = Field(ge=0.0, le=1.0)
    retweet_prob: float = Field(ge=0.0, le=1.0, description="Share of retweets")
    coordinates_prob: float = Field(ge=0.0, le=1.0)
    spreader_prob: float = Field(
        default=0.0, ge=0.0, le=1.0, description="Share posted by the spreader pool"
    )
    languages: dict[str, float] = Field(min_length=1)
    time_zones: dict[str, float] = Field(min_length=1)
    locations: dict[str, float] = Field(min_length=1)


class ClassTweetProfiles(BaseModel):
    """Benign and fully separated malicious tweet distributions."""

    model_config = ConfigDict(frozen=True)

    benign: TweetProfile
    malicious: TweetProfile


class CategoryPools(BaseModel):
    """Value pools for categorical machine fields (and port numbers)."""

    model_config = ConfigDict(frozen=True)

    benign: dict[str, tuple[str | int, ...]]
    malicious: dict[str, tuple[str | int, ...]]

    @model_validator(mode="after")
    def same_fields(self) -> CategoryPools:
        """Both classes pool the same fields, each non-empty."""
        if set(self.benign) != set(self.malicious):
            msg = "Benign and malicious pools must cover the same fields"
            raise ValueError(msg)
        for pools in (self.benign, self.malicious):
            for name, pool in pools.items():
                if not pool:
                    msg = f"Pool for {name} is empty"
                    raise ValueError(msg)
        return self


class EventVariant(BaseModel):
    """Collection-event specifics (payload strength, user population)."""

    model_config = ConfigDict(frozen=True)

    tag: str
    payload_scale: float = Field(default=1.0, gt=0.0)
    user_prefix: str = Field(description="Prefix of benign account names")


class ProfileSet(BaseModel):
    """Everything the generator needs besides size, fraction and seed."""

    model_config = ConfigDict(frozen=True)

    benign: BehaviorProfile
    malicious: tuple[BehaviorProfile, ...] = Field(min_length=1)
    tweets: ClassTweetProfiles
    pools: CategoryPools
    events: tuple[EventVariant, ...] = Field(min_length=1)
    spreader_pool_size: int = Field(default=40, ge=1)
    c2_pool_size: int = Field(default=12, ge=1)
    benign_cache_root: str = Field(
        default="C:\\Users\\victim\\AppData\\Local\\BrowserCache",
        description="Namespace of benign browser writes; outside every rule",
    )

    @model_validator(mode="after")
    def check_profiles(self) -> ProfileSet:
        """Benign baseline is complete; names are unique; labels match slots."""
        if self.benign.label is not Label.BENIGN:
            msg = "The benign slot needs a benign profile"
            raise ValueError(msg)
        missing = [c.value for c in ACTIVITY_CHANNELS if c not in self.benign.channels]
        if missing:
            msg = f"Benign profile lacks curves for {', '.join(missing)}"
            raise ValueError(msg)
        names = [p.name for p in self.malicious]
        if len(set(names)) != len(names) or self.benign.name in names:
            msg = "Profile names must be unique"
            raise ValueError(msg)
        for profile in self.malicious:
            if profile.label is not Label.MALICIOUS:
                msg = f"Profile {profile.name!r} in the malicious slot is benign"
                raise ValueError(msg)
        return self

    def profile(self, name: str) -> BehaviorProfile:
        """Profile by name.

        Raises:
            ConfigError: unknown profile name
        """
        if name == self.benign.name:
            return self.benign
        for profile in self.malicious:
            if profile.name == name:
                return profile
        msg = f"Unknown profile: {name}"
        raise ConfigError(msg)

    def malicious_for_generation(
        self, generation: int, names: tuple[str, ...] | None = None
    ) -> tuple[BehaviorProfile, ...]:
        """Malicious kits active under a rule generation, optionally filtered."""
        if names is not None:
            chosen = tuple(self.profile(n) for n in names)
            benign = [p.name for p in chosen if p.label is Label.BENIGN]
            if benign:
                msg = f"Not malicious profiles: {', '.join(benign)}"
                raise ConfigError(msg)
        else:
            chosen = self.malicious
        active = tuple(p for p in chosen if p.introduced_in <= generation)
        if not active:
            msg = f"No malicious profile is active in rule generation {generation}"
            raise ConfigError(msg)
        return active

    def event(self, tag: str) -> EventVariant:
        """Event variant by tag."""
        for variant in self.events:
            if variant.tag == tag:
                return variant
        msg = f"Unknown event tag: {tag} (known: {', '.join(e.tag for e in self.events)})"
        raise ConfigError(msg)

    def curves_for(self, profile: BehaviorProfile) -> dict[Channel, ChannelCurve]:
        """Activity curves of a profile, falling back to the benign baseline."""
        return {c: profile.channels.get(c, self.benign.channels[c]) for c in ACTIVITY_CHANNELS}


def load_profiles(path: str | Path | None = None) -> ProfileSet:
    """Load a profile file, or the packaged defaults when path is None.

    Raises:
        DataError: the file does not exist
        ConfigError: the file does not describe a valid profile set
    """
    if path is None:
        text = (
            resources.files("driveby_sentinel.synthesis")
            .joinpath(DEFAULT_PROFILE_RESOURCE)
            .read_text(encoding="utf-8")
        )
        source = DEFAULT_PROFILE_RESOURCE
    else:
        profile_path = Path(path)
        if not profile_path.is_file():
            msg = f"Profile file not found: {profile_path}"
            raise DataError(msg)
        text = profile_path.read_text(encoding="utf-8")
        source = str(profile_path)

    try:
        profiles = ProfileSet.model_validate_json(text)
    except ValidationError as e:
        msg = f"Invalid profile file {source}: {e}"
        raise ConfigError(msg) from e
    logger.debug(
        "Loaded %d malicious profiles from %s", len(profiles.malicious), source
    )
    return profiles
