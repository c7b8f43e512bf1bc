"""
Field catalogue for snapshot records.

A snapshot carries 54 machine-activity metrics and 24 tweet-metadata
attributes. The order below is the published schema order used by the
trace files, the feature schema and every encoded vector; docs/schema.md
documents the same list.
"""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = 1
MACHINE_FIELD_COUNT = 54
TWEET_FIELD_COUNT = 24


class FieldKind(str, Enum):
    """How a raw field value is interpreted."""

    NUMERIC = "numeric"
    CATEGORICAL = "categorical"
    BOOLEAN = "boolean"


class FieldSource(str, Enum):
    """Which half of the snapshot a field belongs to."""

    MACHINE = "machine"
    TWEET = "tweet"


class Channel(str, Enum):
    """Activity channel a machine metric is driven by in synthetic traces."""

    CPU = "cpu"
    MEMORY = "memory"
    DISK = "disk"
    NETWORK = "network"
    PROCESS = "process"
    STATIC = "static"


class FieldSpec(BaseModel):
    """Catalogue entry for one snapshot attribute."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(description="Field name as stored in trace files")
    source: FieldSource = Field(description="Machine activity or tweet metadata")
    kind: FieldKind = Field(description="Value interpretation")
    counter: bool = Field(
        default=False, description="Monotone non-decreasing within a trace"
    )
    percent: bool = Field(default=False, description="Value lies in [0, 100]")
    identifier: bool = Field(
        default=False, description="High-cardinality id, frequency-binned on encoding"
    )
    channel: Channel | None = Field(
        default=None, description="Generator activity channel (machine fields only)"
    )
    base: float = Field(default=0.0, description="Generator resting value")
    scale: float = Field(default=0.0, description="Generator response per unit level")


def _machine(
    name: str,
    channel: Channel,
    *,
    base: float = 0.0,
    scale: float = 0.0,
    counter: bool = False,
    percent: bool = False,
    kind: FieldKind = FieldKind.NUMERIC,
    identifier: bool = False,
) -> FieldSpec:
    return FieldSpec(
        name=name,
        source=FieldSource.MACHINE,
        kind=kind,
        counter=counter,
        percent=percent,
        identifier=identifier,
        channel=channel,
        base=base,
        scale=scale,
    )


def _tweet(
    name: str, kind: FieldKind = FieldKind.NUMERIC, *, identifier: bool = False
) -> FieldSpec:
    return FieldSpec(
        name=name, source=FieldSource.TWEET, kind=kind, identifier=identifier
    )


_CAT = FieldKind.CATEGORICAL
_BOOL = FieldKind.BOOLEAN

MACHINE_FIELDS: tuple[FieldSpec, ...] = (
    _machine("process_create_time", Channel.PROCESS, base=0.5, scale=2.0),
    _machine("disk_io_write_bytes", Channel.DISK, scale=2.0e5, counter=True),
    _machine("disk_memory_free", Channel.DISK, base=5.0e10, scale=-2.0e7),
    _machine("disk_memory_used", Channel.DISK, base=7.0e10, scale=2.0e7),
    _machine("disk_memory_percent", Channel.DISK, base=58.0, scale=0.5, percent=True),
    _machine("cpu_percent", Channel.CPU, base=5.0, scale=45.0, percent=True),
    _machine(
        "virtual_memory_percent", Channel.MEMORY, base=40.0, scale=12.0, percent=True
    ),
    _machine("virtual_memory_available", Channel.MEMORY, base=4.0e9, scale=-6.0e8),
    _machine("virtual_memory_free", Channel.MEMORY, base=2.0e9, scale=-5.0e8),
    _machine("virtual_memory_used", Channel.MEMORY, base=3.0e9, scale=6.0e8),
    _machine("packets_received", Channel.NETWORK, scale=120.0, counter=True),
    _machine("bytes_received", Channel.NETWORK, scale=1.5e5, counter=True),
    _machine("disk_io_read_bytes", Channel.DISK, scale=1.0e5, counter=True),
    _machine("swap_memory_free", Channel.MEMORY, base=1.5e9, scale=-1.0e8),
    _machine("swap_memory_used", Channel.MEMORY, base=5.0e8, scale=1.0e8),
    _machine(
        "swap_memory_percent", Channel.MEMORY, base=25.0, scale=5.0, percent=True
    ),
    _machine("packets_sent", Channel.NETWORK, scale=80.0, counter=True),
    _machine("disk_io_write_count", Channel.DISK, scale=40.0, counter=True),
    _machine("disk_io_read_count", Channel.DISK, scale=30.0, counter=True),
    _machine("bytes_sent", Channel.NETWORK, scale=2.0e4, counter=True),
    _machine("disk_io_read_time", Channel.DISK, scale=12.0, counter=True),
    _machine("process_id_net", Channel.PROCESS, base=2000.0, scale=1500.0),
    _machine("disk_io_write_time", Channel.DISK, scale=15.0, counter=True),
    _machine("process_username", Channel.PROCESS, kind=_CAT),
    _machine("memory_percent", Channel.MEMORY, base=2.0, scale=6.0, percent=True),
    _machine("process_path", Channel.PROCESS, kind=_CAT),
    _machine("process_name", Channel.PROCESS, kind=_CAT),
    _machine("process_status", Channel.PROCESS, kind=_CAT),
    _machine("remote_ip", Channel.NETWORK, kind=_CAT, identifier=True),
    _machine("connection_count", Channel.NETWORK, base=2.0, scale=8.0),
    _machine("process_id", Channel.PROCESS, base=3000.0, scale=1200.0),
    _machine("source_path", Channel.PROCESS, kind=_CAT),
    _machine("cmd_line", Channel.PROCESS, kind=_CAT),
    _machine("process_exe_path", Channel.PROCESS, kind=_CAT),
    _machine("cpu_time_user", Channel.CPU, scale=0.6, counter=True),
    _machine("cpu_time_system", Channel.CPU, scale=0.3, counter=True),
    _machine("port_number", Channel.NETWORK),
    _machine("swap_in", Channel.MEMORY, scale=1.0e4, counter=True),
    _machine("virtual_memory_total", Channel.STATIC, base=8.0e9),
    _machine("virtual_memory_active", Channel.MEMORY, base=2.5e9, scale=4.0e8),
    _machine("virtual_memory_inactive", Channel.MEMORY, base=1.5e9, scale=1.0e8),
    _machine("swap_memory_total", Channel.STATIC, base=2.0e9),
    _machine("swap_out", Channel.MEMORY, scale=5.0e3, counter=True),
    _machine("disk_memory_total", Channel.STATIC, base=1.2e11),
    _machine("network_errors_in", Channel.NETWORK, scale=0.05, counter=True),
    _machine("network_errors_out", Channel.NETWORK, scale=0.03, counter=True),
    _machine("network_drops_in", Channel.NETWORK, scale=0.08, counter=True),
    _machine("network_drops_out", Channel.NETWORK, scale=0.02, counter=True),
    _machine("process_num_threads", Channel.PROCESS, base=20.0, scale=25.0),
    _machine("process_memory_rss", Channel.MEMORY, base=1.2e8, scale=8.0e7),
    _machine("process_memory_vms", Channel.MEMORY, base=4.0e8, scale=2.0e8),
    _machine("process_count", Channel.PROCESS, base=45.0, scale=6.0),
    _machine("file_write_count", Channel.DISK, scale=3.0, counter=True),
    _machine("registry_write_count", Channel.PROCESS, scale=2.0, counter=True),
)

TWEET_FIELDS: tuple[FieldSpec, ...] = (
    _tweet("user_name", _CAT, identifier=True),
    _tweet("user_screen_name", _CAT, identifier=True),
    _tweet("user_id", _CAT, identifier=True),
    _tweet("user_followers_count"),
    _tweet("user_friends_count"),
    _tweet("user_account_age_days"),
    _tweet("user_verified", _BOOL),
    _tweet("user_language", _CAT),
    _tweet("user_time_zone", _CAT),
    _tweet("user_location", _CAT),
    _tweet("user_coordinates", _CAT, identifier=True),
    _tweet("retweet_count"),
    _tweet("favourite_count"),
    _tweet("retweet_user_name", _CAT, identifier=True),
    _tweet("retweet_user_screen_name", _CAT, identifier=True),
    _tweet("retweet_user_id", _CAT, identifier=True),
    _tweet("retweet_user_verified", _BOOL),
    _tweet("retweet_user_time_zone", _CAT),
    _tweet("retweet_user_location", _CAT),
    _tweet("retweet_user_friends_count"),
    _tweet("retweet_user_followers_count"),
    _tweet("retweet_user_favourites_count"),
    _tweet("retweet_favourite_count"),
    _tweet("tweet_type", _CAT),
)

MACHINE_FIELD_NAMES: tuple[str, ...] = tuple(field_spec.name for field_spec in MACHINE_FIELDS)
TWEET_FIELD_NAMES: tuple[str, ...] = tuple(field_spec.name for field_spec in TWEET_FIELDS)
ALL_FIELDS: tuple[FieldSpec, ...] = MACHINE_FIELDS + TWEET_FIELDS
FIELDS_BY_NAME: dict[str, FieldSpec] = {field_spec.name: field_spec for field_spec in ALL_FIELDS}

COUNTER_FIELDS: tuple[str, ...] = tuple(s.name for s in MACHINE_FIELDS if s.counter)
PERCENT_FIELDS: tuple[str, ...] = tuple(s.name for s in MACHINE_FIELDS if s.percent)

if len(MACHINE_FIELDS) != MACHINE_FIELD_COUNT or len(TWEET_FIELDS) != TWEET_FIELD_COUNT:
    msg = "Field catalogue does not match the 54 + 24 snapshot layout"
    raise RuntimeError(msg)
