"""
Synthetic stand-in for the honeypot sandbox.

This package provides behavior profiles, the seeded trace generator and
the versioned exclusion-rule labeling oracle.
"""

from .generator import (
    GeneratedDataset,
    GenerationRequest,
    blend_tweet_profiles,
    generate_dataset,
)
from .oracle import (
    advance_rule_generation,
    default_rules,
    label_trace,
    load_rules,
    save_rules,
    target_for_rule,
)
from .profiles import (
    BehaviorProfile,
    ChannelCurve,
    ProfileSet,
    TweetProfile,
    load_profiles,
)

__all__ = [
    "BehaviorProfile",
    "ChannelCurve",
    "GeneratedDataset",
    "GenerationRequest",
    "ProfileSet",
    "TweetProfile",
    "advance_rule_generation",
    "blend_tweet_profiles",
    "default_rules",
    "generate_dataset",
    "label_trace",
    "load_profiles",
    "load_rules",
    "save_rules",
    "target_for_rule",
]
