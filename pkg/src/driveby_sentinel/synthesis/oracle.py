"""
Exclusion-rule labeling oracle.

Stands in for the honeypot's exclusion list: a URL is malicious when any
file, process or registry change it caused matches a rule of the current
generation. Rule generations advance deterministically from a seed.
"""

from __future__ import annotations

import logging
import string
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from pydantic import ValidationError

from driveby_sentinel.errors import ConfigError, DataError
from driveby_sentinel.models.types import (
    EventKind,
    ExclusionRule,
    ExclusionRuleSet,
    Label,
    LowLevelEvent,
)

if TYPE_CHECKING:
    from collections.abc import Iterable

logger = logging.getLogger(__name__)

RETAIN_PROBABILITY = 0.7
MAX_NEW_RULES = 3
TOKEN_LENGTH = 6

# New-rule templates per event kind; {token} makes a generation's rules disjoint.
RULE_TEMPLATES: dict[EventKind, tuple[str, ...]] = {
    EventKind.FILE_WRITE: (
        "C:\\Users\\*\\AppData\\Roaming\\{token}\\*.exe",
        "C:\\ProgramData\\{token}*\\*.dll",
        "C:\\Users\\*\\AppData\\Local\\Temp\\{token}*.scr",
    ),
    EventKind.PROCESS_CREATE: (
        "C:\\Users\\*\\AppData\\Local\\Temp\\{token}*.exe",
        "C:\\Windows\\Temp\\{token}*.exe",
    ),
    EventKind.REGISTRY_WRITE: (
        "HKCU\\Software\\Microsoft\\Windows\\CurrentVersion\\Run\\{token}*",
        "HKLM\\SOFTWARE\\Microsoft\\Windows\\CurrentVersion\\RunOnce\\{token}*",
        "HKCU\\Software\\Classes\\{token}*\\shell\\open\\command",
    ),
}


def default_rules() -> ExclusionRuleSet:
    """Generation-1 exclusion list."""
    return ExclusionRuleSet(
        version=1,
        rules=(
            ExclusionRule(
                kind=EventKind.REGISTRY_WRITE,
                pattern="HKCU\\Software\\Microsoft\\Windows\\CurrentVersion\\Run\\*",
            ),
            ExclusionRule(
                kind=EventKind.FILE_WRITE,
                pattern="C:\\Users\\*\\AppData\\Roaming\\*.exe",
            ),
            ExclusionRule(
                kind=EventKind.PROCESS_CREATE,
                pattern="C:\\Users\\*\\AppData\\Local\\Temp\\*.exe",
            ),
            ExclusionRule(
                kind=EventKind.FILE_WRITE,
                pattern="C:\\Users\\*\\Start Menu\\Programs\\Startup\\*",
            ),
        ),
    )


def label_trace(events: Iterable[LowLevelEvent], rules: ExclusionRuleSet) -> Label:
    """Malicious iff at least one event matches at least one rule."""
    for event in events:
        for rule in rules.rules:
            if rule.matches(event):
                logger.debug(
                    "Event %s %s matches rule %s (generation %d)",
                    event.kind.value,
                    event.target,
                    rule.pattern,
                    rules.version,
                )
                return Label.MALICIOUS
    return Label.BENIGN


def _token(rng: np.random.Generator, length: int = TOKEN_LENGTH) -> str:
    letters = string.ascii_lowercase
    return "".join(letters[i] for i in rng.integers(0, len(letters), size=length))


def advance_rule_generation(rules: ExclusionRuleSet, seed: int) -> ExclusionRuleSet:
    """Next rule generation: some rules retained, new ones added.

    The draw depends only on (seed, current version), so repeating the call
    yields the identical set. The input set is left untouched.
    """
    rng = np.random.default_rng([seed, rules.version])
    keep = rng.random(len(rules.rules)) < RETAIN_PROBABILITY
    if not keep.any():
        keep[int(rng.integers(0, len(rules.rules)))] = True
    retained = [rule for rule, kept in zip(rules.rules, keep, strict=True) if kept]

    kinds = list(RULE_TEMPLATES)
    existing = {(r.kind, r.pattern) for r in retained}
    added: list[ExclusionRule] = []
    for _ in range(int(rng.integers(1, MAX_NEW_RULES + 1))):
        kind = kinds[int(rng.integers(0, len(kinds)))]
        templates = RULE_TEMPLATES[kind]
        template = templates[int(rng.integers(0, len(templates)))]
        rule = ExclusionRule(kind=kind, pattern=template.format(token=_token(rng)))
        if (rule.kind, rule.pattern) not in existing:
            existing.add((rule.kind, rule.pattern))
            added.append(rule)

    advanced = ExclusionRuleSet(version=rules.version + 1, rules=(*retained, *added))
    logger.info(
        "Advanced exclusion rules to generation %d: %d retained, %d added",
        advanced.version,
        len(retained),
        len(added),
    )
    return advanced


def target_for_rule(rule: ExclusionRule, rng: np.random.Generator) -> str:
    """A concrete event target matched by a rule's pattern.

    Supports the ``*`` and ``?`` wildcards used by the rule templates.
    """
    parts: list[str] = []
    for char in rule.pattern:
        if char == "*":
            parts.append(_token(rng, int(rng.integers(3, 9))))
        elif char == "?":
            parts.append(_token(rng, 1))
        else:
            parts.append(char)
    return "".join(parts)


def save_rules(rules: ExclusionRuleSet, path: str | Path) -> Path:
    """Write a rule set as version-stamped JSON."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(rules.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return target


def load_rules(path: str | Path | None = None) -> ExclusionRuleSet:
    """Read a rule set file, or the generation-1 defaults when path is None.

    Raises:
        DataError: the file does not exist
        ConfigError: the file is not a valid rule set
    """
    if path is None:
        return default_rules()
    source = Path(path)
    if not source.is_file():
        msg = f"Rule file not found: {source}"
        raise DataError(msg)
    try:
        return ExclusionRuleSet.model_validate_json(source.read_text(encoding="utf-8"))
    except ValidationError as e:
        msg = f"Invalid rule file {source}: {e}"
        raise ConfigError(msg) from e
