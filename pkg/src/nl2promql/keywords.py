"""Keyword generation for catalog entries.

Keywords come from five sources, applied in a fixed order of trust:

1. curated per-metric lists,
2. keywords implied by the metric type (counter, histogram, ...),
3. regex pattern rules over the metric name,
4. the name's own underscore/colon tokens (tokens shorter than 3 chars are
   noise and dropped),
5. help-text words minus a stopword list.

The merged list is deduplicated preserving first occurrence and truncated to
12 entries, so curated and type keywords always survive truncation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .catalog import MetricType
from .errors import ConfigError

MAX_KEYWORDS = 12

_TOKEN_SPLIT_RE = re.compile(r"[_:]+")
_WORD_RE = re.compile(r"[a-z0-9]+")


@dataclass
class KeywordRules:
    curated: dict[str, list[str]]
    type_keywords: dict[MetricType, list[str]]
    patterns: list[tuple[re.Pattern[str], list[str]]]
    stopwords: frozenset[str]

    @classmethod
    def from_dict(cls, doc: dict) -> "KeywordRules":
        """Build rules from the JSON config shape, compiling pattern regexes.

        Raises:
            ConfigError: if a pattern regex does not compile.
        """
        try:
            type_keywords = {
                MetricType(t): list(kws) for t, kws in doc.get("type_keywords", {}).items()
            }
        except ValueError as exc:
            raise ConfigError(f"unknown metric type in keyword rules: {exc}") from exc
        patterns = []
        for rule in doc.get("patterns", []):
            try:
                compiled = re.compile(rule["regex"], re.IGNORECASE)
            except re.error as exc:
                raise ConfigError(f"bad keyword pattern {rule.get('regex')!r}: {exc}") from exc
            patterns.append((compiled, list(rule["keywords"])))
        return cls(
            curated={name: list(kws) for name, kws in doc.get("curated", {}).items()},
            type_keywords=type_keywords,
            patterns=patterns,
            stopwords=frozenset(doc.get("stopwords", [])),
        )


def generate_keywords(
    name: str,
    metric_type: MetricType,
    help_text: str,
    rules: KeywordRules,
    tiers: tuple[int, ...] = (1, 2, 3, 4, 5),
) -> list[str]:
    """Derive the keyword list for one metric.

    ``tiers`` selects which sources run; GPU discovery passes ``(1, 2, 3, 4)``
    because discovered metrics carry no help text, and validation adoption
    passes ``(2, 3, 4)``.
    """
    out: list[str] = []
    seen: set[str] = set()

    def add(candidates: list[str]) -> None:
        for kw in candidates:
            kw = kw.lower().strip()
            if kw and kw not in seen:
                seen.add(kw)
                out.append(kw)

    if 1 in tiers:
        add(rules.curated.get(name, []))
    if 2 in tiers:
        add(rules.type_keywords.get(metric_type, []))
    if 3 in tiers:
        for pattern, kws in rules.patterns:
            if pattern.search(name):
                add(kws)
    if 4 in tiers:
        add([t for t in _TOKEN_SPLIT_RE.split(name.lower()) if len(t) >= 3])
    if 5 in tiers:
        add([w for w in _WORD_RE.findall(help_text.lower()) if w not in rules.stopwords])
    return out[:MAX_KEYWORDS]
