"""Keyword-driven intent detection for observability questions.

Each intent has a trigger phrase list; phrases are matched case- and
whitespace-insensitively at word boundaries. When several intents trigger,
a fixed precedence ladder picks the winner (percentile beats top_n beats
comparison beats rate beats trend beats count beats average), and a question
with no triggers at all defaults to current_value. Alongside the intent, the
detector extracts measurement words (temperature, memory, latency, ...) and
domain terms (ttft, vllm, kv cache, ...) for downstream scoring and label
inference.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError

__all__ = ["IntentType", "IntentLexicon", "IntentResult", "detect_intent"]


class IntentType(str, Enum):
    current_value = "current_value"
    count = "count"
    average = "average"
    percentile = "percentile"
    top_n = "top_n"
    comparison = "comparison"
    trend = "trend"
    rate = "rate"


#: Tie-break order when several intents trigger; earlier wins.
PRECEDENCE: tuple[IntentType, ...] = (
    IntentType.percentile,
    IntentType.top_n,
    IntentType.comparison,
    IntentType.rate,
    IntentType.trend,
    IntentType.count,
    IntentType.average,
    IntentType.current_value,
)

_TOP_N_RE = re.compile(r"\btop\s+(\d+)\b")


def _phrase_re(phrase: str) -> re.Pattern[str]:
    return re.compile(r"\b" + re.escape(phrase) + r"\b")


@dataclass
class IntentLexicon:
    triggers: dict[IntentType, list[tuple[str, re.Pattern[str]]]]
    measurements: dict[str, list[re.Pattern[str]]]
    domain_terms: dict[str, list[re.Pattern[str]]]

    @classmethod
    def from_dict(cls, doc: dict) -> "IntentLexicon":
        try:
            triggers = {
                IntentType(intent): [(p, _phrase_re(p)) for p in phrases]
                for intent, phrases in doc["triggers"].items()
            }
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad intent lexicon: {exc}") from exc
        for intent in IntentType:
            triggers.setdefault(intent, [])
        return cls(
            triggers=triggers,
            measurements={
                name: [_phrase_re(p) for p in phrases]
                for name, phrases in doc.get("measurements", {}).items()
            },
            domain_terms={
                name: [_phrase_re(p) for p in phrases]
                for name, phrases in doc.get("domain_terms", {}).items()
            },
        )


@dataclass(frozen=True)
class IntentResult:
    intent: IntentType
    measurements: frozenset[str]
    domain_terms: frozenset[str]
    matched_triggers: tuple[str, ...]


def detect_intent(question: str, lexicon: IntentLexicon) -> IntentResult:
    """Classify a question into one of the eight intents.

    Returns all matched trigger phrases in precedence order, so callers can
    inspect secondary signals (a "p99" trigger, a "top 3" count) without
    re-scanning the question.

    Raises:
        ValueError: if the question is empty or whitespace-only.
    """
    if not question or not question.strip():
        raise ValueError("question is empty")
    q = " ".join(question.lower().split())

    matched: list[str] = []
    triggered: set[IntentType] = set()
    for intent in PRECEDENCE:
        for phrase, pattern in lexicon.triggers[intent]:
            if pattern.search(q):
                triggered.add(intent)
                if phrase not in matched:
                    matched.append(phrase)
    top_m = _TOP_N_RE.search(q)
    if top_m:
        triggered.add(IntentType.top_n)
        matched.insert(0, top_m.group(0))

    winner = IntentType.current_value
    for intent in PRECEDENCE:
        if intent in triggered:
            winner = intent
            break

    measurements = frozenset(
        name
        for name, patterns in lexicon.measurements.items()
        if any(p.search(q) for p in patterns)
    )
    domain_terms = frozenset(
        name
        for name, patterns in lexicon.domain_terms.items()
        if any(p.search(q) for p in patterns)
    )
    return IntentResult(
        intent=winner,
        measurements=measurements,
        domain_terms=domain_terms,
        matched_triggers=tuple(matched),
    )
