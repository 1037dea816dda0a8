"""Metric selection: narrow candidates by category hints, then score.

Scoring is a sum of four independent parts:

- keyword score: a config-driven list of weighted domain patterns. A pattern
  contributes its weight when one of its question triggers appears in the
  question and one of its metric terms appears in the entry's name or
  keywords. Weights range from +20 for exact serving-latency terms (ttft,
  tpot, itl) down to +8 for generic Kubernetes vocabulary.
- type score: a flat bonus when the (intent, metric type) pair is preferred,
  for example percentile questions prefer histograms and rate questions
  prefer counters.
- specificity score: longer metric names carry more structure; each name
  token beyond the leading namespace token adds a couple of points up to a
  small cap.
- priority score: High-priority entries get a larger constant than Medium.

Candidates come from hinted categories (High and Medium priority) when the
question activates any category keywords, otherwise from all High-priority
entries. There is no minimum score: selection only fails on an empty
candidate set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .catalog import Catalog, MetricEntry, MetricType, Priority, metrics_in_categories
from .errors import ConfigError, NoMetricFoundError
from .intent import IntentResult, IntentType

__all__ = [
    "ScorePattern",
    "ScoringConfig",
    "ScoredMetric",
    "extract_category_hints",
    "score_metric",
    "select_best",
    "rank_candidates",
    "PREFERRED_TYPES",
]

#: (intent, metric type) pairs that earn the flat type bonus.
PREFERRED_TYPES: frozenset[tuple[IntentType, MetricType]] = frozenset(
    {
        (IntentType.percentile, MetricType.histogram),
        (IntentType.rate, MetricType.counter),
        (IntentType.current_value, MetricType.gauge),
        (IntentType.trend, MetricType.gauge),
        (IntentType.count, MetricType.gauge),
        (IntentType.count, MetricType.counter),
    }
)

_TOKEN_SPLIT_RE = re.compile(r"[_:]+")


@dataclass(frozen=True)
class ScorePattern:
    id: str
    weight: int
    question_terms: tuple[re.Pattern[str], ...]
    metric_terms: tuple[str, ...]


@dataclass
class ScoringConfig:
    patterns: list[ScorePattern]
    type_match_bonus: int
    specificity_per_token: int
    specificity_cap: int
    priority_bonus: dict[Priority, int]

    @classmethod
    def from_dict(cls, doc: dict) -> "ScoringConfig":
        try:
            patterns = [
                ScorePattern(
                    id=p["id"],
                    weight=int(p["weight"]),
                    question_terms=tuple(
                        re.compile(r"\b" + re.escape(t) + r"\b") for t in p["question"]
                    ),
                    metric_terms=tuple(t.lower() for t in p["metric"]),
                )
                for p in doc["patterns"]
            ]
            priority_bonus = {
                Priority(name): int(v) for name, v in doc["priority_bonus"].items()
            }
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad scoring config: {exc}") from exc
        return cls(
            patterns=patterns,
            type_match_bonus=int(doc["type_match_bonus"]),
            specificity_per_token=int(doc["specificity_per_token"]),
            specificity_cap=int(doc["specificity_cap"]),
            priority_bonus=priority_bonus,
        )


@dataclass(frozen=True)
class ScoredMetric:
    entry: MetricEntry
    s_keyword: int
    s_type: int
    s_specificity: int
    s_priority: int
    s_total: int
    matched_patterns: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        expected = self.s_keyword + self.s_type + self.s_specificity + self.s_priority
        if self.s_total != expected:
            raise ValueError(
                f"score total {self.s_total} != sum of components {expected}"
            )


def extract_category_hints(
    question: str, category_keywords: dict[str, list[str]]
) -> set[str]:
    """Categories whose keyword lists match the question (word boundaries,
    case-insensitive). An empty set means no hint."""
    q = " ".join(question.lower().split())
    hints: set[str] = set()
    for category, phrases in category_keywords.items():
        for phrase in phrases:
            if re.search(r"\b" + re.escape(phrase.lower()) + r"\b", q):
                hints.add(category)
                break
    return hints


def _active_patterns(question: str, config: ScoringConfig) -> list[ScorePattern]:
    q = " ".join(question.lower().split())
    return [
        p
        for p in config.patterns
        if any(t.search(q) for t in p.question_terms)
    ]


def _specificity(name: str, config: ScoringConfig) -> int:
    tokens = [t for t in _TOKEN_SPLIT_RE.split(name) if t]
    beyond_namespace = max(0, len(tokens) - 1)
    return min(config.specificity_cap, config.specificity_per_token * beyond_namespace)


def _score_entry(
    entry: MetricEntry,
    intent: IntentResult,
    active: list[ScorePattern],
    config: ScoringConfig,
) -> ScoredMetric:
    haystack = entry.name.lower() + "\x00" + "\x00".join(entry.keywords)
    matched: list[tuple[str, int]] = []
    s_keyword = 0
    for pattern in active:
        if any(term in haystack for term in pattern.metric_terms):
            s_keyword += pattern.weight
            matched.append((pattern.id, pattern.weight))
    s_type = (
        config.type_match_bonus
        if (intent.intent, entry.metric_type) in PREFERRED_TYPES
        else 0
    )
    s_specificity = _specificity(entry.name, config)
    s_priority = config.priority_bonus.get(entry.priority, 0)
    return ScoredMetric(
        entry=entry,
        s_keyword=s_keyword,
        s_type=s_type,
        s_specificity=s_specificity,
        s_priority=s_priority,
        s_total=s_keyword + s_type + s_specificity + s_priority,
        matched_patterns=tuple(matched),
    )


def score_metric(
    question: str,
    entry: MetricEntry,
    intent: IntentResult,
    config: ScoringConfig,
) -> ScoredMetric:
    return _score_entry(entry, intent, _active_patterns(question, config), config)


def _rank_key(scored: ScoredMetric) -> tuple:
    return (
        -scored.s_total,
        0 if scored.entry.priority is Priority.high else 1,
        scored.entry.name,
    )


def rank_candidates(
    question: str,
    intent: IntentResult,
    candidates: list[MetricEntry],
    config: ScoringConfig,
) -> list[ScoredMetric]:
    """Score and order candidates: higher total first, then High priority,
    then lexicographic name. Deterministic for equal inputs."""
    active = _active_patterns(question, config)
    scored = [_score_entry(e, intent, active, config) for e in candidates]
    scored.sort(key=_rank_key)
    return scored


def select_best(
    question: str,
    intent: IntentResult,
    catalog: Catalog,
    config: ScoringConfig,
) -> ScoredMetric:
    """Pick the best metric for a question.

    Raises:
        NoMetricFoundError: when the candidate set is empty (no hinted
            category has entries and the catalog has no High-priority
            entries to fall back on).
    """
    hints = extract_category_hints(question, catalog.category_keywords)
    candidates = metrics_in_categories(catalog, sorted(hints), include_medium=bool(hints))
    if not candidates:
        raise NoMetricFoundError(
            f"no candidate metrics for question {question!r} (hints: {sorted(hints) or 'none'})"
        )
    return rank_candidates(question, intent, candidates, config)[0]
