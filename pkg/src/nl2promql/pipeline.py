"""End-to-end question answering: intent, time, metric, PromQL, execution.

``SmartDiscoveryService`` owns a catalog store plus an optional Prometheus
client and runs the full pipeline. The catalog path never touches the
metadata API; only when no catalog candidate exists does the service fall
back to searching live metric names and fetching per-metric metadata for
the matches. Background tasks (GPU discovery, catalog validation) refresh
the store without blocking queries.
"""

from __future__ import annotations

import concurrent.futures
import threading
import time as _time
from dataclasses import dataclass, field
from enum import Enum

from .catalog import (
    Catalog,
    CatalogStore,
    MetricEntry,
    MetricType,
    Priority,
    catalog_stats,
    metrics_in_categories,
)
from .errors import ClientError, NoMetricFoundError, RepairError
from .generation import GeneratedQuery, check_promql, generate
from .gpu import VendorPrefixConfig, discover_gpu_metrics, merge_discovery
from .intent import IntentLexicon, IntentResult, IntentType, detect_intent
from .keywords import generate_keywords
from .promclient import QueryResult
from .selection import (
    ScoredMetric,
    ScoringConfig,
    extract_category_hints,
    rank_candidates,
)
from .temporal import TimeRangeInfo, resolve_time
from .validation import apply_report, validate_catalog

__all__ = [
    "DiscoveryPath",
    "PipelineAnswer",
    "SmartDiscoveryService",
    "FALLBACK_CANDIDATE_CAP",
    "range_step",
    "answer_to_dict",
    "entry_to_dict",
    "scored_to_dict",
    "intent_to_dict",
    "time_to_dict",
    "query_result_to_dict",
]

#: Most metric names the API fallback will fetch metadata for.
FALLBACK_CANDIDATE_CAP = 200

#: Aim for about this many points in a range query.
TARGET_RANGE_POINTS = 250
MIN_STEP_SECONDS = 15


class DiscoveryPath(str, Enum):
    catalog = "catalog"
    api_fallback = "api_fallback"


@dataclass
class PipelineAnswer:
    question: str
    intent: IntentResult
    time: TimeRangeInfo
    selection: ScoredMetric
    alternatives: list[ScoredMetric]
    candidates_considered: int
    query: GeneratedQuery
    path: DiscoveryPath
    execution: QueryResult | None = None
    execution_error: str | None = None
    timings_ms: dict[str, float] = field(default_factory=dict)


def range_step(duration_seconds: int) -> int:
    """Range-query resolution: about 250 points, never finer than 15s."""
    return max(duration_seconds // TARGET_RANGE_POINTS, MIN_STEP_SECONDS)


def _question_tokens(question: str) -> list[str]:
    parts = [t for t in "".join(c if c.isalnum() else " " for c in question.lower()).split()]
    return [t for t in parts if len(t) >= 3]


class SmartDiscoveryService:
    """Pipeline facade over a catalog store and an optional query client."""

    def __init__(
        self,
        store: CatalogStore,
        client=None,
        *,
        lexicon: IntentLexicon | None = None,
        scoring: ScoringConfig | None = None,
        keyword_rules=None,
        vendor_prefixes: VendorPrefixConfig | None = None,
        priority_patterns=None,
        default_window: int = 3600,
        calendar_day_boundaries: bool = False,
        gpu_deadline: float = 10.0,
    ):
        from . import config

        self.store = store
        self.client = client
        self.lexicon = lexicon or config.default_intent_lexicon()
        self.scoring = scoring or config.default_scoring_config()
        self.keyword_rules = keyword_rules or config.default_keyword_rules()
        self.vendor_prefixes = vendor_prefixes or VendorPrefixConfig()
        self.priority_patterns = priority_patterns or config.default_gpu_priority_patterns()
        self.default_window = default_window
        self.calendar_day_boundaries = calendar_day_boundaries
        self.gpu_deadline = gpu_deadline
        self.gpu_done = threading.Event()
        self.validation_done = threading.Event()
        self.gpu_error: str | None = None
        self.validation_error: str | None = None
        self.gpu_result = None

    # ------------------------------------------------------------------
    # pipeline stages

    def detect(self, question: str) -> IntentResult:
        return detect_intent(question, self.lexicon)

    def resolve(
        self,
        question: str,
        *,
        now: float | None = None,
        explicit: tuple[float, float] | None = None,
    ) -> TimeRangeInfo:
        return resolve_time(
            question,
            now=int(now if now is not None else _time.time()),
            explicit=explicit,
            default_window=self.default_window,
            calendar_day_boundaries=self.calendar_day_boundaries,
        )

    def select(
        self, question: str, intent: IntentResult
    ) -> tuple[list[ScoredMetric], DiscoveryPath]:
        """Ranked candidates for the question and which path produced them."""
        catalog = self.store.snapshot()
        hints = extract_category_hints(question, catalog.category_keywords)
        candidates = metrics_in_categories(
            catalog, sorted(hints), include_medium=bool(hints)
        )
        if candidates:
            ranked = rank_candidates(question, intent, candidates, self.scoring)
            return ranked, DiscoveryPath.catalog
        return self._api_fallback(question, intent), DiscoveryPath.api_fallback

    def _api_fallback(self, question: str, intent: IntentResult) -> list[ScoredMetric]:
        """Search live names when the catalog had nothing to offer.

        Substring-matches question tokens against every live name, caps the
        candidate list, then fetches metadata per candidate to build
        throwaway entries scored with the normal ranking.
        """
        if self.client is None:
            raise NoMetricFoundError(
                f"no catalog candidates for {question!r} and no client for fallback"
            )
        tokens = _question_tokens(question)
        names = sorted(self.client.list_metric_names())
        matches = [n for n in names if any(t in n.lower() for t in tokens)]
        matches = matches[:FALLBACK_CANDIDATE_CAP]
        if not matches:
            raise NoMetricFoundError(
                f"no live metric name matches question tokens {tokens!r}"
            )
        entries = []
        for name in matches:
            meta = self.client.fetch_metadata(name)
            try:
                mtype = MetricType(meta.type)
            except ValueError:
                mtype = MetricType.gauge
            entries.append(
                MetricEntry(
                    name=name,
                    metric_type=mtype,
                    help=meta.help,
                    priority=Priority.medium,
                    keywords=tuple(
                        generate_keywords(
                            name, mtype, meta.help, self.keyword_rules, tiers=(2, 3, 4, 5)
                        )
                    ),
                    category="observability",
                )
            )
        return rank_candidates(question, intent, entries, self.scoring)

    def smart_discover(
        self,
        question: str,
        *,
        explicit_range: tuple[float, float] | None = None,
        execute: bool = False,
        now: float | None = None,
    ) -> PipelineAnswer:
        timings: dict[str, float] = {}
        t0 = _time.perf_counter()

        t = _time.perf_counter()
        intent = self.detect(question)
        timings["detect_ms"] = (_time.perf_counter() - t) * 1000

        t = _time.perf_counter()
        window = self.resolve(question, now=now, explicit=explicit_range)
        timings["resolve_ms"] = (_time.perf_counter() - t) * 1000

        t = _time.perf_counter()
        ranked, path = self.select(question, intent)
        timings["select_ms"] = (_time.perf_counter() - t) * 1000

        t = _time.perf_counter()
        query = generate(ranked[0].entry, intent, window)
        timings["generate_ms"] = (_time.perf_counter() - t) * 1000

        answer = PipelineAnswer(
            question=question,
            intent=intent,
            time=window,
            selection=ranked[0],
            alternatives=ranked[1:4],
            candidates_considered=len(ranked),
            query=query,
            path=path,
        )
        if execute:
            t = _time.perf_counter()
            self._execute_into(answer)
            timings["execute_ms"] = (_time.perf_counter() - t) * 1000
        timings["total_ms"] = (_time.perf_counter() - t0) * 1000
        answer.timings_ms = timings
        return answer

    def _execute_into(self, answer: PipelineAnswer) -> None:
        if self.client is None:
            answer.execution_error = "no query client configured"
            return
        try:
            if answer.intent.intent is IntentType.current_value:
                answer.execution = self.client.instant_query(
                    answer.query.query, at=answer.time.end
                )
            else:
                answer.execution = self.client.range_query(
                    answer.query.query,
                    answer.time.start,
                    answer.time.end,
                    range_step(answer.time.duration_seconds),
                )
        except ClientError as exc:
            answer.execution_error = str(exc)

    # ------------------------------------------------------------------
    # catalog operations used by tools

    def search_metrics(self, query: str, limit: int = 20) -> list[MetricEntry]:
        tokens = _question_tokens(query)
        if not tokens:
            return []
        catalog = self.store.snapshot()
        scored: list[tuple[int, MetricEntry]] = []
        for rows in catalog.categories.values():
            for e in rows:
                name = e.name.lower()
                hay = " ".join(e.keywords)
                score = sum(2 for t in tokens if t in name) + sum(
                    1 for t in tokens if t in hay
                )
                if score:
                    scored.append((score, e))
        scored.sort(key=lambda pair: (-pair[0], pair[1].name))
        return [e for _, e in scored[:limit]]

    def get_metric_metadata(self, name: str) -> MetricEntry:
        catalog = self.store.snapshot()
        if name not in catalog.flat_lookup:
            raise NoMetricFoundError(f"metric {name!r} is not in the catalog")
        return _entry_of(catalog, name)

    def list_categories(self) -> list[dict]:
        catalog = self.store.snapshot()
        out = []
        for category in sorted(catalog.categories):
            rows = catalog.categories[category]
            out.append(
                {
                    "id": category,
                    "metric_count": len(rows),
                    "high_priority_count": sum(
                        1 for e in rows if e.priority is Priority.high
                    ),
                }
            )
        return out

    def stats(self) -> dict:
        catalog = self.store.snapshot()
        s = catalog_stats(catalog)
        return {
            "version": catalog.source_version,
            "total_metrics": s.total_metrics,
            "per_category": dict(sorted(s.per_category.items())),
            "per_priority": dict(sorted(s.per_priority.items())),
        }

    def validate_query(self, query: str) -> dict:
        problems = check_promql(query)
        return {"valid": not problems, "problems": problems}

    def repair_query(self, query: str, window: TimeRangeInfo) -> dict:
        from .generation import repair

        try:
            fixed, applied = repair(query, window)
        except RepairError as exc:
            return {"repaired": exc.original, "repairs": [], "error": str(exc)}
        return {"repaired": fixed, "repairs": [r.value for r in applied], "error": None}

    # ------------------------------------------------------------------
    # background refresh

    def run_gpu_discovery(self) -> None:
        """One discovery attempt with a hard deadline; always marks done."""
        try:
            if self.client is None:
                return
            with concurrent.futures.ThreadPoolExecutor(max_workers=1) as pool:
                future = pool.submit(
                    discover_gpu_metrics,
                    self.client,
                    self.vendor_prefixes,
                    self.priority_patterns,
                    self.keyword_rules,
                )
                result = future.result(timeout=self.gpu_deadline)
            self.gpu_result = result
            self.store.update(lambda catalog: merge_discovery(catalog, result))
        except concurrent.futures.TimeoutError:
            self.gpu_error = f"GPU discovery exceeded {self.gpu_deadline:.0f}s deadline"
        except ClientError as exc:
            self.gpu_error = str(exc)
        finally:
            self.gpu_done.set()

    def run_validation(self) -> None:
        try:
            if self.client is None:
                return
            live = self.client.list_metric_names()
            report = validate_catalog(
                self.store.snapshot(), live, self.vendor_prefixes
            )
            if not report.is_noop:
                self.store.update(
                    lambda catalog: apply_report(catalog, report, self.keyword_rules)
                )
        except ClientError as exc:
            self.validation_error = str(exc)
        finally:
            self.validation_done.set()

    def start_background(self) -> list[threading.Thread]:
        threads = [
            threading.Thread(target=self.run_gpu_discovery, daemon=True, name="gpu-discovery"),
            threading.Thread(target=self.run_validation, daemon=True, name="catalog-validation"),
        ]
        for t in threads:
            t.start()
        return threads


def _entry_of(catalog: Catalog, name: str) -> MetricEntry:
    category, _ = catalog.flat_lookup[name]
    for entry in catalog.categories[category]:
        if entry.name == name:
            return entry
    raise KeyError(name)


# --------------------------------------------------------------------------
# JSON-friendly serialization shared by the RPC layer and the CLI


def entry_to_dict(entry: MetricEntry) -> dict:
    return {
        "name": entry.name,
        "type": entry.metric_type.value,
        "help": entry.help,
        "priority": entry.priority.value,
        "keywords": list(entry.keywords),
        "category": entry.category,
    }


def intent_to_dict(intent: IntentResult) -> dict:
    return {
        "intent": intent.intent.value,
        "measurements": sorted(intent.measurements),
        "domain_terms": sorted(intent.domain_terms),
        "matched_triggers": list(intent.matched_triggers),
    }


def time_to_dict(window: TimeRangeInfo) -> dict:
    return {
        "start": window.start,
        "end": window.end,
        "duration_seconds": window.duration_seconds,
        "duration_text": window.duration_text,
        "rate_syntax": window.rate_syntax,
        "strategy": window.strategy.value,
    }


def scored_to_dict(scored: ScoredMetric) -> dict:
    return {
        "metric": entry_to_dict(scored.entry),
        "score": {
            "keyword": scored.s_keyword,
            "type": scored.s_type,
            "specificity": scored.s_specificity,
            "priority": scored.s_priority,
            "total": scored.s_total,
        },
        "matched_patterns": [
            {"id": pid, "weight": weight} for pid, weight in scored.matched_patterns
        ],
    }


def query_result_to_dict(result: QueryResult) -> dict:
    return {
        "result_type": result.result_type,
        "series": [
            {"labels": s.labels_dict(), "samples": [list(p) for p in s.samples]}
            for s in result.series
        ],
        "warnings": list(result.warnings),
    }


def answer_to_dict(answer: PipelineAnswer) -> dict:
    return {
        "question": answer.question,
        "intent": intent_to_dict(answer.intent),
        "time": time_to_dict(answer.time),
        "selection": scored_to_dict(answer.selection),
        "alternatives": [scored_to_dict(s) for s in answer.alternatives],
        "promql": answer.query.query,
        "template_id": answer.query.template_id,
        "repairs": [r.value for r in answer.query.repairs],
        "by_label": answer.query.by_label,
        "path": answer.path.value,
        "execution": (
            query_result_to_dict(answer.execution) if answer.execution else None
        ),
        "execution_error": answer.execution_error,
        "timings_ms": {k: round(v, 3) for k, v in answer.timings_ms.items()},
    }
