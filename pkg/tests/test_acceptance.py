"""End-to-end acceptance checks.

Each test exercises one headline guarantee of the package at its stated
tolerance and records a PASS or FAIL line that pytest prints in its
terminal summary. The checks here deliberately recompute expectations
with independent logic (brute-force rescoring, index recomputation,
recorded fixtures) rather than trusting the implementation under test.
"""

import json
import random
import re
import time

import pytest

from nl2promql.catalog import (
    CatalogStore,
    Priority,
    dump_catalog,
    load_catalog,
    metrics_in_categories,
)
from nl2promql.config import (
    bundled_json,
    default_category_keywords,
    default_intent_lexicon,
    default_keyword_rules,
    default_scoring_config,
    load_bundled_catalog,
)
from nl2promql.errors import RepairError
from nl2promql.generation import check_promql, generate, repair
from nl2promql.gpu import DiscoveryResult, VendorPrefixConfig, merge_discovery
from nl2promql.intent import IntentType, detect_intent
from nl2promql.pipeline import SmartDiscoveryService
from nl2promql.promclient import METADATA_PATH, FixtureClient, PrometheusClient
from nl2promql.rpc import (
    INTERNAL_ERROR,
    INVALID_PARAMS,
    INVALID_REQUEST,
    METHOD_NOT_FOUND,
    PARSE_ERROR,
    TOOLS,
    handle_rpc,
)
from nl2promql.selection import rank_candidates
from nl2promql.synth import generate_catalog
from nl2promql.temporal import Strategy, resolve_time
from nl2promql.validation import apply_report, validate_catalog

from .helpers import (
    FIXTURES,
    NOW_PIPELINE,
    NOW_TEMPORAL,
    FixtureHTTPServer,
    make_entry,
    oracle_rank,
    oracle_score,
)
from .test_temporal import RESOLUTION_TABLE

WALKTHROUGHS = [
    (
        "What is the TTFT for my vLLM deployment?",
        "histogram_quantile(0.95, "
        "sum(rate(vllm:time_to_first_token_seconds_bucket[1h])) by (le))",
    ),
    (
        "How has GPU temperature changed over the last 6 hours?",
        "avg_over_time(DCGM_FI_DEV_GPU_TEMP[6h])",
    ),
    (
        "Compare token throughput across models since yesterday",
        "sum by (model_name)(rate(vllm:generation_tokens_total[1d]))",
    ),
]


def _bundled_service(client=None) -> SmartDiscoveryService:
    return SmartDiscoveryService(CatalogStore(load_bundled_catalog()), client)


def test_walkthrough_questions_answered_byte_exact(acceptance):
    passed = False
    detail = ""
    try:
        service = _bundled_service()
        elapsed = []
        for question, expected in WALKTHROUGHS:
            t0 = time.perf_counter()
            answer = service.smart_discover(question, now=NOW_PIPELINE)
            dt = time.perf_counter() - t0
            elapsed.append(dt)
            assert answer.query.query == expected, question
            assert dt < 1.0, f"{question!r} took {dt:.3f}s"
        passed = True
        detail = f"3/3 byte-exact, slowest {max(elapsed) * 1000:.1f}ms"
    finally:
        acceptance.record(
            1, "walkthrough questions produce byte-exact PromQL in under 1s",
            passed, detail,
        )


def test_score_breakdown_is_additive_everywhere(acceptance):
    passed = False
    detail = ""
    try:
        catalog = load_bundled_catalog()
        lexicon = default_intent_lexicon()
        scoring = default_scoring_config()
        entries = [e for rows in catalog.categories.values() for e in rows]

        # The TTFT walkthrough decomposes as two keyword patterns (+20 exact
        # term, +15 framework term) plus the High-priority bonus (+15).
        question = WALKTHROUGHS[0][0]
        intent = detect_intent(question, lexicon)
        top = rank_candidates(question, intent, entries, scoring)[0]
        assert top.entry.name == "vllm:time_to_first_token_seconds"
        assert dict(top.matched_patterns) == {"ttft_exact": 20, "vllm": 15}
        assert top.s_keyword == 35
        assert top.s_priority == 15
        assert top.s_total == 58

        questions = [q for q, _ in WALKTHROUGHS] + [
            "p99 GPU cache usage",
            "rate of generated tokens",
            "how many requests are waiting",
            "average memory temperature this week",
            "compare SM utilization across nodes",
            "top 5 models by latency",
            "current power draw",
            "how has PCIe throughput changed",
            "total NVLink bandwidth today",
            "inference queue time over 30 minutes",
        ]
        checked = 0
        for q in questions:
            q_intent = detect_intent(q, lexicon)
            for scored in rank_candidates(q, q_intent, entries, scoring):
                parts = (
                    scored.s_keyword
                    + scored.s_type
                    + scored.s_specificity
                    + scored.s_priority
                )
                assert scored.s_total == parts, scored.entry.name
                pattern_sum = sum(w for _, w in scored.matched_patterns)
                assert scored.s_keyword == pattern_sum, scored.entry.name
                checked += 1
        passed = True
        detail = f"TTFT = 20+15 keyword +15 priority; {checked} scores additive"
    finally:
        acceptance.record(
            2, "scores decompose additively into keyword, type, specificity, priority",
            passed, detail,
        )


def test_time_expressions_resolve_exactly_and_fast(acceptance):
    passed = False
    detail = ""
    try:
        assert len(RESOLUTION_TABLE) >= 25
        for question, duration, rate, strategy in RESOLUTION_TABLE:
            info = resolve_time(question, now=NOW_TEMPORAL)
            assert info.duration_seconds == duration, question
            assert info.rate_syntax == rate, question
            assert info.strategy is strategy, question

        # Spot checks with the expectations written out literally.
        assert resolve_time("", now=NOW_TEMPORAL).rate_syntax == "[1h]"
        assert resolve_time("", now=NOW_TEMPORAL).strategy is Strategy.default
        six = resolve_time("last 6 hours", now=NOW_TEMPORAL)
        assert (six.duration_seconds, six.rate_syntax) == (21600, "[6h]")
        day = resolve_time("yesterday", now=NOW_TEMPORAL)
        assert (day.duration_seconds, day.rate_syntax) == (86400, "[1d]")
        week = resolve_time("7d", now=NOW_TEMPORAL)
        assert (week.duration_seconds, week.rate_syntax) == (604800, "[7d]")

        rotation = [q for q, _, _, _ in RESOLUTION_TABLE[:8]]
        iterations = 10_000
        t0 = time.perf_counter()
        for i in range(iterations):
            resolve_time(rotation[i % len(rotation)], now=NOW_TEMPORAL)
        per_call = (time.perf_counter() - t0) / iterations
        assert per_call < 0.001, f"{per_call * 1000:.3f}ms per call"
        passed = True
        detail = (
            f"{len(RESOLUTION_TABLE)} expressions exact, "
            f"{per_call * 1_000_000:.0f}us per call over {iterations} calls"
        )
    finally:
        acceptance.record(
            3, "25+ time expressions resolve exactly at under 1ms per call",
            passed, detail,
        )


def test_category_hints_bound_the_candidate_pool(acceptance):
    passed = False
    detail = ""
    try:
        catalog = generate_catalog(total=2000, seed=42)
        service = SmartDiscoveryService(CatalogStore(catalog))

        hinted_q = "What is the GPU utilization right now?"
        intent = detect_intent(hinted_q, service.lexicon)
        ranked, path = service.select(hinted_q, intent)
        assert path.value == "catalog"
        assert 30 <= len(ranked) <= 80, len(ranked)
        assert all(s.entry.category == "gpu_ai" for s in ranked)
        assert any(s.entry.priority is Priority.medium for s in ranked)

        unhinted_q = "How are things right now?"
        intent = detect_intent(unhinted_q, service.lexicon)
        broad, path = service.select(unhinted_q, intent)
        assert path.value == "catalog"
        high_count = sum(
            1
            for rows in catalog.categories.values()
            for e in rows
            if e.priority is Priority.high
        )
        assert len(broad) == high_count == 350
        assert all(s.entry.priority is Priority.high for s in broad)
        passed = True
        detail = f"hinted {len(ranked)} candidates, unhinted {len(broad)} High-only"
    finally:
        acceptance.record(
            4, "hinted questions see 30-80 candidates, unhinted fall back to 350 High",
            passed, detail,
        )


def _fuzz_bases():
    """Clean generated queries paired with the window used to build them."""
    catalog = load_bundled_catalog()
    lexicon = default_intent_lexicon()
    prompts = {
        IntentType.current_value: "what is the usage",
        IntentType.rate: "rate of requests",
        IntentType.trend: "how has it changed",
        IntentType.comparison: "compare usage across models",
        IntentType.percentile: "p99 latency",
        IntentType.count: "how many pods",
        IntentType.average: "average usage",
        IntentType.top_n: "top 5 consumers",
    }
    intents = {}
    for expected, text in prompts.items():
        result = detect_intent(text, lexicon)
        assert result.intent is expected, text
        intents[expected] = result
    windows = [
        resolve_time("", now=NOW_PIPELINE),
        resolve_time("last 6 hours", now=NOW_PIPELINE),
        resolve_time("since yesterday", now=NOW_PIPELINE),
    ]
    bases = []
    seen = set()
    for rows in catalog.categories.values():
        for entry in rows:
            for intent in intents.values():
                for window in windows:
                    query = generate(entry, intent, window).query
                    key = (query, window.rate_syntax)
                    if key not in seen:
                        seen.add(key)
                        bases.append((query, window))
    return bases


def _mutate_drop_closer(rng, q):
    spots = [i for i, c in enumerate(q) if c in ")]}"]
    if not spots:
        return None
    i = rng.choice(spots)
    return q[:i] + q[i + 1:]


def _mutate_duplicate_closer(rng, q):
    spots = [i for i, c in enumerate(q) if c in ")]}"]
    if not spots:
        return None
    i = rng.choice(spots)
    return q[: i + 1] + q[i] + q[i + 1:]


def _mutate_trailing_comma(rng, q):
    spots = [i for i, c in enumerate(q) if c == "}"]
    if not spots:
        return None
    i = rng.choice(spots)
    return q[:i] + rng.choice([",", ", ", " ,"]) + q[i:]


def _mutate_strip_range(rng, q):
    spans = list(re.finditer(r"\[[^\]]*\]", q))
    if not spans:
        return None
    span = rng.choice(spans)
    return q[: span.start()] + q[span.end():]


def _mutate_truncate(rng, q):
    spots = [i for i, c in enumerate(q) if c in "()[]{}," and i > 0]
    if not spots:
        return None
    return q[: rng.choice(spots)]


def _mutate_append_range(rng, q):
    if "(" in q or "[" in q:
        return None
    return q + rng.choice(["[5m]", "[30m]", "[1h]"])


_MUTATIONS = [
    _mutate_drop_closer,
    _mutate_duplicate_closer,
    _mutate_trailing_comma,
    _mutate_strip_range,
    _mutate_truncate,
    _mutate_append_range,
]


def test_fuzzed_queries_repair_cleanly(acceptance):
    passed = False
    detail = ""
    try:
        bases = _fuzz_bases()
        assert bases
        rng = random.Random(99)
        corpus_target = 10_000
        repaired = rejected = 0
        index = 0
        while repaired + rejected < corpus_target:
            base, window = bases[index % len(bases)]
            index += 1
            mutant = None
            for _ in range(8):
                candidate = rng.choice(_MUTATIONS)(rng, base)
                if candidate is not None and candidate != base:
                    mutant = candidate
                    break
            if mutant is None:
                continue
            try:
                fixed, applied = repair(mutant, window)
            except RepairError as exc:
                assert exc.original == mutant
                rejected += 1
                continue
            issues = check_promql(fixed)
            assert issues == [], (mutant, fixed, issues)
            again, applied_again = repair(fixed, window)
            assert again == fixed, mutant
            assert applied_again == [], mutant
            repaired += 1
        total = repaired + rejected
        assert total >= corpus_target
        assert repaired >= total * 0.6, f"only {repaired}/{total} repairable"
        passed = True
        detail = f"{total} mutants: {repaired} repaired clean, {rejected} rejected"
    finally:
        acceptance.record(
            5, "10,000 fuzzed queries repair to clean PromQL, idempotently",
            passed, detail,
        )


def _recompute_index(catalog):
    flat = {}
    for category, rows in catalog.categories.items():
        for entry in rows:
            assert entry.category == category, entry.name
            assert entry.name not in flat, entry.name
            flat[entry.name] = (category, entry.priority)
    return flat


def test_catalog_operations_fast_and_index_stays_consistent(acceptance):
    passed = False
    detail = ""
    try:
        keywords = default_category_keywords()
        big = generate_catalog(total=2000, seed=42)
        text = dump_catalog(big)
        load_times = []
        for _ in range(5):
            t0 = time.perf_counter()
            loaded = load_catalog(text, keywords)
            load_times.append(time.perf_counter() - t0)
        load_ms = sorted(load_times)[len(load_times) // 2] * 1000
        assert load_ms < 50, f"load took {load_ms:.1f}ms"
        assert loaded.flat_lookup == big.flat_lookup

        filter_times = []
        for _ in range(5):
            t0 = time.perf_counter()
            hinted = metrics_in_categories(loaded, ["gpu_ai"], include_medium=True)
            unhinted = metrics_in_categories(loaded, [], include_medium=False)
            filter_times.append(time.perf_counter() - t0)
        filter_ms = sorted(filter_times)[len(filter_times) // 2] * 1000
        assert filter_ms < 10, f"filtering took {filter_ms:.1f}ms"
        assert hinted and unhinted

        rng = random.Random(7)
        vendor = VendorPrefixConfig()
        rules = default_keyword_rules()
        catalog = generate_catalog(
            total=400, seed=3, gpu_total=20, gpu_high=10, high_per_category=5
        )
        rounds = 0
        for _ in range(20):
            if rng.random() < 0.5:
                fresh = [
                    make_entry(
                        f"nvidia_gpu_churn_{rng.randrange(10**6)}",
                        rng.choice(["gauge", "counter"]),
                        rng.choice(["High", "Medium"]),
                        category="gpu_ai",
                    )
                    for _ in range(rng.randint(1, 5))
                ]
                result = DiscoveryResult(
                    entries=sorted(fresh, key=lambda e: e.name),
                    primary_vendor="nvidia",
                    match_counts={"nvidia": len(fresh)},
                )
                catalog = merge_discovery(catalog, result)
            else:
                names = list(catalog.flat_lookup)
                plain = [n for n in names if not vendor.matches(n)]
                removed = set(rng.sample(plain, k=min(rng.randint(0, 5), len(plain))))
                added = [
                    f"churn_adopted_{rng.randrange(10**6)}_total"
                    for _ in range(rng.randint(0, 5))
                ]
                live = [n for n in names if n not in removed] + added
                report = validate_catalog(catalog, live, vendor)
                catalog = apply_report(catalog, report, rules)
            assert _recompute_index(catalog) == catalog.flat_lookup
            rounds += 1
        passed = True
        detail = (
            f"load {load_ms:.1f}ms, filter {filter_ms:.2f}ms, "
            f"{rounds} merge/validate rounds kept the index bijective"
        )
    finally:
        acceptance.record(
            6, "catalog loads <50ms, filters <10ms, index survives random churn",
            passed, detail,
        )


def test_validation_reconciles_against_live_names(acceptance):
    passed = False
    detail = ""
    try:
        catalog = generate_catalog(total=1995, seed=7)
        assert len(catalog.flat_lookup) == 1995
        vendor = VendorPrefixConfig()
        plain = sorted(n for n in catalog.flat_lookup if not vendor.matches(n))
        stale = plain[:8]
        adopted = [
            "coredns_panic_recoveries_total",
            "etcd_wal_fsync_pending",
            "node_thermal_throttle_events_total",
            "prometheus_notifications_dropped_total",
            "scheduler_preemption_attempts_total",
        ]
        assert not any(vendor.matches(n) for n in adopted)
        live = [n for n in catalog.flat_lookup if n not in set(stale)] + adopted

        report = validate_catalog(catalog, live, vendor)
        assert sorted(report.stale) == sorted(stale)
        assert len(report.stale) == 8
        assert sorted(n for n, _ in report.adopted) == sorted(adopted)
        assert len(report.adopted) == 5

        updated = apply_report(catalog, report, default_keyword_rules())
        assert len(updated.flat_lookup) == 1995 - 8 + 5 == 1992
        assert not any(n in updated.flat_lookup for n in stale)
        assert all(n in updated.flat_lookup for n in adopted)
        passed = True
        detail = "1995 - 8 stale + 5 adopted = 1992 metrics"
    finally:
        acceptance.record(
            7, "live-name reconciliation drops stale and adopts new metrics exactly",
            passed, detail,
        )


def test_ranking_agrees_with_brute_force_scoring(acceptance):
    passed = False
    detail = ""
    try:
        rng = random.Random(2026)
        lexicon = default_intent_lexicon()
        scoring = default_scoring_config()
        scoring_doc = bundled_json("scoring.json")
        openers = [
            "what is the", "show", "rate of", "compare", "p99", "p95",
            "average", "how many", "top 3", "top 7", "trend of", "current",
        ]
        subjects = [
            "gpu", "temperature", "tokens", "memory", "latency", "requests",
            "pods", "etcd leader", "dns lookups", "scheduler queue",
            "disk io", "network traffic", "cache usage", "throughput",
            "utilization", "errors",
        ]
        tails = [
            "", "right now", "over the last 6 hours", "since yesterday",
            "last 7 days", "by model",
        ]
        comparisons = 0
        for _ in range(100):
            total = rng.randint(40, 100)
            catalog = generate_catalog(
                total=total,
                seed=rng.randrange(10**6),
                gpu_total=6,
                gpu_high=3,
                high_per_category=2,
            )
            entries = [e for rows in catalog.categories.values() for e in rows]
            for _ in range(50):
                question = " ".join(
                    part
                    for part in (
                        rng.choice(openers), rng.choice(subjects), rng.choice(tails)
                    )
                    if part
                )
                intent = detect_intent(question, lexicon)
                ranked = rank_candidates(question, intent, entries, scoring)
                names = [s.entry.name for s in ranked]
                expected = oracle_rank(
                    question, entries, intent.intent.value, scoring_doc
                )
                assert names == expected, question
                for scored in ranked[:3]:
                    assert scored.s_total == oracle_score(
                        question, scored.entry, intent.intent.value, scoring_doc
                    ), (question, scored.entry.name)
                comparisons += 1
        passed = True
        detail = f"{comparisons} rankings on 100 catalogs matched brute force"
    finally:
        acceptance.record(
            8, "ranking agrees with brute-force rescoring on random catalogs",
            passed, detail,
        )


def _strip_timings(doc):
    if isinstance(doc, dict):
        return {
            k: _strip_timings(v) for k, v in doc.items() if k != "timings_ms"
        }
    if isinstance(doc, list):
        return [_strip_timings(item) for item in doc]
    return doc


def _rpc(service, method, params, req_id):
    req = {"jsonrpc": "2.0", "id": req_id, "method": method, "params": params}
    return handle_rpc(service, json.dumps(req))


def test_tool_service_contract(acceptance):
    passed = False
    detail = ""
    try:
        assert len(TOOLS) == 12

        ex1_question, ex1_query = WALKTHROUGHS[0]
        requests = [
            ("catalog_stats", {}),
            ("list_categories", {}),
            ("search_metrics", {"query": "gpu temperature", "limit": 5}),
            ("get_metric_metadata", {"name": "DCGM_FI_DEV_GPU_TEMP"}),
            ("detect_intent", {"question": "p99 request latency"}),
            ("resolve_time_range", {"question": "last 6 hours", "now": NOW_PIPELINE}),
            ("select_metric", {"question": ex1_question}),
            ("validate_promql", {"query": "rate(x_total[5m])"}),
            ("generate_promql", {"question": ex1_question, "now": NOW_PIPELINE}),
            ("execute_query", {"query": "up"}),
            (
                "execute_range_query",
                {
                    "query": "avg_over_time(DCGM_FI_DEV_GPU_TEMP[6h])",
                    "start": NOW_PIPELINE - 21600,
                    "end": NOW_PIPELINE,
                    "step": 86,
                },
            ),
            (
                "smart_discover",
                {"question": ex1_question, "execute": True, "now": NOW_PIPELINE},
            ),
        ]
        assert sorted(m for m, _ in requests) == sorted(t.name for t in TOOLS)

        fixture_service = _bundled_service(FixtureClient(FIXTURES / "gpu_cluster"))
        with FixtureHTTPServer(FIXTURES / "gpu_cluster") as server:
            live_service = _bundled_service(
                PrometheusClient(server.base_url, timeout=5.0)
            )
            transcripts = {}
            for tag, service in (
                ("fixture", fixture_service),
                ("live", live_service),
            ):
                transcripts[tag] = [
                    _strip_timings(_rpc(service, method, params, i))
                    for i, (method, params) in enumerate(requests, start=1)
                ]
            live_service.client.close()
        assert transcripts["fixture"] == transcripts["live"]
        final = transcripts["fixture"][-1]["result"]
        assert final["promql"] == ex1_query
        assert final["execution"]["result_type"] == "vector"

        # The catalog path answered every question without metadata lookups.
        for service in (fixture_service, live_service):
            assert service.client.calls.get(METADATA_PATH, 0) == 0

        service = fixture_service
        assert handle_rpc(service, "{oops")["error"]["code"] == PARSE_ERROR
        assert handle_rpc(service, "42")["error"]["code"] == INVALID_REQUEST
        assert _rpc(service, "no_such_tool", {}, 1)["error"]["code"] == METHOD_NOT_FOUND
        assert _rpc(service, "detect_intent", {}, 2)["error"]["code"] == INVALID_PARAMS
        missing = _rpc(service, "get_metric_metadata", {"name": "ghost_metric"}, 3)
        assert missing["error"]["code"] == INTERNAL_ERROR
        notification = {"jsonrpc": "2.0", "method": "catalog_stats", "params": {}}
        assert handle_rpc(service, json.dumps(notification)) is None
        passed = True
        detail = "12 tools, 5 error codes, fixture and live transcripts identical"
    finally:
        acceptance.record(
            9, "12-tool JSON-RPC service behaves identically on fixture and live clients",
            passed, detail,
        )
