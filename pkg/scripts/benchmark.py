#!/usr/bin/env python3
"""Timing report for the hot paths: catalog load, category filtering,
time resolution, and the full question pipeline."""

import argparse
import statistics
import sys
import time

from nl2promql.catalog import CatalogStore, load_catalog, metrics_in_categories
from nl2promql.catalog import dump_catalog
from nl2promql.pipeline import SmartDiscoveryService
from nl2promql.synth import generate_catalog
from nl2promql.temporal import resolve_time

QUESTIONS = [
    "What is the GPU temperature right now?",
    "Compare token throughput across models since yesterday",
    "p99 request latency over the last 6 hours",
    "How many pods are running?",
    "top 5 busiest nodes by cpu",
]

TIME_EXPRESSIONS = [
    "last 6 hours", "past 30 minutes", "yesterday", "7d", "this week",
    "2 days ago", "since january 15", "", "last 90 minutes", "past 2 weeks",
]


def timed(label: str, fn, repeat: int = 5) -> None:
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append((time.perf_counter() - t0) * 1000)
    print(f"{label:<38} median {statistics.median(runs):8.3f} ms  "
          f"min {min(runs):8.3f} ms")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--total", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    catalog = generate_catalog(total=args.total, seed=args.seed)
    raw = dump_catalog(catalog)
    print(f"synthetic catalog: {args.total} metrics")

    timed("load_catalog", lambda: load_catalog(raw))
    timed("metrics_in_categories (hinted)",
          lambda: metrics_in_categories(catalog, ["gpu_ai"]))
    timed("metrics_in_categories (all High)",
          lambda: metrics_in_categories(catalog, [], include_medium=False))

    now = int(time.time())

    def resolve_all():
        for expr in TIME_EXPRESSIONS:
            resolve_time(expr, now=now)

    timed(f"resolve_time x{len(TIME_EXPRESSIONS)}", resolve_all)

    service = SmartDiscoveryService(CatalogStore(catalog))

    def pipeline_all():
        for q in QUESTIONS:
            service.smart_discover(q, now=now)

    timed(f"smart_discover x{len(QUESTIONS)}", pipeline_all)
    return 0


if __name__ == "__main__":
    sys.exit(main())
