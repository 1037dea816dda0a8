#!/usr/bin/env python3
"""Run three demonstration questions against the bundled GPU catalog and
print each pipeline stage."""

import sys
import time

from nl2promql.catalog import CatalogStore
from nl2promql.config import load_bundled_catalog
from nl2promql.pipeline import SmartDiscoveryService

QUESTIONS = [
    "What is the TTFT for my vLLM deployment?",
    "How has GPU temperature changed over the last 6 hours?",
    "Compare token throughput across models since yesterday",
]


def main() -> int:
    service = SmartDiscoveryService(CatalogStore(load_bundled_catalog()))
    now = int(time.time())
    for question in QUESTIONS:
        answer = service.smart_discover(question, now=now)
        sel = answer.selection
        print(f"Q: {question}")
        print(f"   intent   {answer.intent.intent.value} "
              f"(triggers: {', '.join(answer.intent.matched_triggers) or 'none'})")
        print(f"   window   {answer.time.rate_syntax} via {answer.time.strategy.value}")
        print(f"   metric   {sel.entry.name}  score {sel.s_total}"
              f" (keyword {sel.s_keyword}, type {sel.s_type},"
              f" specificity {sel.s_specificity}, priority {sel.s_priority})")
        for alt in answer.alternatives:
            print(f"            runner-up {alt.entry.name} score {alt.s_total}")
        print(f"   promql   {answer.query.query}")
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
