"""Shared test utilities: frozen reference times, catalog builders, an
independent scoring oracle, and a minimal HTTP server that serves recorded
API fixtures to the live client."""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qsl, urlsplit

from nl2promql.catalog import MetricEntry, MetricType, Priority, build_catalog
from nl2promql.promclient import canonical_key

# 2026-01-01 00:00:00 UTC; every recorded query fixture uses this instant.
NOW_PIPELINE = 1767225600

# 2026-03-11 15:30:00 UTC, a Wednesday; anchor for calendar expectations.
NOW_TEMPORAL = 1773243000

FIXTURES = Path(__file__).parent / "fixtures" / "prom"


def make_entry(
    name: str,
    mtype: str = "gauge",
    priority: str = "Medium",
    keywords: tuple[str, ...] = (),
    category: str = "observability",
    help_text: str = "",
) -> MetricEntry:
    return MetricEntry(
        name=name,
        metric_type=MetricType(mtype),
        help=help_text,
        priority=Priority(priority),
        keywords=keywords,
        category=category,
    )


def small_catalog(entries: list[MetricEntry], version: str = "test", keywords=None):
    categories: dict[str, list[MetricEntry]] = {}
    for e in entries:
        categories.setdefault(e.category, []).append(e)
    return build_catalog(categories, version, keywords)


# --------------------------------------------------------------------------
# Independent scoring oracle.
#
# Deliberately re-derives every score from the shipped scoring config with
# plain loops and its own copies of the scoring constants. It shares no code
# with the ranking implementation, so agreement between the two is a real
# cross-check rather than a tautology.

_ORACLE_PREFERRED = {
    ("percentile", "histogram"),
    ("rate", "counter"),
    ("current_value", "gauge"),
    ("trend", "gauge"),
    ("count", "gauge"),
    ("count", "counter"),
}
_ORACLE_PRIORITY_BONUS = {"High": 15, "Medium": 5}


def oracle_score(question: str, entry: MetricEntry, intent_value: str, scoring_doc: dict) -> int:
    q = " ".join(question.lower().split())
    fields = [entry.name.lower()] + [k.lower() for k in entry.keywords]
    total = 0
    for pattern in scoring_doc["patterns"]:
        asked = False
        for term in pattern["question"]:
            if re.search(r"\b" + re.escape(term.lower()) + r"\b", q):
                asked = True
                break
        if not asked:
            continue
        mentioned = False
        for term in pattern["metric"]:
            if any(term.lower() in f for f in fields):
                mentioned = True
                break
        if mentioned:
            total += pattern["weight"]
    if (intent_value, entry.metric_type.value) in _ORACLE_PREFERRED:
        total += scoring_doc["type_match_bonus"]
    tokens = [t for t in re.split(r"[_:]+", entry.name) if t]
    total += min(
        scoring_doc["specificity_cap"],
        scoring_doc["specificity_per_token"] * max(0, len(tokens) - 1),
    )
    total += _ORACLE_PRIORITY_BONUS.get(entry.priority.value, 0)
    return total


def oracle_rank(question: str, entries: list[MetricEntry], intent_value: str, scoring_doc: dict) -> list[str]:
    scored = [(oracle_score(question, e, intent_value, scoring_doc), e) for e in entries]
    scored.sort(key=lambda pair: (-pair[0], 0 if pair[1].priority.value == "High" else 1, pair[1].name))
    return [e.name for _, e in scored]


# --------------------------------------------------------------------------
# Fixture-backed HTTP server for live-client parity tests.


class FixtureHTTPServer:
    """Serves a fixture directory over real HTTP with the same request
    matching the replay client uses."""

    def __init__(self, directory: Path):
        fixtures = {}
        for path in sorted(Path(directory).glob("*.json")):
            doc = json.loads(path.read_text())
            key = canonical_key(doc["path"], doc.get("params", {}))
            fixtures[key] = (int(doc.get("status", 200)), doc.get("response", {}))

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                split = urlsplit(self.path)
                params = dict(parse_qsl(split.query))
                hit = fixtures.get(canonical_key(split.path, params))
                if hit is None:
                    status, body = 404, {"status": "error", "error": "no fixture recorded"}
                else:
                    status, body = hit
                payload = json.dumps(body).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def __enter__(self) -> "FixtureHTTPServer":
        self._thread.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self._server.shutdown()
        self._server.server_close()
