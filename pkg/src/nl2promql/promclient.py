"""Prometheus HTTP API clients.

Two interchangeable implementations of the same four-call interface:

- :class:`PrometheusClient` talks to a real server over HTTP (bearer-token
  auth, configurable timeout).
- :class:`FixtureClient` replays recorded responses from a directory of JSON
  files, each describing one request shape (URL path plus canonicalized
  params) and the body to return.

Both decode responses through the same code path and both count requests per
endpoint in ``calls``, so tests can assert how many metadata or query calls
a pipeline made regardless of which client backs it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .errors import ApiError, FixtureError, QueryError, TransportError

__all__ = [
    "MetricMetadata",
    "Series",
    "QueryResult",
    "PrometheusClient",
    "FixtureClient",
    "canonical_key",
]

NAMES_PATH = "/api/v1/label/__name__/values"
METADATA_PATH = "/api/v1/metadata"
QUERY_PATH = "/api/v1/query"
QUERY_RANGE_PATH = "/api/v1/query_range"

_METADATA_TYPES = {"counter", "gauge", "histogram", "summary", "unknown"}


@dataclass(frozen=True)
class MetricMetadata:
    name: str
    type: str
    help: str
    unit: str = ""

    def __post_init__(self) -> None:
        if self.type not in _METADATA_TYPES:
            raise ValueError(f"bad metadata type {self.type!r}")


@dataclass(frozen=True)
class Series:
    labels: tuple[tuple[str, str], ...]
    samples: tuple[tuple[float, float], ...]

    def labels_dict(self) -> dict[str, str]:
        return dict(self.labels)


@dataclass(frozen=True)
class QueryResult:
    result_type: str
    series: tuple[Series, ...]
    warnings: tuple[str, ...] = ()


def canonical_key(path: str, params: dict) -> tuple[str, tuple[tuple[str, str], ...]]:
    """Request identity used for fixture matching: path + sorted stringified
    params."""
    return (path, tuple(sorted((k, str(v)) for k, v in params.items())))


def _decode_body(status: int, body: dict | None) -> dict:
    if body is None:
        raise ApiError(f"non-JSON response with HTTP status {status}")
    if body.get("status") == "success":
        return body
    message = body.get("error")
    if message:
        raise QueryError(str(message))
    raise ApiError(f"unexpected API response (HTTP {status}): missing status/error fields")


def _one_series(metric: dict, values: list) -> Series:
    samples = sorted((float(ts), float(v)) for ts, v in values)
    return Series(labels=tuple(sorted(metric.items())), samples=tuple(samples))


def _decode_query_result(body: dict) -> QueryResult:
    data = body.get("data")
    if not isinstance(data, dict) or "resultType" not in data:
        raise ApiError("query response missing data.resultType")
    rtype = data["resultType"]
    result = data.get("result", [])
    series: list[Series]
    if rtype == "vector":
        series = [_one_series(r.get("metric", {}), [r["value"]]) for r in result]
    elif rtype == "matrix":
        series = [_one_series(r.get("metric", {}), r.get("values", [])) for r in result]
    elif rtype == "scalar":
        series = [_one_series({}, [result])]
    else:
        raise ApiError(f"unsupported result type {rtype!r}")
    return QueryResult(
        result_type=rtype,
        series=tuple(series),
        warnings=tuple(body.get("warnings", [])),
    )


class _ClientBase:
    """Shared request accounting and response decoding."""

    def __init__(self) -> None:
        self.calls: dict[str, int] = {}

    def _get(self, path: str, params: dict) -> tuple[int, dict | None]:
        raise NotImplementedError

    def _fetch(self, path: str, params: dict) -> dict:
        self.calls[path] = self.calls.get(path, 0) + 1
        status, body = self._get(path, params)
        return _decode_body(status, body)

    def reset_calls(self) -> None:
        self.calls.clear()

    # ---- the four API calls ------------------------------------------------

    def list_metric_names(self) -> list[str]:
        body = self._fetch(NAMES_PATH, {})
        return list(body.get("data", []))

    def fetch_metadata(self, name: str) -> MetricMetadata:
        body = self._fetch(METADATA_PATH, {"metric": name})
        items = body.get("data", {}).get(name, [])
        if not items:
            return MetricMetadata(name=name, type="unknown", help="")
        first = items[0]
        mtype = first.get("type", "unknown")
        if mtype not in _METADATA_TYPES:
            mtype = "unknown"
        return MetricMetadata(
            name=name,
            type=mtype,
            help=first.get("help", ""),
            unit=first.get("unit", ""),
        )

    def instant_query(self, query: str, at: float | None = None) -> QueryResult:
        params: dict = {"query": query}
        if at is not None:
            params["time"] = at
        return _decode_query_result(self._fetch(QUERY_PATH, params))

    def range_query(self, query: str, start: float, end: float, step: float) -> QueryResult:
        if start >= end:
            raise ValueError(f"empty query range: start={start} end={end}")
        if step <= 0:
            raise ValueError(f"non-positive step {step}")
        params = {"query": query, "start": start, "end": end, "step": step}
        return _decode_query_result(self._fetch(QUERY_RANGE_PATH, params))


class PrometheusClient(_ClientBase):
    """Live client over HTTP.

    Args:
        base_url: server root, e.g. ``http://prometheus:9090``.
        token: optional bearer token added to every request.
        timeout: per-request deadline in seconds.
    """

    def __init__(self, base_url: str, token: str | None = None, timeout: float = 10.0):
        super().__init__()
        headers = {"Authorization": f"Bearer {token}"} if token else {}
        self._http = httpx.Client(
            base_url=base_url.rstrip("/"), headers=headers, timeout=timeout
        )

    def _get(self, path: str, params: dict) -> tuple[int, dict | None]:
        try:
            response = self._http.get(path, params={k: str(v) for k, v in params.items()})
        except httpx.HTTPError as exc:
            raise TransportError(f"request to {path} failed: {exc}") from exc
        try:
            return response.status_code, response.json()
        except ValueError:
            return response.status_code, None

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "PrometheusClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


@dataclass
class _Fixture:
    status: int
    response: dict


class FixtureClient(_ClientBase):
    """Replays recorded API responses from a fixture directory.

    Each ``*.json`` file in the directory holds one recorded exchange::

        {"path": "/api/v1/query", "params": {"query": "up"},
         "status": 200, "response": {...}}

    ``status`` defaults to 200. Requests whose shape was never recorded
    raise :class:`~nl2promql.errors.FixtureError`.
    """

    def __init__(self, directory: str | Path):
        super().__init__()
        self._fixtures: dict = {}
        directory = Path(directory)
        for path in sorted(directory.glob("*.json")):
            doc = json.loads(path.read_text())
            key = canonical_key(doc["path"], doc.get("params", {}))
            self._fixtures[key] = _Fixture(
                status=int(doc.get("status", 200)),
                response=doc.get("response", {}),
            )

    def _get(self, path: str, params: dict) -> tuple[int, dict | None]:
        key = canonical_key(path, params)
        fixture = self._fixtures.get(key)
        if fixture is None:
            raise FixtureError(f"no fixture recorded for {key!r}")
        return fixture.status, fixture.response

    def close(self) -> None:
        pass
