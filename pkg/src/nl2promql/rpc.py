"""JSON-RPC 2.0 tool surface.

Twelve tools cover the pipeline stages and the supporting catalog and
query operations. Each tool declares a JSON Schema for its parameters;
requests failing validation get code -32602, unknown methods -32601,
malformed JSON -32700, structurally invalid envelopes -32600, and any
in-tool failure -32000 with the underlying message. Requests without an
``id`` are notifications and produce no response. Single requests and
batches are both accepted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable

import jsonschema

from .errors import CatalogError, ClientError, ConfigError, NoMetricFoundError, RepairError
from .pipeline import (
    SmartDiscoveryService,
    answer_to_dict,
    entry_to_dict,
    intent_to_dict,
    query_result_to_dict,
    scored_to_dict,
    time_to_dict,
)

__all__ = ["ToolDescriptor", "TOOLS", "tool_names", "handle_rpc"]

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32000

_TOOL_FAILURES = (
    CatalogError,
    ClientError,
    ConfigError,
    NoMetricFoundError,
    RepairError,
    ValueError,
)


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    params_schema: dict
    handler: Callable[[SmartDiscoveryService, dict], Any]


def _schema(properties: dict, required: list[str] | None = None) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": required or [],
        "additionalProperties": False,
    }


_STR = {"type": "string", "minLength": 1}
_NUM = {"type": "number"}


def _search_metrics(service: SmartDiscoveryService, p: dict) -> Any:
    hits = service.search_metrics(p["query"], limit=p.get("limit", 20))
    return {"metrics": [entry_to_dict(e) for e in hits]}


def _get_metric_metadata(service: SmartDiscoveryService, p: dict) -> Any:
    return entry_to_dict(service.get_metric_metadata(p["name"]))


def _list_categories(service: SmartDiscoveryService, p: dict) -> Any:
    return {"categories": service.list_categories()}


def _catalog_stats(service: SmartDiscoveryService, p: dict) -> Any:
    return service.stats()


def _detect_intent(service: SmartDiscoveryService, p: dict) -> Any:
    return intent_to_dict(service.detect(p["question"]))


def _resolve_time_range(service: SmartDiscoveryService, p: dict) -> Any:
    return time_to_dict(service.resolve(p["question"], now=p.get("now")))


def _select_metric(service: SmartDiscoveryService, p: dict) -> Any:
    intent = service.detect(p["question"])
    ranked, path = service.select(p["question"], intent)
    return {
        "selection": scored_to_dict(ranked[0]),
        "alternatives": [scored_to_dict(s) for s in ranked[1:4]],
        "candidates_considered": len(ranked),
        "path": path.value,
    }


def _generate_promql(service: SmartDiscoveryService, p: dict) -> Any:
    answer = service.smart_discover(p["question"], now=p.get("now"))
    return answer_to_dict(answer)


def _validate_promql(service: SmartDiscoveryService, p: dict) -> Any:
    return service.validate_query(p["query"])


def _require_client(service: SmartDiscoveryService):
    if service.client is None:
        raise ValueError("no query client configured")
    return service.client


def _execute_query(service: SmartDiscoveryService, p: dict) -> Any:
    result = _require_client(service).instant_query(p["query"], at=p.get("at"))
    return query_result_to_dict(result)


def _execute_range_query(service: SmartDiscoveryService, p: dict) -> Any:
    result = _require_client(service).range_query(
        p["query"], p["start"], p["end"], p["step"]
    )
    return query_result_to_dict(result)


def _smart_discover(service: SmartDiscoveryService, p: dict) -> Any:
    explicit = None
    if ("start" in p) != ("end" in p):
        raise ValueError("start and end must be provided together")
    if "start" in p:
        explicit = (p["start"], p["end"])
    answer = service.smart_discover(
        p["question"],
        explicit_range=explicit,
        execute=p.get("execute", False),
        now=p.get("now"),
    )
    return answer_to_dict(answer)


TOOLS: tuple[ToolDescriptor, ...] = (
    ToolDescriptor(
        "search_metrics",
        "Keyword search over the metric catalog.",
        _schema({"query": _STR, "limit": {"type": "integer", "minimum": 1}}, ["query"]),
        _search_metrics,
    ),
    ToolDescriptor(
        "get_metric_metadata",
        "Catalog entry for one metric name.",
        _schema({"name": _STR}, ["name"]),
        _get_metric_metadata,
    ),
    ToolDescriptor(
        "list_categories",
        "All catalog categories with entry counts.",
        _schema({}),
        _list_categories,
    ),
    ToolDescriptor(
        "catalog_stats",
        "Catalog totals by category and priority.",
        _schema({}),
        _catalog_stats,
    ),
    ToolDescriptor(
        "detect_intent",
        "Classify the question into one of eight query intents.",
        _schema({"question": _STR}, ["question"]),
        _detect_intent,
    ),
    ToolDescriptor(
        "resolve_time_range",
        "Turn time expressions in the question into a concrete window.",
        _schema({"question": {"type": "string"}, "now": _NUM}, ["question"]),
        _resolve_time_range,
    ),
    ToolDescriptor(
        "select_metric",
        "Rank catalog metrics for the question and pick the best.",
        _schema({"question": _STR}, ["question"]),
        _select_metric,
    ),
    ToolDescriptor(
        "generate_promql",
        "Full translation of a question into PromQL, without executing it.",
        _schema({"question": _STR, "now": _NUM}, ["question"]),
        _generate_promql,
    ),
    ToolDescriptor(
        "validate_promql",
        "Static checks on a PromQL string.",
        _schema({"query": _STR}, ["query"]),
        _validate_promql,
    ),
    ToolDescriptor(
        "execute_query",
        "Run an instant query against the configured backend.",
        _schema({"query": _STR, "at": _NUM}, ["query"]),
        _execute_query,
    ),
    ToolDescriptor(
        "execute_range_query",
        "Run a range query against the configured backend.",
        _schema(
            {"query": _STR, "start": _NUM, "end": _NUM, "step": _NUM},
            ["query", "start", "end", "step"],
        ),
        _execute_range_query,
    ),
    ToolDescriptor(
        "smart_discover",
        "Question to PromQL end to end, optionally executing the result.",
        _schema(
            {
                "question": _STR,
                "execute": {"type": "boolean"},
                "start": _NUM,
                "end": _NUM,
                "now": _NUM,
            },
            ["question"],
        ),
        _smart_discover,
    ),
)

_TOOLS_BY_NAME = {t.name: t for t in TOOLS}


def tool_names() -> list[str]:
    return [t.name for t in TOOLS]


def _error(req_id, code: int, message: str) -> dict:
    return {"jsonrpc": "2.0", "id": req_id, "error": {"code": code, "message": message}}


def _result(req_id, payload) -> dict:
    return {"jsonrpc": "2.0", "id": req_id, "result": payload}


def _handle_one(service: SmartDiscoveryService, req) -> dict | None:
    if not isinstance(req, dict):
        return _error(None, INVALID_REQUEST, "request must be an object")
    req_id = req.get("id")
    is_notification = "id" not in req
    if req.get("jsonrpc") != "2.0" or not isinstance(req.get("method"), str):
        return _error(req_id, INVALID_REQUEST, "not a JSON-RPC 2.0 request")
    tool = _TOOLS_BY_NAME.get(req["method"])
    if tool is None:
        response = _error(req_id, METHOD_NOT_FOUND, f"unknown method {req['method']!r}")
        return None if is_notification else response
    params = req.get("params", {})
    if not isinstance(params, dict):
        response = _error(req_id, INVALID_PARAMS, "params must be an object")
        return None if is_notification else response
    try:
        jsonschema.validate(instance=params, schema=tool.params_schema)
    except jsonschema.ValidationError as exc:
        response = _error(req_id, INVALID_PARAMS, exc.message)
        return None if is_notification else response
    try:
        payload = tool.handler(service, params)
    except _TOOL_FAILURES as exc:
        response = _error(req_id, INTERNAL_ERROR, str(exc))
        return None if is_notification else response
    except Exception as exc:  # pragma: no cover - defensive
        response = _error(req_id, INTERNAL_ERROR, f"internal error: {exc}")
        return None if is_notification else response
    return None if is_notification else _result(req_id, payload)


def handle_rpc(service: SmartDiscoveryService, raw: str | bytes | dict | list) -> dict | list | None:
    """Process one JSON-RPC payload (single or batch) and return the
    response object, or None when nothing should be sent back."""
    if isinstance(raw, (str, bytes)):
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            return _error(None, PARSE_ERROR, f"parse error: {exc.msg}")
    else:
        doc = raw
    if isinstance(doc, list):
        if not doc:
            return _error(None, INVALID_REQUEST, "empty batch")
        responses = [r for r in (_handle_one(service, item) for item in doc) if r is not None]
        return responses or None
    return _handle_one(service, doc)
