"""Natural language to PromQL translation over a curated metric catalog."""

from .catalog import (
    Catalog,
    CatalogStore,
    MetricEntry,
    MetricType,
    Priority,
    build_catalog,
    dump_catalog,
    load_catalog,
)
from .errors import (
    ApiError,
    CatalogError,
    ClientError,
    ConfigError,
    FixtureError,
    NoMetricFoundError,
    QueryError,
    RepairError,
    TransportError,
)
from .generation import GeneratedQuery, Repair, check_promql, generate, repair
from .intent import IntentResult, IntentType, detect_intent
from .pipeline import DiscoveryPath, PipelineAnswer, SmartDiscoveryService, answer_to_dict
from .promclient import FixtureClient, PrometheusClient, QueryResult
from .selection import ScoredMetric, rank_candidates, score_metric, select_best
from .temporal import Strategy, TimeRangeInfo, rate_syntax_for, resolve_time

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "CatalogStore",
    "MetricEntry",
    "MetricType",
    "Priority",
    "build_catalog",
    "dump_catalog",
    "load_catalog",
    "ApiError",
    "CatalogError",
    "ClientError",
    "ConfigError",
    "FixtureError",
    "NoMetricFoundError",
    "QueryError",
    "RepairError",
    "TransportError",
    "GeneratedQuery",
    "Repair",
    "check_promql",
    "generate",
    "repair",
    "IntentResult",
    "IntentType",
    "detect_intent",
    "DiscoveryPath",
    "PipelineAnswer",
    "SmartDiscoveryService",
    "answer_to_dict",
    "FixtureClient",
    "PrometheusClient",
    "QueryResult",
    "ScoredMetric",
    "rank_candidates",
    "score_metric",
    "select_best",
    "Strategy",
    "TimeRangeInfo",
    "rate_syntax_for",
    "resolve_time",
    "__version__",
]
