"""Deterministic synthetic catalogs for benchmarks and scale tests.

Real clusters expose a couple thousand metric names. This generator builds
a catalog of any requested size with the same shape: every category
populated, a fixed High-priority budget per category, a GPU slice with
vendor-style names, and keywords derived through the normal generation
rules. The same seed always produces byte-identical output.
"""

from __future__ import annotations

import random

from .catalog import (
    REGISTERED_CATEGORIES,
    Catalog,
    MetricEntry,
    MetricType,
    Priority,
    build_catalog,
)
from .config import default_category_keywords, default_keyword_rules
from .keywords import generate_keywords

__all__ = ["CATEGORY_PREFIXES", "generate_catalog"]

CATEGORY_PREFIXES: dict[str, str] = {
    "api_server": "apiserver_",
    "autoscaling": "hpa_",
    "cluster_health": "cluster_",
    "controller_manager": "controller_",
    "dns": "coredns_",
    "etcd": "etcd_",
    "gpu_ai": "gpu_",
    "ingress": "nginx_ingress_",
    "kubelet": "kubelet_",
    "networking": "cni_",
    "node_hardware": "node_",
    "observability": "prometheus_",
    "pod_container": "container_",
    "scheduler": "scheduler_",
    "security": "certmanager_",
    "storage": "csi_",
    "workloads": "kube_deployment_",
}

_COUNTER_STEMS = [
    "requests",
    "errors",
    "operations",
    "events",
    "restarts",
    "syncs",
    "evictions",
    "writes",
    "reads",
    "retries",
]
_GAUGE_STEMS = [
    "queue_depth",
    "usage_ratio",
    "capacity_bytes",
    "active_sessions",
    "threads",
    "pressure",
    "limit_bytes",
    "backlog",
    "inflight",
    "age_seconds",
]
_HISTOGRAM_STEMS = [
    "duration_seconds",
    "latency_seconds",
    "size_bytes",
    "wait_seconds",
]

_TYPE_CHOICES = (
    [MetricType.counter] * 8 + [MetricType.gauge] * 8 + [MetricType.histogram] * 3 + [MetricType.summary]
)


def _make_entry(category: str, index: int, rng: random.Random, rules) -> MetricEntry:
    mtype = rng.choice(_TYPE_CHOICES)
    if mtype is MetricType.counter:
        stem = rng.choice(_COUNTER_STEMS)
        name = f"{CATEGORY_PREFIXES[category]}{stem}_{index}_total"
    elif mtype in (MetricType.histogram, MetricType.summary):
        stem = rng.choice(_HISTOGRAM_STEMS)
        name = f"{CATEGORY_PREFIXES[category]}{stem}_{index}"
    else:
        stem = rng.choice(_GAUGE_STEMS)
        name = f"{CATEGORY_PREFIXES[category]}{stem}_{index}"
    help_text = (
        f"Synthetic {mtype.value} tracking {stem.replace('_', ' ')} "
        f"for {category.replace('_', ' ')}."
    )
    return MetricEntry(
        name=name,
        metric_type=mtype,
        help=help_text,
        priority=Priority.medium,
        keywords=tuple(generate_keywords(name, mtype, help_text, rules, tiers=(2, 3, 4, 5))),
        category=category,
    )


def generate_catalog(
    total: int = 2000,
    seed: int = 0,
    gpu_total: int = 60,
    gpu_high: int = 30,
    high_per_category: int = 20,
    version: str | None = None,
) -> Catalog:
    """Build a synthetic catalog of exactly ``total`` metrics.

    ``gpu_ai`` receives ``gpu_total`` entries with ``gpu_high`` of them High
    priority. The remaining sixteen categories split the rest as evenly as
    possible, each with ``high_per_category`` High entries.
    """
    others = sorted(REGISTERED_CATEGORIES - {"gpu_ai"})
    remainder = total - gpu_total
    if remainder < len(others) * high_per_category or gpu_total < gpu_high:
        raise ValueError("total too small for the requested High-priority budget")
    base, extra = divmod(remainder, len(others))
    counts = {"gpu_ai": gpu_total}
    for i, category in enumerate(others):
        counts[category] = base + (1 if i < extra else 0)

    rng = random.Random(seed)
    rules = default_keyword_rules()
    categories: dict[str, list[MetricEntry]] = {}
    for category in ["gpu_ai", *others]:
        count = counts[category]
        rows = [_make_entry(category, i, rng, rules) for i in range(count)]
        high_budget = gpu_high if category == "gpu_ai" else high_per_category
        for i in rng.sample(range(count), high_budget):
            old = rows[i]
            rows[i] = MetricEntry(
                name=old.name,
                metric_type=old.metric_type,
                help=old.help,
                priority=Priority.high,
                keywords=old.keywords,
                category=old.category,
            )
        categories[category] = rows
    return build_catalog(
        categories,
        version or f"synthetic-{total}-seed{seed}",
        default_category_keywords(),
    )
