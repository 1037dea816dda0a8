"""Static metrics catalog: loading, indexing, and category queries.

The catalog is a JSON document keyed by category id. Each category holds a
list of metric entries (name, type, help, priority, keywords). Loading builds
a flat name -> (category, priority) lookup so that per-metric resolution never
scans category lists, and the two structures are kept in bijection: every
entry appears in the flat lookup exactly once and vice versa.

Catalogs are treated as immutable after construction. Mutating operations
elsewhere in the package (GPU discovery merges, validation reports) build a
new ``Catalog`` and swap it in atomically through :class:`CatalogStore`, so
concurrent readers always observe a complete catalog.
"""

from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

from .errors import CatalogError

__all__ = [
    "REGISTERED_CATEGORIES",
    "MetricType",
    "Priority",
    "MetricEntry",
    "Catalog",
    "CatalogStore",
    "Stats",
    "load_catalog",
    "dump_catalog",
    "build_catalog",
    "lookup_metric",
    "metrics_in_categories",
    "catalog_stats",
]

#: Category taxonomy. Catalog files may populate a subset, but every category
#: id they use must come from this set.
REGISTERED_CATEGORIES: frozenset[str] = frozenset(
    {
        "api_server",
        "autoscaling",
        "cluster_health",
        "controller_manager",
        "dns",
        "etcd",
        "gpu_ai",
        "ingress",
        "kubelet",
        "networking",
        "node_hardware",
        "observability",
        "pod_container",
        "scheduler",
        "security",
        "storage",
        "workloads",
    }
)

_METRIC_NAME_RE = re.compile(r"^[A-Za-z_:][A-Za-z0-9_:]*$")


class MetricType(str, Enum):
    counter = "counter"
    gauge = "gauge"
    histogram = "histogram"
    summary = "summary"


class Priority(str, Enum):
    high = "High"
    medium = "Medium"


@dataclass(frozen=True)
class MetricEntry:
    """One catalog row: a metric family and the metadata used for selection."""

    name: str
    metric_type: MetricType
    help: str
    priority: Priority
    keywords: tuple[str, ...]
    category: str

    def __post_init__(self) -> None:
        if not _METRIC_NAME_RE.match(self.name):
            raise CatalogError(f"invalid metric name {self.name!r}")
        object.__setattr__(self, "keywords", tuple(self.keywords))
        if len(self.keywords) > 12:
            raise CatalogError(f"{self.name}: more than 12 keywords")
        if len(set(self.keywords)) != len(self.keywords):
            raise CatalogError(f"{self.name}: duplicate keywords")
        for kw in self.keywords:
            if kw != kw.lower():
                raise CatalogError(f"{self.name}: keyword {kw!r} is not lowercase")
        if not isinstance(self.metric_type, MetricType):
            raise CatalogError(f"{self.name}: bad metric type {self.metric_type!r}")
        if not isinstance(self.priority, Priority):
            raise CatalogError(f"{self.name}: bad priority {self.priority!r}")
        if self.category not in REGISTERED_CATEGORIES:
            raise CatalogError(f"{self.name}: unknown category {self.category!r}")


@dataclass
class Stats:
    total_metrics: int
    per_category: dict[str, int]
    per_priority: dict[str, int]


@dataclass
class Catalog:
    categories: dict[str, list[MetricEntry]]
    flat_lookup: dict[str, tuple[str, Priority]]
    category_keywords: dict[str, list[str]]
    source_version: str
    loaded_at: float = field(compare=False, default_factory=time.time)


def build_catalog(
    categories: dict[str, Iterable[MetricEntry]],
    source_version: str,
    category_keywords: dict[str, list[str]] | None = None,
) -> Catalog:
    """Assemble a catalog from per-category entries and index it.

    Raises:
        CatalogError: on duplicate names, unregistered categories, or entries
            filed under a category that disagrees with their own field.
    """
    cats: dict[str, list[MetricEntry]] = {}
    flat: dict[str, tuple[str, Priority]] = {}
    for category, entries in categories.items():
        if category not in REGISTERED_CATEGORIES:
            raise CatalogError(f"unknown category id {category!r}")
        rows = list(entries)
        for entry in rows:
            if entry.category != category:
                raise CatalogError(
                    f"{entry.name}: filed under {category!r} but tagged {entry.category!r}"
                )
            if entry.name in flat:
                raise CatalogError(f"duplicate metric name {entry.name!r}")
            flat[entry.name] = (category, entry.priority)
        cats[category] = rows
    return Catalog(
        categories=cats,
        flat_lookup=flat,
        category_keywords=dict(category_keywords or {}),
        source_version=source_version,
    )


def load_catalog(
    raw: bytes | str,
    category_keywords: dict[str, list[str]] | None = None,
) -> Catalog:
    """Parse catalog JSON and build the indexed catalog.

    Args:
        raw: catalog document bytes or text. Expected shape is
            ``{"version": str, "categories": {id: [entry, ...]}}``.
        category_keywords: question keyword -> category hint map to attach.
            When omitted the catalog carries an empty map; callers that want
            the shipped defaults pass ``config.default_category_keywords()``.

    Raises:
        CatalogError: malformed JSON (message carries the byte offset),
            missing fields, or any entry-level violation.
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog JSON is malformed at byte {exc.pos}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "categories" not in doc:
        raise CatalogError("catalog document must be an object with a 'categories' key")
    version = str(doc.get("version", ""))
    categories: dict[str, list[MetricEntry]] = {}
    for category, rows in doc["categories"].items():
        entries = []
        for row in rows:
            try:
                entry = MetricEntry(
                    name=row["name"],
                    metric_type=MetricType(row["type"]),
                    help=row.get("help", ""),
                    priority=Priority(row["priority"]),
                    keywords=tuple(row.get("keywords", [])),
                    category=category,
                )
            except (KeyError, ValueError) as exc:
                raise CatalogError(f"bad catalog entry in {category!r}: {exc}") from exc
            entries.append(entry)
        categories[category] = entries
    return build_catalog(categories, version, category_keywords)


def dump_catalog(catalog: Catalog) -> str:
    """Serialize back to the JSON document ``load_catalog`` accepts."""
    doc = {
        "version": catalog.source_version,
        "categories": {
            category: [
                {
                    "name": e.name,
                    "type": e.metric_type.value,
                    "help": e.help,
                    "priority": e.priority.value,
                    "keywords": list(e.keywords),
                }
                for e in rows
            ]
            for category, rows in catalog.categories.items()
        },
    }
    return json.dumps(doc, indent=2)


def lookup_metric(catalog: Catalog, name: str) -> tuple[str, Priority] | None:
    """O(1) resolution of a metric name to (category, priority)."""
    return catalog.flat_lookup.get(name)


def metrics_in_categories(
    catalog: Catalog,
    categories: Iterable[str],
    include_medium: bool = True,
) -> list[MetricEntry]:
    """Candidate entries for selection, ordered by (category, name).

    With an empty ``categories`` the scan widens to every High-priority entry
    in the catalog regardless of ``include_medium``; that is the no-hint
    fallback used by metric selection.

    Raises:
        CatalogError: if a requested category id is not registered.
    """
    wanted = sorted(set(categories))
    out: list[MetricEntry] = []
    if not wanted:
        for category in sorted(catalog.categories):
            out.extend(
                e for e in catalog.categories[category] if e.priority is Priority.high
            )
        out.sort(key=lambda e: (e.category, e.name))
        return out
    for category in wanted:
        if category not in REGISTERED_CATEGORIES:
            raise CatalogError(f"unknown category id {category!r}")
        entries = catalog.categories.get(category, [])
        if include_medium:
            out.extend(entries)
        else:
            out.extend(e for e in entries if e.priority is Priority.high)
    out.sort(key=lambda e: (e.category, e.name))
    return out


def catalog_stats(catalog: Catalog) -> Stats:
    per_category = {c: len(rows) for c, rows in catalog.categories.items()}
    per_priority = {Priority.high.value: 0, Priority.medium.value: 0}
    for rows in catalog.categories.values():
        for entry in rows:
            per_priority[entry.priority.value] += 1
    return Stats(
        total_metrics=sum(per_category.values()),
        per_category=per_category,
        per_priority=per_priority,
    )


class CatalogStore:
    """Shared catalog reference with exclusive writers and lock-free readers.

    Readers call :meth:`snapshot` and keep using the returned object; writers
    serialize through :meth:`update`, which builds a replacement catalog and
    swaps the reference in one assignment.
    """

    def __init__(self, catalog: Catalog):
        self._catalog = catalog
        self._lock = threading.Lock()

    def snapshot(self) -> Catalog:
        return self._catalog

    def update(self, fn: Callable[[Catalog], Catalog]) -> Catalog:
        with self._lock:
            replacement = fn(self._catalog)
            self._catalog = replacement
        return replacement
