"""Runtime GPU metric discovery.

At startup the live metric name list is scanned for vendor-prefixed names:
NVIDIA (``DCGM_``, ``nvidia_gpu_``), Intel (``habanalabs_``, ``xpu_``), AMD
(``amdgpu_``, ``rocm_``), and serving frameworks (``vllm:``, ``gpu_``).
Hardware vendors compete for ``primary_vendor`` by match count (ties break
NVIDIA over Intel over AMD); framework metrics are always included and only
claim primacy when no hardware vendor matched at all. Extra prefixes can be
added through the ``GPU_METRIC_PREFIXES`` environment variable.

Discovered names become ``gpu_ai`` catalog entries: type is inferred from
naming convention (``_total`` counter, ``_bucket``/``_sum``/``_count``
family histogram, else gauge), priority is High exactly when one of the 89
shipped signal patterns matches, and keywords come from the curated, type,
pattern, and name-token sources (no help text is available at discovery
time). Merging into a catalog never overwrites an existing entry and is
idempotent.
"""

from __future__ import annotations

import os
import re
import time
from dataclasses import dataclass, field

from .catalog import Catalog, MetricEntry, MetricType, Priority, build_catalog
from .errors import ConfigError
from .keywords import KeywordRules, generate_keywords

__all__ = [
    "NVIDIA",
    "INTEL",
    "AMD",
    "FRAMEWORK",
    "CUSTOM",
    "HARDWARE_VENDORS",
    "VendorPrefixConfig",
    "PriorityPatterns",
    "DiscoveryResult",
    "assign_gpu_priority",
    "discover_gpu_metrics",
    "merge_discovery",
]

NVIDIA = "nvidia"
INTEL = "intel"
AMD = "amd"
FRAMEWORK = "framework"
CUSTOM = "custom"

#: Election order for hardware vendors; earlier wins ties.
HARDWARE_VENDORS: tuple[str, ...] = (NVIDIA, INTEL, AMD)

_FAMILY_SUFFIXES = ("_bucket", "_sum", "_count")


@dataclass(frozen=True)
class VendorPrefixConfig:
    nvidia: tuple[str, ...] = ("DCGM_", "nvidia_gpu_")
    intel: tuple[str, ...] = ("habanalabs_", "xpu_")
    amd: tuple[str, ...] = ("amdgpu_", "rocm_")
    framework: tuple[str, ...] = ("vllm:", "gpu_")
    custom: tuple[str, ...] = ()

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "VendorPrefixConfig":
        """Defaults plus any comma-separated additions from
        ``GPU_METRIC_PREFIXES``."""
        env = os.environ if environ is None else environ
        raw = env.get("GPU_METRIC_PREFIXES", "")
        extra = tuple(p.strip() for p in raw.split(",") if p.strip())
        return cls(custom=extra)

    def by_vendor(self) -> dict[str, tuple[str, ...]]:
        return {
            NVIDIA: self.nvidia,
            INTEL: self.intel,
            AMD: self.amd,
            FRAMEWORK: self.framework,
            CUSTOM: self.custom,
        }

    def vendor_of(self, name: str) -> str | None:
        for vendor, prefixes in self.by_vendor().items():
            if any(name.startswith(p) for p in prefixes):
                return vendor
        return None

    def matches(self, name: str) -> bool:
        return self.vendor_of(name) is not None


@dataclass
class PriorityPatterns:
    patterns: list[re.Pattern[str]]

    @classmethod
    def from_dict(cls, doc: dict) -> "PriorityPatterns":
        compiled = []
        for raw in doc["patterns"]:
            try:
                compiled.append(re.compile(raw, re.IGNORECASE))
            except re.error as exc:
                raise ConfigError(f"bad GPU priority pattern {raw!r}: {exc}") from exc
        return cls(patterns=compiled)

    def __len__(self) -> int:
        return len(self.patterns)


def assign_gpu_priority(name: str, patterns: PriorityPatterns) -> Priority:
    """High when any signal pattern matches the name, Medium otherwise."""
    for pattern in patterns.patterns:
        if pattern.search(name):
            return Priority.high
    return Priority.medium


@dataclass
class DiscoveryResult:
    entries: list[MetricEntry]
    primary_vendor: str | None
    match_counts: dict[str, int]
    elapsed_seconds: float = field(compare=False, default=0.0)


def _family_base(name: str) -> str | None:
    for suffix in _FAMILY_SUFFIXES:
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return None


def discover_gpu_metrics(
    client,
    prefixes: VendorPrefixConfig,
    priority_patterns: PriorityPatterns | None = None,
    keyword_rules: KeywordRules | None = None,
) -> DiscoveryResult:
    """Scan live metric names and build ``gpu_ai`` entries for matches.

    Client errors (transport, API) propagate; callers running discovery as a
    background task catch them and keep the static catalog.
    """
    if priority_patterns is None or keyword_rules is None:
        from . import config

        priority_patterns = priority_patterns or config.default_gpu_priority_patterns()
        keyword_rules = keyword_rules or config.gpu_keyword_rules()
    started = time.monotonic()
    names = client.list_metric_names()

    matched: dict[str, str] = {}
    for name in names:
        vendor = prefixes.vendor_of(name)
        if vendor is not None:
            matched[name] = vendor
    match_counts = {vendor: 0 for vendor in (*HARDWARE_VENDORS, FRAMEWORK, CUSTOM)}
    for vendor in matched.values():
        match_counts[vendor] += 1

    primary: str | None = None
    hardware_best = max(HARDWARE_VENDORS, key=lambda v: match_counts[v])
    if match_counts[hardware_best] > 0:
        primary = next(
            v for v in HARDWARE_VENDORS if match_counts[v] == match_counts[hardware_best]
        )
    elif match_counts[FRAMEWORK] > 0:
        primary = FRAMEWORK

    matched_names = set(matched)
    histogram_bases = {
        name[: -len("_bucket")] for name in matched_names if name.endswith("_bucket")
    }

    def make_entry(name: str, mtype: MetricType) -> MetricEntry:
        return MetricEntry(
            name=name,
            metric_type=mtype,
            help="",
            priority=assign_gpu_priority(name, priority_patterns),
            keywords=tuple(
                generate_keywords(name, mtype, "", keyword_rules, tiers=(1, 2, 3, 4))
            ),
            category="gpu_ai",
        )

    entries: list[MetricEntry] = []
    emitted: set[str] = set()
    for name in sorted(matched_names):
        if name in histogram_bases:
            entries.append(make_entry(name, MetricType.histogram))
            emitted.add(name)
            continue
        base = _family_base(name)
        if base is not None and base in histogram_bases:
            continue
        mtype = MetricType.counter if name.endswith("_total") else MetricType.gauge
        entries.append(make_entry(name, mtype))
        emitted.add(name)
    for base in sorted(histogram_bases - emitted):
        entries.append(make_entry(base, MetricType.histogram))
    entries.sort(key=lambda e: e.name)
    return DiscoveryResult(
        entries=entries,
        primary_vendor=primary,
        match_counts=match_counts,
        elapsed_seconds=time.monotonic() - started,
    )


def merge_discovery(catalog: Catalog, result: DiscoveryResult) -> Catalog:
    """Fold discovered entries into a new catalog.

    Names already present anywhere in the catalog keep their existing entry
    (static wins), so merging the same result twice is a no-op.
    """
    additions = [e for e in result.entries if e.name not in catalog.flat_lookup]
    if not additions:
        return catalog
    categories = {c: list(rows) for c, rows in catalog.categories.items()}
    categories.setdefault("gpu_ai", []).extend(additions)
    return build_catalog(categories, catalog.source_version, catalog.category_keywords)
