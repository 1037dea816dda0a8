"""Reconciling the catalog with the live metric name list.

Two differences matter: catalog entries whose metric no longer exists
(stale, pruned) and live metrics the catalog has never heard of (adopted).
New metrics are categorized by the longest known name prefix. Prefixes are
learned from the catalog itself: every leading token run ending at a ``_``
or ``:`` delimiter votes for its entry's category, majority wins, ties go
to the lexicographically smaller category id, and names with no matching
prefix land in ``observability``.

Vendor-prefixed names (DCGM_, vllm:, and friends) are excluded on both
sides so that GPU lifecycle stays with runtime discovery; this is what
makes validation and GPU discovery commute regardless of which background
task finishes first.

``validate_catalog`` only computes a report. ``apply_report`` folds it into
a new catalog functionally and is idempotent, so a report may be applied to
a snapshot that has moved on since the report was computed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .catalog import Catalog, MetricEntry, MetricType, Priority, build_catalog
from .gpu import VendorPrefixConfig
from .keywords import KeywordRules, generate_keywords

__all__ = [
    "FALLBACK_CATEGORY",
    "ValidationReport",
    "build_prefix_map",
    "categorize_new_metric",
    "validate_catalog",
    "apply_report",
]

FALLBACK_CATEGORY = "observability"

_DELIMITER_RE = re.compile(r"[_:]")


@dataclass(frozen=True)
class ValidationReport:
    """Sorted, deterministic diff between a catalog snapshot and live names."""

    stale: tuple[str, ...]
    adopted: tuple[tuple[str, str], ...]
    unchanged_count: int

    @property
    def is_noop(self) -> bool:
        return not self.stale and not self.adopted


def _prefixes_of(name: str) -> list[str]:
    """Leading substrings ending just after each delimiter, e.g.
    ``etcd_disk_wal`` yields ``etcd_`` and ``etcd_disk_``."""
    return [
        name[: m.end()]
        for m in _DELIMITER_RE.finditer(name)
        if m.end() < len(name)
    ]


def build_prefix_map(catalog: Catalog) -> dict[str, str]:
    votes: dict[str, dict[str, int]] = {}
    for name, (category, _) in catalog.flat_lookup.items():
        for prefix in _prefixes_of(name):
            votes.setdefault(prefix, {}).setdefault(category, 0)
            votes[prefix][category] += 1
    return {
        prefix: min(tally, key=lambda cat: (-tally[cat], cat))
        for prefix, tally in votes.items()
    }


def categorize_new_metric(name: str, prefix_map: dict[str, str]) -> str:
    for prefix in sorted(_prefixes_of(name), key=len, reverse=True):
        if prefix in prefix_map:
            return prefix_map[prefix]
    return FALLBACK_CATEGORY


def validate_catalog(
    catalog: Catalog,
    live_names: list[str] | set[str],
    vendor_prefixes: VendorPrefixConfig | None = None,
) -> ValidationReport:
    if vendor_prefixes is None:
        vendor_prefixes = VendorPrefixConfig()
    live = set(live_names)
    prefix_map = build_prefix_map(catalog)

    stale = sorted(
        name
        for name in catalog.flat_lookup
        if name not in live and not vendor_prefixes.matches(name)
    )
    adopted = sorted(
        (name, categorize_new_metric(name, prefix_map))
        for name in live
        if name not in catalog.flat_lookup and not vendor_prefixes.matches(name)
    )
    unchanged = sum(1 for name in catalog.flat_lookup if name in live)
    return ValidationReport(
        stale=tuple(stale), adopted=tuple(adopted), unchanged_count=unchanged
    )


def _adopted_type(name: str) -> MetricType:
    if name.endswith("_total"):
        return MetricType.counter
    if name.endswith(("_bucket", "_sum", "_count")):
        return MetricType.histogram
    return MetricType.gauge


def apply_report(
    catalog: Catalog,
    report: ValidationReport,
    keyword_rules: KeywordRules | None = None,
) -> Catalog:
    """New catalog with stale entries removed and adopted ones added.

    Entries already gone or already present are skipped, which makes
    repeated application a no-op. The result is built in full before any
    swap, so a validation failure leaves the input untouched.
    """
    if keyword_rules is None:
        from . import config

        keyword_rules = config.default_keyword_rules()
    stale = set(report.stale)
    categories = {
        cat: [e for e in rows if e.name not in stale]
        for cat, rows in catalog.categories.items()
    }
    changed = any(name in catalog.flat_lookup for name in stale)
    for name, category in report.adopted:
        if name in catalog.flat_lookup:
            continue
        mtype = _adopted_type(name)
        entry = MetricEntry(
            name=name,
            metric_type=mtype,
            help="",
            priority=Priority.medium,
            keywords=tuple(
                generate_keywords(name, mtype, "", keyword_rules, tiers=(2, 3, 4))
            ),
            category=category,
        )
        categories.setdefault(category, []).append(entry)
        changed = True
    if not changed:
        return catalog
    return build_catalog(categories, catalog.source_version, catalog.category_keywords)
