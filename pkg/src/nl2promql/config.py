"""Bundled configuration data and environment-driven settings.

Everything data-driven about the engine ships as JSON under
``nl2promql/data``: category keyword lists, keyword generation rules, the
intent lexicon, scoring weights, GPU priority patterns, curated GPU
keywords, and a ready-to-use GPU catalog fixture. The loaders here parse
those files into the typed objects the rest of the package consumes, with
a small cache since the files never change at runtime.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .catalog import Catalog, load_catalog
from .gpu import PriorityPatterns
from .intent import IntentLexicon
from .keywords import KeywordRules
from .selection import ScoringConfig

__all__ = [
    "AppConfig",
    "bundled_json",
    "default_category_keywords",
    "default_keyword_rules",
    "default_intent_lexicon",
    "default_scoring_config",
    "default_gpu_priority_patterns",
    "gpu_curated_keywords",
    "gpu_keyword_rules",
    "load_bundled_catalog",
]


@lru_cache(maxsize=None)
def bundled_json(filename: str):
    path = resources.files("nl2promql").joinpath("data").joinpath(filename)
    return json.loads(path.read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_category_keywords() -> dict[str, tuple[str, ...]]:
    doc = bundled_json("category_keywords.json")
    return {category: tuple(words) for category, words in doc.items()}


@lru_cache(maxsize=1)
def default_keyword_rules() -> KeywordRules:
    return KeywordRules.from_dict(bundled_json("keyword_rules.json"))


@lru_cache(maxsize=1)
def default_intent_lexicon() -> IntentLexicon:
    return IntentLexicon.from_dict(bundled_json("intent_lexicon.json"))


@lru_cache(maxsize=1)
def default_scoring_config() -> ScoringConfig:
    return ScoringConfig.from_dict(bundled_json("scoring.json"))


@lru_cache(maxsize=1)
def default_gpu_priority_patterns() -> PriorityPatterns:
    return PriorityPatterns.from_dict(bundled_json("gpu_priority_patterns.json"))


@lru_cache(maxsize=1)
def gpu_curated_keywords() -> dict[str, tuple[str, ...]]:
    doc = bundled_json("gpu_curated_keywords.json")
    return {name: tuple(words) for name, words in doc.items()}


@lru_cache(maxsize=1)
def gpu_keyword_rules() -> KeywordRules:
    """Base rules with the curated table swapped for GPU-specific entries,
    used when discovery labels metrics it has no help text for."""
    base = default_keyword_rules()
    curated = dict(base.curated)
    curated.update({k: list(v) for k, v in gpu_curated_keywords().items()})
    return KeywordRules(
        curated=curated,
        type_keywords=base.type_keywords,
        patterns=base.patterns,
        stopwords=base.stopwords,
    )


def load_bundled_catalog() -> Catalog:
    """The shipped GPU-cluster catalog fixture, freshly parsed each call so
    callers may mutate their copy through functional updates."""
    path = resources.files("nl2promql").joinpath("data/catalog_gpu_fixture.json")
    return load_catalog(path.read_text(encoding="utf-8"), default_category_keywords())


@dataclass
class AppConfig:
    """Process-level settings for the CLI and the tool service."""

    prometheus_url: str | None = None
    token: str | None = None
    timeout: float = 10.0
    default_window: int = 3600
    catalog_path: str | None = None
    fixtures_dir: str | None = None
    calendar_day_boundaries: bool = False
    extra_gpu_prefixes: tuple[str, ...] = field(default_factory=tuple)

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "AppConfig":
        env = os.environ if environ is None else environ
        window = env.get("DEFAULT_TIME_WINDOW", "").strip()
        prefixes = tuple(
            p.strip() for p in env.get("GPU_METRIC_PREFIXES", "").split(",") if p.strip()
        )
        return cls(
            prometheus_url=env.get("PROMETHEUS_URL") or None,
            token=env.get("PROMETHEUS_TOKEN") or None,
            default_window=int(window) if window else 3600,
            extra_gpu_prefixes=prefixes,
        )

    def vendor_prefixes(self):
        from .gpu import VendorPrefixConfig

        return VendorPrefixConfig(custom=self.extra_gpu_prefixes)
