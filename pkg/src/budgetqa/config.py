"""Runtime configuration: a JSON file with CLI-flag overrides.

Precedence is flag > file > default. Exactly one search backend must be
configured and every referenced path must resolve at load time.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .compose import AnswerFilter, DEFAULT_FILTERS, load_filters
from .control import DEFAULT_PROBE_SIZE, Preferences
from .errors import ConfigError
from .models import DEFAULT_THRESHOLDS
from .rewrite import (
    DEFAULT_CONJUNCTIVE_WEIGHT,
    DEFAULT_MAX_PHRASAL,
    DEFAULT_PHRASAL_WEIGHT,
    SCORERS,
    GrammarScorer,
)
from .search import DEFAULT_LIMIT, DEFAULT_WINDOW, OfflineProvider, SearchProvider, build_index, load_corpus, load_index
from .text import load_stopwords
from .tree import TreeConfig


@dataclass
class Config:
    corpus_path: str | None = None
    index_path: str | None = None
    endpoint: str | None = None
    token: str | None = None
    query_param: str = "q"
    results_key: str = "results"
    summary_key: str = "summary"
    phrasal_weight: float = DEFAULT_PHRASAL_WEIGHT
    conjunctive_weight: float = DEFAULT_CONJUNCTIVE_WEIGHT
    max_phrasal: int = DEFAULT_MAX_PHRASAL
    window: int = DEFAULT_WINDOW
    limit: int = DEFAULT_LIMIT
    stopwords_path: str | None = None
    filters_path: str | None = None
    tree: TreeConfig = field(default_factory=TreeConfig)
    thresholds: tuple[int, ...] = DEFAULT_THRESHOLDS
    k: float = 10.0
    c: float = 1.0
    seed: int = 0
    scorer: str = "default"
    models_dir: str | None = None
    probe_size: int = DEFAULT_PROBE_SIZE
    max_in_flight: int = 4

    def __post_init__(self):
        backends = sum(1 for b in (self.corpus_path, self.index_path, self.endpoint) if b)
        if backends > 1:
            raise ConfigError("configure exactly one backend (corpus, index or endpoint)")
        for label, path in (
            ("corpus", self.corpus_path),
            ("index", self.index_path),
            ("stopwords", self.stopwords_path),
            ("filters", self.filters_path),
            ("models_dir", self.models_dir),
        ):
            if path and not os.path.exists(path):
                raise ConfigError(f"{label} path does not exist: {path}")
        if self.scorer not in SCORERS:
            raise ConfigError(f"unknown scorer {self.scorer!r}; choose from {sorted(SCORERS)}")

    @property
    def preferences(self) -> Preferences:
        return Preferences(k=self.k, c=self.c)

    def grammar_scorer(self) -> GrammarScorer:
        return SCORERS[self.scorer]()

    def stopwords(self):
        return load_stopwords(self.stopwords_path) if self.stopwords_path else None

    def filter_table(self) -> tuple[AnswerFilter, ...]:
        return load_filters(self.filters_path) if self.filters_path else DEFAULT_FILTERS

    def make_provider(self) -> SearchProvider:
        if self.endpoint:
            from .remote import RemoteProvider

            return RemoteProvider(
                self.endpoint,
                query_param=self.query_param,
                results_key=self.results_key,
                summary_key=self.summary_key,
                token=self.token,
                max_in_flight=self.max_in_flight,
            )
        if self.index_path:
            return OfflineProvider(load_index(self.index_path))
        if self.corpus_path:
            return OfflineProvider(build_index(load_corpus(self.corpus_path), window=self.window))
        raise ConfigError("no backend configured: set corpus, index or endpoint")


_FIELD_ALIASES = {
    "corpus": "corpus_path",
    "index": "index_path",
    "stopwords": "stopwords_path",
    "filters": "filters_path",
}


def load_config(path: str | None, **overrides) -> Config:
    """Load a config file and apply non-None keyword overrides on top."""
    data: dict = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    kwargs: dict = {}
    for key, value in data.items():
        key = _FIELD_ALIASES.get(key, key)
        if key == "tree":
            value = TreeConfig(**value)
        elif key == "thresholds":
            value = tuple(int(n) for n in value)
        kwargs[key] = value
    for key, value in overrides.items():
        if value is not None:
            kwargs[_FIELD_ALIASES.get(key, key)] = value
    try:
        return Config(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad config field: {exc}") from exc
