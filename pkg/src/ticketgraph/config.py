"""Declarative runtime configuration.

One YAML file carries every knob; TICKETGRAPH_* environment variables
override file values field by field, so CI and containers can tweak a
run without editing files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping, Optional

import yaml

from .adapters import HttpAdapter, TextGenerationAdapter
from .embedding import HashEmbedder
from .errors import ConfigurationError
from .stubs import build_stub_adapter
from .template import GraphTemplate

ENV_PREFIX = "TICKETGRAPH_"

ADAPTER_MODES = ("none", "stub", "remote")


@dataclass
class AppConfig:
    theta: float = 0.75
    top_m: Optional[int] = None
    k_ticket: int = 3
    anchor_count: int = 1
    dimension: int = 512
    max_chunk_tokens: int = 256
    chunk_overlap: int = 32
    chunk_agg: str = "max"
    adapter_mode: str = "none"
    adapter_url: str = ""
    adapter_timeout_s: float = 10.0
    adapter_retries: int = 1
    answer_deadline_s: Optional[float] = None
    listen_host: str = "127.0.0.1"
    listen_port: int = 8077
    api_token: str = ""
    snapshot_dir: str = "snapshot"


def _parse_optional_int(raw: str) -> Optional[int]:
    if raw.strip().lower() in ("", "none", "null"):
        return None
    return int(raw)


def _parse_optional_float(raw: str) -> Optional[float]:
    if raw.strip().lower() in ("", "none", "null"):
        return None
    return float(raw)


_ENV_PARSERS = {
    "theta": float,
    "top_m": _parse_optional_int,
    "k_ticket": int,
    "anchor_count": int,
    "dimension": int,
    "max_chunk_tokens": int,
    "chunk_overlap": int,
    "chunk_agg": str,
    "adapter_mode": str,
    "adapter_url": str,
    "adapter_timeout_s": float,
    "adapter_retries": int,
    "answer_deadline_s": _parse_optional_float,
    "listen_host": str,
    "listen_port": int,
    "api_token": str,
    "snapshot_dir": str,
}


def validate_config(config: AppConfig) -> AppConfig:
    if not -1.0 <= config.theta <= 1.0:
        raise ConfigurationError(f"theta must lie in [-1, 1], got {config.theta}")
    if config.top_m is not None and config.top_m < 1:
        raise ConfigurationError(f"top_m must be >= 1, got {config.top_m}")
    if config.k_ticket < 1:
        raise ConfigurationError(f"k_ticket must be >= 1, got {config.k_ticket}")
    if config.anchor_count < 1:
        raise ConfigurationError(f"anchor_count must be >= 1, got {config.anchor_count}")
    if config.dimension < 64:
        raise ConfigurationError(f"dimension must be >= 64, got {config.dimension}")
    if config.max_chunk_tokens < 1:
        raise ConfigurationError(
            f"max_chunk_tokens must be >= 1, got {config.max_chunk_tokens}"
        )
    if not 0 <= config.chunk_overlap < config.max_chunk_tokens:
        raise ConfigurationError(
            "chunk_overlap must satisfy 0 <= overlap < max_chunk_tokens"
        )
    if config.chunk_agg not in ("max", "sum"):
        raise ConfigurationError(f"chunk_agg must be 'max' or 'sum', got {config.chunk_agg!r}")
    if config.adapter_mode not in ADAPTER_MODES:
        raise ConfigurationError(
            f"adapter_mode must be one of {ADAPTER_MODES}, got {config.adapter_mode!r}"
        )
    if config.adapter_mode == "remote" and not config.adapter_url:
        raise ConfigurationError("adapter_mode 'remote' requires adapter_url")
    if not 1 <= config.listen_port <= 65535:
        raise ConfigurationError(f"listen_port out of range: {config.listen_port}")
    return config


def load_config(
    path: Optional[Path] = None,
    env: Optional[Mapping[str, str]] = None,
) -> AppConfig:
    """Read config from YAML (optional) and the environment.

    Unknown file keys are rejected so typos fail loudly.
    """
    values: dict = {}
    if path is not None:
        try:
            doc = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"malformed config {path}: {exc}") from exc
        if doc is None:
            doc = {}
        if not isinstance(doc, dict):
            raise ConfigurationError(f"config {path} must be a mapping")
        known = {f.name for f in fields(AppConfig)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        values.update(doc)

    env = os.environ if env is None else env
    for name, parser in _ENV_PARSERS.items():
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            try:
                values[name] = parser(env[env_key])
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"bad value for {env_key}: {exc}") from exc

    try:
        config = AppConfig(**values)
    except TypeError as exc:
        raise ConfigurationError(f"invalid config: {exc}") from exc
    return validate_config(config)


def make_embedder(config: AppConfig) -> HashEmbedder:
    return HashEmbedder(dimension=config.dimension)


def make_adapter(
    config: AppConfig, template: GraphTemplate
) -> Optional[TextGenerationAdapter]:
    if config.adapter_mode == "none":
        return None
    if config.adapter_mode == "stub":
        return build_stub_adapter(template)
    return HttpAdapter(
        url=config.adapter_url,
        timeout_s=config.adapter_timeout_s,
        retries=config.adapter_retries,
        api_token=config.api_token or None,
    )
