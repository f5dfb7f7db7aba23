"""Runtime configuration with layered precedence.

Values resolve lowest to highest: built-in defaults, then the key=value
config file, then command-line flags, then the environment (PROVE_BACKEND_URL
overrides any configured backend endpoint). Defaults reproduce the reference
setup: window sizes {1, 2}, five evidence slots, classifier aggregation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

from .backends import BaselineBackend, RemoteBackend, ScorerBackend
from .core import ProveError

BACKEND_URL_ENV = "PROVE_BACKEND_URL"


class ConfigError(ProveError):
    """The config file or option combination is invalid."""


@dataclass(frozen=True)
class CliConfig:
    backend_url: str | None = None
    timeout_ms: int = 30_000
    max_in_flight: int = 4
    window_sizes: frozenset[int] = frozenset({1, 2})
    evidence_k: int = 5
    aggregator: str = "classifier"
    model_path: str | None = None
    seed: int = 0
    offline: bool = False
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ConfigError("timeout_ms must be positive")
        if self.max_in_flight < 1:
            raise ConfigError("max_in_flight must be at least 1")
        if self.evidence_k < 1:
            raise ConfigError("evidence_k must be at least 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")


def parse_window_sizes(text: str) -> frozenset[int]:
    try:
        sizes = frozenset(int(part) for part in text.replace(" ", "").split(",") if part)
    except ValueError as exc:
        raise ConfigError(f"bad window list {text!r}: {exc}") from exc
    if not sizes or any(n < 1 for n in sizes):
        raise ConfigError(f"window sizes must be positive integers, got {text!r}")
    return sizes


_BOOL_VALUES = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def load_config_file(path: str | Path) -> dict:
    """Parse the simple ``key = value`` config format into override kwargs."""
    overrides: dict = {}
    for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in ("backend_url", "model_path", "aggregator"):
            overrides[key] = value or None
        elif key in ("timeout_ms", "max_in_flight", "evidence_k", "seed", "jobs"):
            try:
                overrides[key] = int(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {key} must be an integer") from exc
        elif key == "windows":
            overrides["window_sizes"] = parse_window_sizes(value)
        elif key == "offline":
            if value.lower() not in _BOOL_VALUES:
                raise ConfigError(f"{path}:{lineno}: offline must be a boolean")
            overrides[key] = _BOOL_VALUES[value.lower()]
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return overrides


def resolve_config(
    config_file: str | Path | None = None,
    flag_overrides: dict | None = None,
    env: dict | None = None,
) -> CliConfig:
    """Apply the precedence chain and return the effective configuration."""
    config = CliConfig()
    if config_file is not None:
        config = replace(config, **load_config_file(config_file))
    if flag_overrides:
        config = replace(
            config, **{k: v for k, v in flag_overrides.items() if v is not None}
        )
    env = os.environ if env is None else env
    backend_url = env.get(BACKEND_URL_ENV)
    if backend_url:
        config = replace(config, backend_url=backend_url)
    return config


def build_backend(config: CliConfig) -> ScorerBackend:
    """Choose the scoring backend; offline mode refuses remote endpoints."""
    if config.backend_url:
        if config.offline:
            raise ConfigError(
                "offline mode forbids remote backends; unset the backend URL"
            )
        return RemoteBackend(
            endpoint=config.backend_url,
            timeout_ms=config.timeout_ms,
            max_in_flight=config.max_in_flight,
        )
    return BaselineBackend()
