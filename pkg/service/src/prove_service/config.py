"""Service configuration from a YAML file and environment variables.

Environment overrides (highest precedence):

    PROVE_SERVICE_VERBALISER / _RELEVANCE / _STANCE   checkpoint paths
    PROVE_SERVICE_DEVICE                              cpu | cuda | auto
    PROVE_SERVICE_MAX_BATCH                           request batch cap
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml


class ServiceConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GenerationSettings:
    num_beams: int = 3
    max_new_tokens: int = 64
    min_new_tokens: int = 1


@dataclass(frozen=True)
class ServiceConfig:
    verbaliser_path: str | None = None
    relevance_path: str | None = None
    stance_path: str | None = None
    device: str = "cpu"
    max_batch: int = 64
    batch_size: int = 16
    max_input_tokens: int = 256
    input_template: str = "{subject} | {predicate} | {object}"
    generation: GenerationSettings = field(default_factory=GenerationSettings)
    # Optional sha256 pins, keyed by model name (verbaliser/relevance/stance).
    expected_digests: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.max_batch < 1:
            raise ServiceConfigError("max_batch must be at least 1")
        if self.batch_size < 1:
            raise ServiceConfigError("batch_size must be at least 1")
        if self.device not in ("cpu", "cuda", "auto"):
            raise ServiceConfigError(f"unknown device {self.device!r}")


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    """Read the YAML config (if given) and apply environment overrides."""
    values: dict = {}
    if path is not None:
        payload = yaml.safe_load(Path(path).read_text("utf-8")) or {}
        if not isinstance(payload, dict):
            raise ServiceConfigError(f"{path}: expected a mapping")
        generation = payload.pop("generation", None)
        known = {f for f in ServiceConfig.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise ServiceConfigError(f"{path}: unknown keys {sorted(unknown)}")
        values.update(payload)
        if generation:
            values["generation"] = GenerationSettings(**generation)
    config = ServiceConfig(**values)

    env = os.environ if env is None else env
    overrides: dict = {}
    for key, attr in (
        ("PROVE_SERVICE_VERBALISER", "verbaliser_path"),
        ("PROVE_SERVICE_RELEVANCE", "relevance_path"),
        ("PROVE_SERVICE_STANCE", "stance_path"),
        ("PROVE_SERVICE_DEVICE", "device"),
    ):
        if env.get(key):
            overrides[attr] = env[key]
    if env.get("PROVE_SERVICE_MAX_BATCH"):
        overrides["max_batch"] = int(env["PROVE_SERVICE_MAX_BATCH"])
    return replace(config, **overrides) if overrides else config
