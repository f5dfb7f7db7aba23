"""Session fixtures: toy checkpoints, a loaded registry, and a test client."""

from __future__ import annotations

import os
from pathlib import Path

import pytest

os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")
os.environ.setdefault("TRANSFORMERS_VERBOSITY", "error")

from prove_service.config import ServiceConfig
from prove_service.models import ModelRegistry
from prove_service.tiny_checkpoints import build_all


@pytest.fixture(scope="session")
def checkpoints(tmp_path_factory) -> dict[str, Path]:
    root = tmp_path_factory.mktemp("checkpoints")
    return build_all(root, seed=0, steps=300)


@pytest.fixture(scope="session")
def service_config(checkpoints) -> ServiceConfig:
    return ServiceConfig(
        verbaliser_path=str(checkpoints["verbaliser"]),
        relevance_path=str(checkpoints["relevance"]),
        stance_path=str(checkpoints["stance"]),
        device="cpu",
        max_batch=8,
        batch_size=4,
    )


@pytest.fixture(scope="session")
def registry(service_config) -> ModelRegistry:
    reg = ModelRegistry(service_config)
    reg.load_all()
    return reg


@pytest.fixture(scope="session")
def client(registry):
    from fastapi.testclient import TestClient

    from prove_service.app import create_app

    return TestClient(create_app(registry))
