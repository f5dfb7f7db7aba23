"""Serving layer for the verbalisation, relevance and stance models."""

from .app import create_app
from .config import ServiceConfig, load_config
from .models import ModelRegistry, directory_digest

__all__ = [
    "ModelRegistry",
    "ServiceConfig",
    "create_app",
    "directory_digest",
    "load_config",
]

__version__ = "0.1.0"
