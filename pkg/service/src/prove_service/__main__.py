"""Run the inference service: ``prove-serve --config service.yaml``."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app
from .config import load_config
from .models import ModelRegistry


def main() -> None:
    parser = argparse.ArgumentParser(description="Serve the scoring models over HTTP.")
    parser.add_argument("--config", help="YAML config file with checkpoint paths.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8041)
    args = parser.parse_args()

    config = load_config(args.config)
    registry = ModelRegistry(config)
    app = create_app(registry, load_on_startup=True)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
