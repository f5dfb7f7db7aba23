#!/usr/bin/env python3
"""Create toy checkpoints plus a ready-to-run service config.

    python scripts/make_tiny_checkpoints.py [output-dir]

Then: prove-serve --config <output-dir>/service.yaml
"""

from __future__ import annotations

import sys
from pathlib import Path

import yaml

from prove_service.models import directory_digest
from prove_service.tiny_checkpoints import build_all


def main() -> None:
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("tiny-checkpoints")
    paths = build_all(root)
    config = {
        "verbaliser_path": str(paths["verbaliser"]),
        "relevance_path": str(paths["relevance"]),
        "stance_path": str(paths["stance"]),
        "device": "cpu",
        "max_batch": 64,
        "expected_digests": {
            name: directory_digest(path) for name, path in paths.items()
        },
    }
    config_path = root / "service.yaml"
    config_path.write_text(yaml.safe_dump(config, sort_keys=True), "utf-8")
    for name, path in paths.items():
        print(f"{name}: {path}")
    print(f"config: {config_path}")


if __name__ == "__main__":
    main()
