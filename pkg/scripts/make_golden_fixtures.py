#!/usr/bin/env python3
"""Regenerate the pinned extraction outputs for the bundled HTML fixtures.

Run from the repository root after deliberate extraction-rule changes, then
review the diff before committing:

    python scripts/make_golden_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from prove.retrieval import WindowConfig, clean_html, segment, window

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def extraction_payload(html: str) -> dict:
    segments = segment(clean_html(html))
    passages = window(segments, WindowConfig(frozenset({1, 2})))
    return {
        "segments": list(segments.segments),
        "passages": [
            [p.window_size, p.start_index, p.end_index, p.text] for p in passages
        ],
    }


def pin_verify_report(golden_dir: Path) -> None:
    """Pin the CLI's JSON report for the bundled example pair."""
    from click.testing import CliRunner

    from prove.cli import main as cli_main

    result = CliRunner().invoke(cli_main, [
        "verify",
        "--triple", str(FIXTURES / "triple_billington.json"),
        "--html", str(FIXTURES / "html" / "fig1_billington.html"),
        "--aggregator", "weighted_sum",
        "--offline",
    ])
    if result.exit_code != 0:
        raise SystemExit(f"verify failed: {result.output}")
    (golden_dir / "verify_fig1_report.json").write_bytes(result.stdout.encode("utf-8"))
    print("pinned verify_fig1_report.json")


def main() -> None:
    golden_dir = FIXTURES / "golden"
    golden_dir.mkdir(exist_ok=True)
    for html_path in sorted((FIXTURES / "html").glob("*.html")):
        payload = extraction_payload(html_path.read_text("utf-8"))
        out_path = golden_dir / (html_path.stem + ".json")
        out_path.write_text(
            json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
            "utf-8",
        )
        print(f"{html_path.name}: {len(payload['segments'])} segments, "
              f"{len(payload['passages'])} passages -> {out_path.name}")
    pin_verify_report(golden_dir)


if __name__ == "__main__":
    main()
