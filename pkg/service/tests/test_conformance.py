"""Protocol conformance: the verification client against the live service.

Starts a real HTTP server on a loopback port and drives it through the
primary package's remote backend, including the full backend contract check
and an end-to-end verification run.
"""

from __future__ import annotations

import socket
import threading
import time

import pytest
import uvicorn

from prove.backends import RemoteBackend, check_backend_contract
from prove.core import Reference, Triple, TripleComponent
from prove.pipeline import PipelineConfig, verify_pair

from prove_service.app import create_app


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="module")
def live_url(registry):
    port = _free_port()
    server = uvicorn.Server(uvicorn.Config(
        create_app(registry), host="127.0.0.1", port=port, log_level="warning",
    ))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("service did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_backend_contract_against_live_service(live_url):
    check_backend_contract(RemoteBackend(live_url, timeout_ms=30_000))


def test_stance_rows_normalised_within_tolerance(live_url):
    backend = RemoteBackend(live_url)
    rows = backend.stance(
        "anna vogel is a sculptor",
        ["anna vogel sculpts", "the bridge is long", "port ellen harbour"],
    )
    assert len(rows) == 3
    for row in rows:
        assert abs(sum(row) - 1.0) <= 1e-6


def test_end_to_end_verification_through_service(live_url):
    triple = Triple(
        id="t",
        subject=TripleComponent(id="Q101", main_label="anna vogel"),
        predicate=TripleComponent(id="P106", main_label="occupation"),
        object=TripleComponent(id="Q102", main_label="sculptor"),
    )
    reference = Reference(
        id="ref", source_kind="url", source_value="https://x.example/page",
        final_url="https://x.example/page",
        html="""
        <html><body>
        <p>anna vogel is a sculptor from dresden.</p>
        <p>her studio overlooks the river.</p>
        </body></html>
        """,
    )
    backend = RemoteBackend(live_url)
    result = verify_pair(
        triple, reference, backend,
        PipelineConfig(aggregators=("weighted_sum", "malon")),
    )
    assert result.verbalisation.origin == "backend"
    assert len(result.evidence) >= 1
    for dist in result.stances:
        assert abs(dist.supp + dist.ref + dist.nei - 1.0) <= 1e-6
    for name in ("weighted_sum", "malon"):
        assert result.results[name].final_class in ("SUPP", "REF", "NEI")


def test_batch_limit_reported_as_413(live_url):
    import requests

    response = requests.post(
        f"{live_url}/relevance",
        json={"claim": "c", "passages": ["p"] * 9},
        timeout=10,
    )
    assert response.status_code == 413
