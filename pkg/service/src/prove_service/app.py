"""HTTP surface: the three scoring endpoints plus a health probe.

The wire format is fixed JSON over POST:

    /verbalise  {"subject", "predicate", "object"} -> {"verbalisation"}
    /relevance  {"claim", "passages": [...]}       -> {"scores": [...]}
    /stance     {"claim", "evidence": [...]}       -> {"distributions": [[s,r,n], ...]}

Status codes: 400 malformed JSON or missing/mistyped fields, 413 over the
batch cap, 422 empty strings, 503 while the backing model is still loading.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .models import ModelRegistry


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": message})


async def _parse(request: Request) -> dict | JSONResponse:
    try:
        payload = await request.json()
    except Exception:
        return _error(400, "request body is not valid JSON")
    if not isinstance(payload, dict):
        return _error(400, "request body must be a JSON object")
    return payload


def _string_field(payload: dict, key: str) -> str | JSONResponse:
    if key not in payload or not isinstance(payload[key], str):
        return _error(400, f"missing or non-string field {key!r}")
    if not payload[key].strip():
        return _error(422, f"field {key!r} must be a non-empty string")
    return payload[key]


def _string_batch(payload: dict, key: str, max_batch: int) -> list[str] | JSONResponse:
    if key not in payload or not isinstance(payload[key], list):
        return _error(400, f"missing or non-list field {key!r}")
    items = payload[key]
    if len(items) > max_batch:
        return _error(413, f"batch of {len(items)} exceeds the cap of {max_batch}")
    for i, item in enumerate(items):
        if not isinstance(item, str):
            return _error(400, f"{key}[{i}] is not a string")
        if not item.strip():
            return _error(422, f"{key}[{i}] must be a non-empty string")
    return items


def create_app(registry: ModelRegistry, load_on_startup: bool = False) -> FastAPI:
    """Build the service around an existing registry.

    With ``load_on_startup`` the models load on a background thread after the
    server starts accepting connections, so clients see 503 until each model
    is ready.
    """
    app = FastAPI(title="prove-inference-service")

    if load_on_startup:
        @app.on_event("startup")
        def _start_loading() -> None:
            threading.Thread(target=registry.load_all, daemon=True).start()

    @app.post("/verbalise")
    async def verbalise(request: Request):
        payload = await _parse(request)
        if isinstance(payload, JSONResponse):
            return payload
        fields = {}
        for key in ("subject", "predicate", "object"):
            value = _string_field(payload, key)
            if isinstance(value, JSONResponse):
                return value
            fields[key] = value
        model = registry.get("verbaliser")
        if model is None:
            return _error(503, "verbaliser model is still loading")
        sentence = model.generate(fields["subject"], fields["predicate"], fields["object"])
        return {"verbalisation": sentence}

    @app.post("/relevance")
    async def relevance(request: Request):
        payload = await _parse(request)
        if isinstance(payload, JSONResponse):
            return payload
        claim = _string_field(payload, "claim")
        if isinstance(claim, JSONResponse):
            return claim
        passages = _string_batch(payload, "passages", registry.config.max_batch)
        if isinstance(passages, JSONResponse):
            return passages
        model = registry.get("relevance")
        if model is None:
            return _error(503, "relevance model is still loading")
        return {"scores": model.score(claim, passages)}

    @app.post("/stance")
    async def stance(request: Request):
        payload = await _parse(request)
        if isinstance(payload, JSONResponse):
            return payload
        claim = _string_field(payload, "claim")
        if isinstance(claim, JSONResponse):
            return claim
        evidence = _string_batch(payload, "evidence", registry.config.max_batch)
        if isinstance(evidence, JSONResponse):
            return evidence
        model = registry.get("stance")
        if model is None:
            return _error(503, "stance model is still loading")
        return {"distributions": model.distributions(claim, evidence)}

    @app.get("/healthz")
    async def healthz():
        return {
            "status": "ok" if registry.all_loaded else "loading",
            "models": registry.versions(),
        }

    return app
