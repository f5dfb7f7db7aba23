"""Scoring backends: the wire protocol client and the in-process baseline.

Three scoring services back the pipeline: verbalisation (labels -> sentence),
relevance (claim + passages -> scores in [-1, 1]) and stance (claim + evidence
-> per-evidence distributions over SUPP/REF/NEI). Remote backends speak a
small JSON-over-HTTP protocol; the baseline backend is a deterministic
token-overlap stand-in so the whole pipeline runs hermetically. Baseline
scores are plumbing for tests and offline runs, not a model: no quality
claims attach to them.

Wire protocol (HTTP POST, UTF-8 JSON bodies):

    /verbalise  {"subject": s, "predicate": p, "object": o}
                -> {"verbalisation": text}
    /relevance  {"claim": c, "passages": [p0, ...]}
                -> {"scores": [r0, ...]}           each in [-1, 1]
    /stance     {"claim": c, "evidence": [e0, ...]}
                -> {"distributions": [[s, r, n], ...]}  rows sum to 1

Requests carry at most BATCH_LIMIT items; the client splits larger batches
and reassembles responses in order.
"""

from __future__ import annotations

import importlib.resources
import math
import random
import re
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor

import requests

from .core import DISTRIBUTION_TOLERANCE, ProveError

BATCH_LIMIT = 64

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class BackendError(ProveError):
    """Base class for backend failures."""


class BackendTimeout(BackendError):
    """The remote backend did not answer within the configured timeout."""


class BackendProtocolError(BackendError):
    """The backend answered with something outside the wire contract."""


def tokens(text: str) -> frozenset[str]:
    """Case-insensitive alphanumeric token set used by the baseline scorers."""
    return frozenset(_TOKEN_RE.findall(text.lower()))


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    """Set overlap in [0, 1]; two empty sets count as identical."""
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def _softmax(values: tuple[float, ...]) -> tuple[float, ...]:
    peak = max(values)
    exps = [math.exp(v - peak) for v in values]
    total = sum(exps)
    return tuple(e / total for e in exps)


def _load_wordlist(name: str) -> frozenset[str]:
    text = importlib.resources.files("prove.data").joinpath(name).read_text("utf-8")
    words = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line)
    return frozenset(words)


class ScorerBackend(ABC):
    """Contract shared by all scoring backends.

    Implementations must return one score per passage (each in [-1, 1]) and
    one normalised stance triple per evidence; the pipeline re-validates both,
    so swapping backends can never change output shapes or ranges.
    """

    @abstractmethod
    def verbalise(self, subject: str, predicate: str, object_: str) -> str:
        """Produce a sentence expressing the three labels."""

    @abstractmethod
    def relevance(self, claim: str, passages: list[str]) -> list[float]:
        """Score each passage's contextual relevance to the claim."""

    @abstractmethod
    def stance(self, claim: str, evidence: list[str]) -> list[tuple[float, float, float]]:
        """Return one (supp, ref, nei) distribution per evidence."""


class BaselineBackend(ScorerBackend):
    """Deterministic token-overlap scorers; pure and platform-independent."""

    def __init__(self) -> None:
        self._negations = _load_wordlist("negation_words.txt")

    def verbalise(self, subject: str, predicate: str, object_: str) -> str:
        return f"{subject}'s {predicate} is {object_}."

    def relevance(self, claim: str, passages: list[str]) -> list[float]:
        claim_tokens = tokens(claim)
        return [2.0 * jaccard(claim_tokens, tokens(p)) - 1.0 for p in passages]

    def stance(self, claim: str, evidence: list[str]) -> list[tuple[float, float, float]]:
        claim_tokens = tokens(claim)
        out = []
        for text in evidence:
            evidence_tokens = tokens(text)
            overlap = jaccard(claim_tokens, evidence_tokens)
            negated = 1.0 if evidence_tokens & self._negations else 0.0
            out.append(_softmax((overlap * (1.0 - negated), overlap * negated, 1.0 - overlap)))
        return out


class RemoteBackend(ScorerBackend):
    """HTTP client for a remote scoring service.

    Batches of more than BATCH_LIMIT items are split and dispatched with up to
    ``max_in_flight`` concurrent requests; responses are reassembled in request
    order. Transport errors are retried once with jitter; protocol errors are
    never retried.
    """

    def __init__(
        self,
        endpoint: str,
        timeout_ms: int = 30_000,
        max_in_flight: int = 4,
        session: requests.Session | None = None,
    ) -> None:
        if timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be at least 1")
        self.endpoint = endpoint.rstrip("/")
        self.timeout_ms = timeout_ms
        self.max_in_flight = max_in_flight
        self._session = session or requests.Session()

    def _post(self, path: str, payload: dict) -> dict:
        url = f"{self.endpoint}{path}"
        timeout = self.timeout_ms / 1000.0
        last_exc: Exception | None = None
        for attempt in range(2):
            try:
                response = self._session.post(url, json=payload, timeout=timeout)
            except requests.Timeout as exc:
                raise BackendTimeout(f"{url} timed out after {self.timeout_ms} ms") from exc
            except requests.RequestException as exc:
                last_exc = exc
                if attempt == 0:
                    time.sleep(random.uniform(0.05, 0.25))
                    continue
                raise BackendError(f"transport failure calling {url}: {exc}") from exc
            if response.status_code != 200:
                raise BackendProtocolError(
                    f"{url} answered HTTP {response.status_code}: {response.text[:200]}"
                )
            try:
                body = response.json()
            except ValueError as exc:
                raise BackendProtocolError(f"{url} answered non-JSON body") from exc
            if not isinstance(body, dict):
                raise BackendProtocolError(f"{url} answered a non-object JSON body")
            return body
        raise BackendError(f"transport failure calling {url}: {last_exc}")

    def _batched(self, path: str, payload_key: str, items: list[str], claim: str,
                 result_key: str) -> list:
        if not items:
            return []
        chunks = [items[i:i + BATCH_LIMIT] for i in range(0, len(items), BATCH_LIMIT)]

        def one(chunk: list[str]) -> list:
            body = self._post(path, {"claim": claim, payload_key: chunk})
            if result_key not in body:
                raise BackendProtocolError(f"{path} response missing {result_key!r}")
            values = body[result_key]
            if not isinstance(values, list) or len(values) != len(chunk):
                raise BackendProtocolError(
                    f"{path} returned {len(values) if isinstance(values, list) else '?'} "
                    f"results for {len(chunk)} inputs"
                )
            return values

        if len(chunks) == 1:
            batches = [one(chunks[0])]
        else:
            with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
                batches = list(pool.map(one, chunks))
        return [value for batch in batches for value in batch]

    def verbalise(self, subject: str, predicate: str, object_: str) -> str:
        body = self._post(
            "/verbalise",
            {"subject": subject, "predicate": predicate, "object": object_},
        )
        if "verbalisation" not in body:
            raise BackendProtocolError("/verbalise response missing 'verbalisation'")
        text = body["verbalisation"]
        if not isinstance(text, str) or not text.strip():
            raise BackendProtocolError("/verbalise returned an empty sentence")
        return text

    def relevance(self, claim: str, passages: list[str]) -> list[float]:
        scores = self._batched("/relevance", "passages", passages, claim, "scores")
        out = []
        for score in scores:
            if not isinstance(score, (int, float)) or isinstance(score, bool):
                raise BackendProtocolError(f"/relevance returned non-numeric score {score!r}")
            out.append(float(score))
        return out

    def stance(self, claim: str, evidence: list[str]) -> list[tuple[float, float, float]]:
        rows = self._batched("/stance", "evidence", evidence, claim, "distributions")
        out = []
        for row in rows:
            if (
                not isinstance(row, list)
                or len(row) != 3
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row)
            ):
                raise BackendProtocolError(f"/stance returned malformed row {row!r}")
            out.append((float(row[0]), float(row[1]), float(row[2])))
        return out


def validate_stance_rows(rows: list[tuple[float, float, float]]) -> None:
    """Shared contract check: each row is a distribution over three classes."""
    for i, row in enumerate(rows):
        if len(row) != 3:
            raise BackendProtocolError(f"stance row {i} has {len(row)} entries, not 3")
        if any(not 0.0 <= v <= 1.0 for v in row):
            raise BackendProtocolError(f"stance row {i} has components outside [0, 1]: {row}")
        if abs(sum(row) - 1.0) > DISTRIBUTION_TOLERANCE:
            raise BackendProtocolError(f"stance row {i} sums to {sum(row)}, not 1")


def validate_relevance_scores(scores: list[float], expected: int) -> None:
    """Shared contract check: one in-range score per passage."""
    if len(scores) != expected:
        raise BackendProtocolError(f"got {len(scores)} scores for {expected} passages")
    for i, score in enumerate(scores):
        if not -1.0 <= score <= 1.0:
            raise BackendProtocolError(f"score {i} = {score} outside [-1, 1]")


def check_backend_contract(backend: ScorerBackend) -> None:
    """Assert the full output contract against any backend.

    Exercises all three services with small batches: verbalisations must be
    non-empty sentences, relevance scores one-per-passage in [-1, 1], stance
    rows normalised distributions. Raises BackendProtocolError on the first
    violation; used both for the in-process baselines and as the conformance
    gate for live scoring services.
    """
    sentence = backend.verbalise("Anna Vogel", "occupation", "sculptor")
    if not isinstance(sentence, str) or not sentence.strip():
        raise BackendProtocolError("verbalise returned an empty sentence")

    claim = "Anna Vogel's occupation is sculptor."
    passages = [
        "Anna Vogel is a sculptor from Dresden.",
        "Opening hours vary by season.",
        "She is not a sculptor at all.",
    ]
    scores = backend.relevance(claim, passages)
    validate_relevance_scores(scores, expected=len(passages))
    if backend.relevance(claim, []) != []:
        raise BackendProtocolError("relevance of an empty batch must be empty")

    rows = backend.stance(claim, passages)
    if len(rows) != len(passages):
        raise BackendProtocolError(
            f"got {len(rows)} stance rows for {len(passages)} evidence"
        )
    validate_stance_rows(rows)

    # Determinism across identical calls.
    if backend.relevance(claim, passages) != scores:
        raise BackendProtocolError("relevance is not deterministic")
    if backend.stance(claim, passages) != rows:
        raise BackendProtocolError("stance is not deterministic")
