"""Text retrieval: fetching, HTML cleaning, segmentation and windowing.

A reference becomes a set of passages in four steps: fetch the page (or take
a raw document), reduce the HTML to plain text with ordered cleaning rules,
split the text into sentence segments, then slide n-sized windows over the
segment sequence and join each window with single spaces.

The cleaner aims at recall, not precision: it removes only markup that is
certainly boilerplate (scripts, styles, navigation landmarks) and otherwise
keeps every reachable text node, leaving relevance filtering to the scoring
stage. Cleaning rules, in order:

  1. script/style/code/noscript subtrees are dropped;
  2. whitespace runs inside continuous-text elements collapse to one space;
  3. boilerplate containers (nav, footer, navigation/banner/contentinfo
     roles, table-of-contents landmarks) are dropped;
  4. text broken across sequential same-tag blocks is joined while the
     earlier fragment does not end a sentence;
  5. blocks still lacking terminal punctuation get a final period;
  6. remaining markup is stripped, blocks joined with single spaces.
"""

from __future__ import annotations

import importlib.resources
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from html import unescape
from html.parser import HTMLParser
from pathlib import Path
from typing import Protocol
from urllib.parse import urlparse

import requests

from .core import Passage, ProveError, ValidationError

DEFAULT_WINDOW_SIZES = frozenset({1, 2})
DEFAULT_TIMEOUT_MS = 30_000

_HTML_CONTENT_TYPES = ("text/html", "application/xhtml+xml", "application/xhtml")


class Unavailable(ProveError):
    """The referenced page cannot be retrieved (bad URL, 4xx/5xx, refusal)."""


class NotHtml(ProveError):
    """The URL resolved to content that is not an HTML page."""


class FetchTimeout(ProveError):
    """The page did not answer within the configured timeout."""


@dataclass(frozen=True)
class SegmentList:
    """Ordered sentence segments extracted from one reference."""

    segments: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))
        for i, segment in enumerate(self.segments):
            if not segment or not segment.strip():
                raise ValidationError(f"segment {i} is empty or whitespace-only")

    def __len__(self) -> int:
        return len(self.segments)


@dataclass(frozen=True)
class WindowConfig:
    """Window sizes to slide over the segment sequence; default {1, 2}."""

    sizes: frozenset[int] = DEFAULT_WINDOW_SIZES

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", frozenset(self.sizes))
        if not self.sizes:
            raise ValidationError("window configuration needs at least one size")
        if any(n < 1 for n in self.sizes):
            raise ValidationError("window sizes must be positive")


def fetch(url: str, timeout_ms: int = DEFAULT_TIMEOUT_MS,
          session: requests.Session | None = None) -> tuple[str, str]:
    """Resolve a URL to (final_url, html), following redirects.

    ``file:`` URLs read the named file verbatim with final_url equal to the
    input, which keeps the whole pipeline runnable offline against fixtures.
    """
    parsed = urlparse(url)
    if parsed.scheme == "file":
        path = Path(parsed.path)
        try:
            return url, path.read_text("utf-8")
        except OSError as exc:
            raise Unavailable(f"cannot read {path}: {exc}") from exc
    if parsed.scheme not in ("http", "https") or not parsed.netloc:
        raise Unavailable(f"not a fetchable http(s) URL: {url!r}")
    try:
        response = (session or requests).get(url, timeout=timeout_ms / 1000.0)
    except requests.Timeout as exc:
        raise FetchTimeout(f"{url} timed out after {timeout_ms} ms") from exc
    except requests.RequestException as exc:
        raise Unavailable(f"cannot fetch {url}: {exc}") from exc
    if response.status_code >= 400:
        raise Unavailable(f"{url} answered HTTP {response.status_code}")
    content_type = response.headers.get("Content-Type", "")
    if content_type and not any(t in content_type.lower() for t in _HTML_CONTENT_TYPES):
        if "text/plain" not in content_type.lower():
            raise NotHtml(f"{url} served {content_type!r}")
    return response.url, response.text


def fetch_many(urls: list[str], timeout_ms: int = DEFAULT_TIMEOUT_MS,
               max_in_flight: int = 4) -> list[tuple[str, str] | ProveError]:
    """Fetch several URLs concurrently; results (or errors) in input order."""

    def one(url: str) -> tuple[str, str] | ProveError:
        try:
            return fetch(url, timeout_ms=timeout_ms)
        except ProveError as exc:
            return exc

    with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
        return list(pool.map(one, urls))


# --- HTML cleaning ---------------------------------------------------------

# Elements whose entire subtree is dropped. script/style/code carry no prose;
# nav/footer and the listed ARIA roles are navigation landmarks.
_DROP_TAGS = frozenset({"script", "style", "code", "noscript", "template", "nav", "footer"})
_DROP_ROLES = frozenset({"navigation", "menu", "menubar", "banner", "contentinfo"})
_TOC_TOKENS = frozenset({"toc", "table-of-contents", "tableofcontents"})

# Tags that open a new text block; everything else flows inline.
_BLOCK_TAGS = frozenset({
    "address", "article", "aside", "blockquote", "body", "caption", "dd",
    "details", "div", "dl", "dt", "fieldset", "figcaption", "figure", "form",
    "h1", "h2", "h3", "h4", "h5", "h6", "head", "header", "hr", "html", "li",
    "main", "ol", "p", "pre", "section", "summary", "table", "tbody", "td",
    "tfoot", "th", "thead", "title", "tr", "ul",
})

_TERMINAL = ".!?…"
_TRAILING_CLOSERS = "\"'’”)]»}"
_WS_RE = re.compile(r"\s+")

# Leftover text can contain markup-like sequences (escaped examples such as
# "&lt;b&gt;", stray brackets from broken pages). A space after the opener
# keeps them inert if the output is ever parsed again, which is what makes
# cleaning idempotent.
_REPARSE_TAG_RE = re.compile(r"<(?=[A-Za-z!/?])")
_CHARREF_RE = re.compile(r"&(?:#[0-9]+;?|#[xX][0-9a-fA-F]+;?|[A-Za-z][A-Za-z0-9]{0,32};?)")


def _neutralize_markup(text: str) -> str:
    def _space_if_resolvable(match: re.Match) -> str:
        candidate = match.group(0)
        if unescape(candidate) != candidate:
            return "& " + candidate[1:]
        return candidate

    text = _REPARSE_TAG_RE.sub("< ", text)
    return _CHARREF_RE.sub(_space_if_resolvable, text)


def _is_boilerplate(tag: str, attrs: list[tuple[str, str | None]]) -> bool:
    if tag in _DROP_TAGS:
        return True
    for name, value in attrs:
        if value is None:
            continue
        if name == "role" and value.strip().lower() in _DROP_ROLES:
            return True
        if name in ("id", "class"):
            tokens = {t.lower() for t in value.replace("_", "-").split()}
            if tokens & _TOC_TOKENS:
                return True
    return False


def _ends_sentence(text: str) -> bool:
    trimmed = text.rstrip().rstrip(_TRAILING_CLOSERS)
    return bool(trimmed) and trimmed[-1] in _TERMINAL


def _has_trailing_punctuation(text: str) -> bool:
    trimmed = text.rstrip().rstrip(_TRAILING_CLOSERS)
    return bool(trimmed) and trimmed[-1] in _TERMINAL + ":;,"


class _TextBlockParser(HTMLParser):
    """Lenient single-pass walker producing (block_tag, raw_text) pairs."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.blocks: list[tuple[str, str]] = []
        self._parts: list[str] = []
        self._block_tag = ""
        self._skip_depth = 0
        self._skip_tag: str | None = None

    def _flush(self) -> None:
        text = "".join(self._parts)
        if text.strip():
            self.blocks.append((self._block_tag, text))
        self._parts = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if self._skip_depth:
            if tag == self._skip_tag:
                self._skip_depth += 1
            return
        if _is_boilerplate(tag, attrs):
            self._flush()
            self._skip_depth = 1
            self._skip_tag = tag
            return
        if tag == "br":
            self._parts.append(" ")
        elif tag in _BLOCK_TAGS:
            self._flush()
            self._block_tag = tag

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if self._skip_depth:
            return
        if tag == "br":
            self._parts.append(" ")
        elif tag in _BLOCK_TAGS and not _is_boilerplate(tag, attrs):
            self._flush()

    def handle_endtag(self, tag: str) -> None:
        if self._skip_depth:
            if tag == self._skip_tag:
                self._skip_depth -= 1
                if self._skip_depth == 0:
                    self._skip_tag = None
            return
        if tag in _BLOCK_TAGS:
            self._flush()
            self._block_tag = ""

    def handle_data(self, data: str) -> None:
        if not self._skip_depth:
            self._parts.append(data)

    def close(self) -> None:
        super().close()
        self._flush()


def clean_html(html: str) -> str:
    """Reduce an HTML page to plain text via the ordered cleaning rules.

    Lenient by construction: malformed markup degrades to concatenated text
    nodes, and cleaning already-plain text is a no-op (the function is
    idempotent on its own output).
    """
    parser = _TextBlockParser()
    parser.feed(html)
    parser.close()

    normalized = [
        (tag, _neutralize_markup(_WS_RE.sub(" ", text).strip()))
        for tag, text in parser.blocks
    ]
    normalized = [(tag, text.strip()) for tag, text in normalized if text.strip()]

    # Join text broken across sequential same-tag blocks while the earlier
    # fragment has not finished its sentence.
    joined: list[tuple[str, str]] = []
    for tag, text in normalized:
        if joined and joined[-1][0] == tag and not _ends_sentence(joined[-1][1]):
            joined[-1] = (tag, joined[-1][1] + " " + text)
        else:
            joined.append((tag, text))

    finished = []
    for _, text in joined:
        if not _has_trailing_punctuation(text):
            text += "."
        finished.append(text)
    return " ".join(finished)


# --- Sentence segmentation -------------------------------------------------


class Segmenter(Protocol):
    """Anything that splits plain text into ordered sentence segments."""

    def segment(self, text: str) -> list[str]: ...


def _load_abbreviations() -> frozenset[str]:
    text = importlib.resources.files("prove.data").joinpath("abbreviations.txt").read_text("utf-8")
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    return frozenset(entries)


class RuleSegmenter:
    """Rule-based splitter with an abbreviation guard list.

    Splits after terminal punctuation (plus closing quotes/brackets) that is
    followed by whitespace and a capital or digit, unless the token carrying
    the period is a known abbreviation or a single-letter initial.
    """

    _BOUNDARY_RE = re.compile(
        r"([.!?…]+)([\"'’”)\]»]*)(\s+)(?=[\"'‘“(\[]*[A-Z0-9])"
    )
    _TOKEN_BEFORE_RE = re.compile(r"([A-Za-z0-9][A-Za-z0-9.\-]*)$")
    _WORD_BEFORE_RE = re.compile(r"([A-Za-z][A-Za-z.\-]*)\s+$")

    def __init__(self, abbreviations: frozenset[str] | None = None) -> None:
        self.abbreviations = (
            abbreviations if abbreviations is not None else _load_abbreviations()
        )

    def _guarded(self, text: str, punct_start: int, punct: str) -> bool:
        if punct != ".":
            return False
        match = self._TOKEN_BEFORE_RE.search(text, 0, punct_start)
        if not match:
            return False
        token = match.group(1)
        if len(token) == 1 and token.isupper():
            # A middle initial ("James H. Billington"), recognised by the
            # capitalised word in front of it; a bare "B." after a lowercase
            # word ends the sentence.
            before = self._WORD_BEFORE_RE.search(text, 0, match.start(1))
            return bool(before) and before.group(1)[0].isupper()
        return token in self.abbreviations or token.rstrip(".") in self.abbreviations

    def segment(self, text: str) -> list[str]:
        segments = []
        start = 0
        for match in self._BOUNDARY_RE.finditer(text):
            if self._guarded(text, match.start(1), match.group(1)):
                continue
            end = match.end(2)
            piece = text[start:end].strip()
            if piece:
                segments.append(piece)
            start = match.end(3)
        tail = text[start:].strip()
        if tail:
            segments.append(tail)
        return segments


_DEFAULT_SEGMENTER = RuleSegmenter()


def segment(text: str, segmenter: Segmenter | None = None) -> SegmentList:
    """Split plain text (or a raw text document) into sentence segments."""
    chosen = segmenter or _DEFAULT_SEGMENTER
    pieces = [p.strip() for p in chosen.segment(text)]
    return SegmentList(segments=tuple(p for p in pieces if p))


def window(segments: SegmentList, config: WindowConfig | None = None) -> list[Passage]:
    """All n-sized sliding windows over the segments, for each configured n.

    For each n there are max(0, |S| - n + 1) windows; each passage records its
    window size and segment span, and its text is the single-space join of the
    covered segments. Output is ordered by (window size, start index).
    """
    config = config or WindowConfig()
    items = segments.segments
    passages = []
    for n in sorted(config.sizes):
        for i in range(0, len(items) - n + 1):
            passages.append(
                Passage(
                    text=" ".join(items[i:i + n]),
                    window_size=n,
                    start_index=i,
                    end_index=i + n - 1,
                )
            )
    return passages
