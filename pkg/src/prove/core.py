"""Domain types shared by every pipeline stage.

Value objects only: construction validates invariants, and instances are
immutable (frozen dataclasses), so they can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

# Stance classes, in tie-break order: on exact ties the lowest index wins.
CLASSES: tuple[str, str, str] = ("SUPP", "REF", "NEI")
SUPP, REF, NEI = CLASSES

# Object datatypes that can be turned into a natural-language label.
VERBALISABLE_DATATYPES = ("entity", "string", "quantity", "datetime")

# Distributions must sum to one within this tolerance.
DISTRIBUTION_TOLERANCE = 1e-6


class ProveError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ProveError):
    """A domain invariant was violated at construction or validation time."""


class MissingLabel(ValidationError):
    """A triple component has no usable main label."""


class UnverbalisableObject(ValidationError):
    """The triple's object datatype cannot be expressed as text."""


def argmax_class(values: tuple[float, float, float]) -> str:
    """Index of the largest value mapped to its class, ties broken by CLASSES order."""
    best = 0
    for i in (1, 2):
        if values[i] > values[best]:
            best = i
    return CLASSES[best]


@dataclass(frozen=True)
class TripleComponent:
    """One endpoint (or the predicate) of a triple, with its naming data."""

    id: str
    main_label: str
    aliases: tuple[str, ...] = ()
    description: str | None = None

    def __post_init__(self) -> None:
        if not self.main_label or not self.main_label.strip():
            raise MissingLabel(f"component {self.id!r} has an empty main label")
        object.__setattr__(self, "aliases", tuple(self.aliases))
        if len(set(self.aliases)) != len(self.aliases):
            raise ValidationError(f"component {self.id!r} has duplicate aliases")
        if self.main_label in self.aliases:
            raise ValidationError(
                f"component {self.id!r} lists its main label among its aliases"
            )


@dataclass(frozen=True)
class Triple:
    """A subject/predicate/object statement with an opaque identifier.

    Identifiers are never parsed; Wikidata-style Q/P prefixes are cosmetic.
    """

    id: str
    subject: TripleComponent
    predicate: TripleComponent
    object: TripleComponent
    object_datatype: str = "entity"

    def __post_init__(self) -> None:
        for name in ("subject", "predicate", "object"):
            if getattr(self, name) is None:
                raise ValidationError(f"triple {self.id!r} is missing its {name}")


def validate_triple(triple: Triple) -> None:
    """Reject triples that cannot be meaningfully verbalised.

    URL, coordinate, external-identifier and image objects carry no verbalisable
    meaning; components must all have non-empty labels (guaranteed at
    construction, re-checked here for callers that bypass the dataclass).
    """
    if triple.object_datatype not in VERBALISABLE_DATATYPES:
        raise UnverbalisableObject(
            f"object datatype {triple.object_datatype!r} cannot be verbalised"
        )
    for name in ("subject", "predicate", "object"):
        component = getattr(triple, name)
        if not component.main_label.strip():
            raise MissingLabel(f"{name} of triple {triple.id!r} has no label")


@dataclass(frozen=True)
class Reference:
    """A provenance pointer: a URL or a raw text document.

    For url sources, ``final_url`` and ``html`` are populated by fetching (or
    taken from a stored dataset record); for document sources the text itself
    lives in ``source_value`` and ``html`` stays unset.
    """

    id: str
    source_kind: str  # "url" | "document"
    source_value: str
    final_url: str | None = None
    html: str | None = None
    netloc: str | None = None

    def __post_init__(self) -> None:
        if self.source_kind not in ("url", "document"):
            raise ValidationError(f"unknown reference source kind {self.source_kind!r}")
        if self.source_kind == "document" and self.html is not None:
            raise ValidationError("document references carry text, not html")

    def with_fetched(self, final_url: str, html: str) -> "Reference":
        from urllib.parse import urlparse

        return Reference(
            id=self.id,
            source_kind=self.source_kind,
            source_value=self.source_value,
            final_url=final_url,
            html=html,
            netloc=urlparse(final_url).netloc or None,
        )


@dataclass(frozen=True)
class Verbalisation:
    """A natural-language sentence expressing a triple."""

    text: str
    labels_used: tuple[str, str, str]
    origin: str  # "backend" | "template" | "override"

    def __post_init__(self) -> None:
        if not self.text or not self.text.strip():
            raise ValidationError("verbalisation text is empty")
        if self.origin not in ("backend", "template", "override"):
            raise ValidationError(f"unknown verbalisation origin {self.origin!r}")


@dataclass(frozen=True)
class Passage:
    """A window of adjacent source segments joined with single spaces."""

    text: str
    window_size: int
    start_index: int
    end_index: int

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ValidationError("window size must be positive")
        if self.end_index - self.start_index + 1 != self.window_size:
            raise ValidationError(
                f"span [{self.start_index}, {self.end_index}] does not match "
                f"window size {self.window_size}"
            )

    def overlaps(self, other: "Passage") -> bool:
        """Whether the two segment-index spans intersect."""
        return self.start_index <= other.end_index and other.start_index <= self.end_index


@dataclass(frozen=True)
class ScoredPassage:
    """A passage with its relevance to the verbalised claim."""

    passage: Passage
    relevance: float

    def __post_init__(self) -> None:
        if not -1.0 <= self.relevance <= 1.0:
            raise ValidationError(f"relevance {self.relevance} outside [-1, 1]")


@dataclass(frozen=True)
class StanceDistribution:
    """Per-evidence probabilities over (SUPP, REF, NEI); sums to one."""

    supp: float
    ref: float
    nei: float

    def __post_init__(self) -> None:
        for name, value in (("supp", self.supp), ("ref", self.ref), ("nei", self.nei)):
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"stance component {name}={value} outside [0, 1]")
        total = self.supp + self.ref + self.nei
        if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
            raise ValidationError(f"stance distribution sums to {total}, not 1")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.supp, self.ref, self.nei)

    def argmax(self) -> str:
        return argmax_class(self.as_tuple())


@dataclass(frozen=True)
class Evidence:
    """A selected passage together with its stance and size."""

    scored: ScoredPassage
    stance: StanceDistribution
    length_chars: int

    def __post_init__(self) -> None:
        if self.length_chars != len(self.scored.passage.text):
            raise ValidationError(
                f"length_chars {self.length_chars} does not match passage text "
                f"({len(self.scored.passage.text)} chars)"
            )

    @classmethod
    def from_parts(cls, scored: ScoredPassage, stance: StanceDistribution) -> "Evidence":
        return cls(scored=scored, stance=stance, length_chars=len(scored.passage.text))


@dataclass(frozen=True)
class VerdictReport:
    """Final verdict for one triple-reference pair.

    ``aggregate_values`` are the raw per-class values of the chosen aggregator
    (weighted sums or classifier probabilities). ``support_probability`` is
    always a probability in [0, 1]; for the weighted-sum aggregator this is the
    normalised variant, with the raw sums preserved in ``aggregate_values``.
    """

    final_class: str
    support_probability: float
    evidence: tuple[Evidence, ...]
    aggregator: str
    aggregate_values: tuple[float, float, float]

    def __post_init__(self) -> None:
        if self.final_class not in CLASSES:
            raise ValidationError(f"unknown stance class {self.final_class!r}")
        if not 0.0 <= self.support_probability <= 1.0:
            raise ValidationError(
                f"support probability {self.support_probability} outside [0, 1]"
            )
        if len(self.evidence) > 5:
            raise ValidationError("a verdict carries at most five pieces of evidence")
        relevances = [e.scored.relevance for e in self.evidence]
        if relevances != sorted(relevances, reverse=True):
            raise ValidationError("evidence must be ordered by descending relevance")
        # Degenerate case: every class value clamped to zero means the verdict
        # was decided by the no-signal rule, which is NEI, not the argmax
        # tie-break.
        if all(v == 0.0 for v in self.aggregate_values):
            expected = NEI
        else:
            expected = argmax_class(self.aggregate_values)
        if self.final_class != expected:
            raise ValidationError(
                f"final class {self.final_class} does not follow from "
                f"aggregate values {self.aggregate_values}"
            )
