"""Label selection and claim verbalisation.

Turns a triple into a fluent sentence: pick each component's preferred label
(main label, unless a curator override chooses an alias), then ask the
backend for a sentence. A deterministic template fallback keeps the pipeline
alive when no backend is reachable; its output is intentionally plain and
exists for hermetic operation, not fluency.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .backends import BackendError, BackendProtocolError, ScorerBackend
from .core import ProveError, Triple, Verbalisation, validate_triple

logger = logging.getLogger(__name__)

MONTHS = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)

# +1890-05-17T00:00:00Z, 1890-05-17, 1890-05, 1890
_DATE_RE = re.compile(
    r"^[+-]?(?P<year>\d{1,6})(?:-(?P<month>\d{2})(?:-(?P<day>\d{2}))?)?(?:T.*)?$"
)


class OverrideNotAnAlias(ProveError):
    """A label override names text that is not among the component's aliases."""


@dataclass(frozen=True)
class LabelPolicy:
    """Curator-chosen preferred labels, keyed by component id.

    Every override must be one of the component's aliases (or its main label);
    anything else is rejected when the policy is applied.
    """

    overrides: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path) -> "LabelPolicy":
        """Parse a line-oriented override file: ``component_id<TAB>alias``."""
        overrides: dict[str, str] = {}
        for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "\t" not in line:
                raise ProveError(f"{path}:{lineno}: expected 'component_id<TAB>alias'")
            component_id, alias = line.split("\t", 1)
            overrides[component_id.strip()] = alias.strip()
        return cls(overrides=overrides)


def format_datetime_label(value: str) -> str:
    """Render a date value by its granularity: '17 May 1890', 'May 1890', '1890'.

    Values that do not look like dates pass through unchanged.
    """
    match = _DATE_RE.match(value.strip())
    if not match:
        return value
    year = int(match.group("year"))
    month = match.group("month")
    day = match.group("day")
    if month is None or not 1 <= int(month) <= 12:
        return str(year)
    month_name = MONTHS[int(month) - 1]
    if day is None or int(day) == 0:
        return f"{month_name} {year}"
    return f"{int(day)} {month_name} {year}"


def select_labels(triple: Triple, policy: LabelPolicy | None = None) -> tuple[str, str, str]:
    """Resolve the preferred label for each component.

    Overrides win over main labels; datetime objects are reformatted by
    granularity before selection so downstream models see natural dates.
    """
    validate_triple(triple)
    policy = policy or LabelPolicy()
    labels = []
    for component in (triple.subject, triple.predicate, triple.object):
        chosen = policy.overrides.get(component.id)
        if chosen is None:
            chosen = component.main_label
        elif chosen != component.main_label and chosen not in component.aliases:
            raise OverrideNotAnAlias(
                f"override {chosen!r} for component {component.id!r} is not "
                f"among its aliases"
            )
        labels.append(chosen)
    if triple.object_datatype == "datetime":
        labels[2] = format_datetime_label(labels[2])
    return (labels[0], labels[1], labels[2])


def template_verbalise(labels: tuple[str, str, str]) -> Verbalisation:
    """Deterministic fallback sentence: ``<subject>'s <predicate> is <object>.``"""
    subject, predicate, object_ = labels
    if not (subject.strip() and predicate.strip() and object_.strip()):
        raise ProveError("template verbalisation requires three non-empty labels")
    return Verbalisation(
        text=f"{subject}'s {predicate} is {object_}.",
        labels_used=labels,
        origin="template",
    )


def verbalise(labels: tuple[str, str, str], backend: ScorerBackend) -> Verbalisation:
    """Obtain a sentence from the backend, falling back to the template.

    Backend unavailability (transport failure, timeout) degrades to the
    template; a malformed response is a contract violation and propagates.
    """
    subject, predicate, object_ = labels
    if not (subject.strip() and predicate.strip() and object_.strip()):
        raise ProveError("verbalisation requires three non-empty labels")
    try:
        text = backend.verbalise(subject, predicate, object_)
    except BackendProtocolError:
        raise
    except BackendError as exc:
        logger.warning("verbalisation backend unavailable (%s); using template", exc)
        return template_verbalise(labels)
    if not text or not text.strip():
        raise BackendProtocolError("backend returned an empty verbalisation")
    return Verbalisation(text=text, labels_used=labels, origin="backend")
