"""Sentence selection: relevance scoring, overlap removal, top-k evidence.

Passages are scored against the verbalised claim, passages dominated by a
strictly more relevant overlapping passage are dropped, and the k highest
scoring survivors become the evidence set. Overlap means intersecting
segment-index spans on the reference's segment sequence; string containment
is irrelevant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import (
    ScorerBackend,
    validate_relevance_scores,
)
from .core import Passage, ScoredPassage, ValidationError, Verbalisation

DEFAULT_EVIDENCE_K = 5


def _selection_key(sp: ScoredPassage) -> tuple[float, int, int]:
    # Descending relevance; ties prefer the earlier, then narrower, passage.
    return (-sp.relevance, sp.passage.start_index, sp.passage.window_size)


@dataclass(frozen=True)
class EvidenceSet:
    """At most k scored passages, ordered by descending relevance.

    After overlap removal, any two overlapping members must tie exactly in
    relevance (strictly dominated overlaps cannot survive); ordering ties are
    broken by (start index, window size).
    """

    items: tuple[ScoredPassage, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        keys = [_selection_key(sp) for sp in self.items]
        if keys != sorted(keys):
            raise ValidationError("evidence must be ordered by descending relevance")
        for i, a in enumerate(self.items):
            for b in self.items[i + 1:]:
                if a.passage.overlaps(b.passage) and a.relevance != b.relevance:
                    raise ValidationError(
                        "evidence items overlap without tying in relevance: "
                        f"{a.passage} vs {b.passage}"
                    )

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def score_passages(
    verbalisation: Verbalisation,
    passages: list[Passage],
    backend: ScorerBackend,
) -> list[ScoredPassage]:
    """Score every passage against the claim, preserving input order.

    The backend may be called in batches; the result always has one score per
    passage. Count mismatches and out-of-range scores are protocol errors
    regardless of which backend produced them.
    """
    if not passages:
        raise ValidationError("score_passages requires at least one passage")
    scores = backend.relevance(verbalisation.text, [p.text for p in passages])
    validate_relevance_scores(scores, expected=len(passages))
    return [ScoredPassage(passage=p, relevance=s) for p, s in zip(passages, scores)]


def dedup_overlaps(scored: list[ScoredPassage]) -> list[ScoredPassage]:
    """Drop every passage that overlaps a strictly more relevant one.

    The filter is pairwise against the original list (not the survivors), so
    passages tying exactly in relevance both survive; the global maximum can
    never be removed. All passages must come from one reference's segment
    sequence for spans to be comparable.
    """
    survivors = []
    for i, candidate in enumerate(scored):
        dominated = any(
            j != i
            and other.relevance > candidate.relevance
            and other.passage.overlaps(candidate.passage)
            for j, other in enumerate(scored)
        )
        if not dominated:
            survivors.append(candidate)
    return survivors


def select_evidence(pstar: list[ScoredPassage], k: int = DEFAULT_EVIDENCE_K) -> EvidenceSet:
    """The k highest-relevance passages, deterministic under ties.

    Taking the k largest scores maximises the relevance sum over all subsets
    of size at most k; ties at the cut prefer smaller start index, then
    smaller window size. Fewer than k survivors simply yield a short set.
    """
    if k < 1:
        raise ValidationError("evidence size k must be positive")
    chosen = sorted(pstar, key=_selection_key)[:k]
    return EvidenceSet(items=tuple(chosen))


def all_scores_nonpositive(scored: list[ScoredPassage], window_size: int | None = None) -> bool:
    """Whether every (optionally size-filtered) passage scored at or below zero.

    Zero acts as the boundary between likely relevant and likely irrelevant
    passages; references where nothing crosses it are reported as a dataset
    statistic.
    """
    relevant = [
        sp for sp in scored
        if window_size is None or sp.passage.window_size == window_size
    ]
    if not relevant:
        return True
    return all(sp.relevance <= 0.0 for sp in relevant)
