"""End-to-end orchestration: one triple and one reference in, verdicts out.

The flow is extraction -> verbalisation -> relevance scoring -> overlap
removal -> evidence selection -> stance classification -> aggregation. A
reference that yields no passages short-circuits to a NEI verdict with zero
support and no backend calls (the verbalisation then comes from the
template, since nothing would be scored against a backend sentence).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .backends import ScorerBackend
from .core import (
    Evidence,
    NEI,
    Passage,
    Reference,
    ScoredPassage,
    StanceDistribution,
    Triple,
    ValidationError,
    Verbalisation,
    VerdictReport,
)
from .retrieval import SegmentList, Segmenter, WindowConfig, clean_html, fetch, segment, window
from .selection import (
    DEFAULT_EVIDENCE_K,
    EvidenceSet,
    all_scores_nonpositive,
    dedup_overlaps,
    score_passages,
    select_evidence,
)
from .verbalisation import LabelPolicy, select_labels, template_verbalise, verbalise
from .verification import (
    AggregateResult,
    AggregationModel,
    FeatureVector,
    aggregate_classifier,
    aggregate_malon,
    aggregate_weighted_sum,
    build_features,
    stance_probs,
)

AGGREGATORS = ("weighted_sum", "malon", "classifier")


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for one verification run; defaults mirror the reference setup."""

    window_sizes: frozenset[int] = frozenset({1, 2})
    evidence_k: int = DEFAULT_EVIDENCE_K
    aggregators: tuple[str, ...] = ("classifier",)
    label_policy: LabelPolicy = field(default_factory=LabelPolicy)
    verbalisation_override: str | None = None

    def __post_init__(self) -> None:
        for name in self.aggregators:
            if name not in AGGREGATORS:
                raise ValidationError(f"unknown aggregator {name!r}")


@dataclass
class PipelineResult:
    """Everything one run produced, including intermediates for reporting."""

    triple: Triple
    reference: Reference
    verbalisation: Verbalisation
    segments: SegmentList
    passages: list[Passage]
    scored: list[ScoredPassage]
    pstar: list[ScoredPassage]
    evidence: EvidenceSet
    stances: list[StanceDistribution]
    features: FeatureVector | None
    results: dict[str, AggregateResult]

    @property
    def all_scores_nonpositive(self) -> bool:
        return all_scores_nonpositive(self.scored)

    def report(self, aggregator: str) -> VerdictReport:
        result = self.results[aggregator]
        evidence = tuple(
            Evidence.from_parts(sp, dist)
            for sp, dist in zip(self.evidence, self.stances)
        )
        return VerdictReport(
            final_class=result.final_class,
            support_probability=result.normalized_support,
            evidence=evidence,
            aggregator=aggregator,
            aggregate_values=result.class_values,
        )


def resolve_reference(reference: Reference, timeout_ms: int = 30_000) -> Reference:
    """Fill in html/final_url for url references that have not been fetched."""
    if reference.source_kind != "url" or reference.html is not None:
        return reference
    final_url, html = fetch(reference.source_value, timeout_ms=timeout_ms)
    return reference.with_fetched(final_url, html)


def extract_passages(
    reference: Reference,
    window_config: WindowConfig | None = None,
    segmenter: Segmenter | None = None,
) -> tuple[SegmentList, list[Passage]]:
    """Reference text to segments and windowed passages.

    Raw text documents skip HTML cleaning and feed straight into sentence
    segmentation; url references must already carry their fetched html.
    """
    if reference.source_kind == "document":
        text = reference.source_value
    else:
        if reference.html is None:
            raise ValidationError(
                f"reference {reference.id!r} has no html; fetch it first"
            )
        text = clean_html(reference.html)
    segments = segment(text, segmenter)
    return segments, window(segments, window_config)


def _empty_result(
    triple: Triple,
    reference: Reference,
    segments: SegmentList,
    labels: tuple[str, str, str],
    config: PipelineConfig,
) -> PipelineResult:
    neutral = AggregateResult((0.0, 0.0, 0.0), NEI, 0.0, 0.0)
    return PipelineResult(
        triple=triple,
        reference=reference,
        verbalisation=template_verbalise(labels),
        segments=segments,
        passages=[],
        scored=[],
        pstar=[],
        evidence=EvidenceSet(items=()),
        stances=[],
        features=None,
        results={name: neutral for name in config.aggregators},
    )


def verify_pair(
    triple: Triple,
    reference: Reference,
    backend: ScorerBackend,
    config: PipelineConfig | None = None,
    model: AggregationModel | None = None,
    segmenter: Segmenter | None = None,
) -> PipelineResult:
    """Run the full pipeline for one triple-reference pair."""
    config = config or PipelineConfig()
    if "classifier" in config.aggregators and model is None:
        raise ValidationError(
            "the classifier aggregator needs a trained model (see 'prove train')"
        )
    labels = select_labels(triple, config.label_policy)
    window_config = WindowConfig(sizes=config.window_sizes)
    segments, passages = extract_passages(reference, window_config, segmenter)
    if not passages:
        return _empty_result(triple, reference, segments, labels, config)

    if config.verbalisation_override is not None:
        verb = Verbalisation(
            text=config.verbalisation_override, labels_used=labels, origin="override"
        )
    else:
        verb = verbalise(labels, backend)

    scored = score_passages(verb, passages, backend)
    pstar = dedup_overlaps(scored)
    evidence = select_evidence(pstar, k=config.evidence_k)
    stances = stance_probs(verb, evidence, backend)
    features = build_features(evidence, stances)

    results: dict[str, AggregateResult] = {}
    for name in config.aggregators:
        if name == "weighted_sum":
            results[name] = aggregate_weighted_sum(
                [sp.relevance for sp in evidence], stances
            )
        elif name == "malon":
            results[name] = aggregate_malon(stances)
        else:
            results[name] = aggregate_classifier(features, model)

    return PipelineResult(
        triple=triple,
        reference=reference,
        verbalisation=verb,
        segments=segments,
        passages=passages,
        scored=scored,
        pstar=pstar,
        evidence=evidence,
        stances=stances,
        features=features,
        results=results,
    )


def report_to_dict(result: PipelineResult, aggregators: tuple[str, ...]) -> dict:
    """Schema-stable JSON payload for one verified pair."""
    verdicts = []
    for name in aggregators:
        agg = result.results[name]
        verdicts.append(
            {
                "aggregator": name,
                "final_class": agg.final_class,
                "support_probability": agg.normalized_support,
                "support_probability_raw": agg.support_probability,
                "aggregate_values": {
                    "SUPP": agg.class_values[0],
                    "REF": agg.class_values[1],
                    "NEI": agg.class_values[2],
                },
            }
        )
    evidence = [
        {
            "text": sp.passage.text,
            "window_size": sp.passage.window_size,
            "start_index": sp.passage.start_index,
            "end_index": sp.passage.end_index,
            "relevance": sp.relevance,
            "stance": {
                "SUPP": dist.supp,
                "REF": dist.ref,
                "NEI": dist.nei,
            },
            "length_chars": len(sp.passage.text),
        }
        for sp, dist in zip(result.evidence, result.stances)
    ]
    return {
        "schema_version": 1,
        "triple": {
            "id": result.triple.id,
            "subject": result.triple.subject.main_label,
            "predicate": result.triple.predicate.main_label,
            "object": result.triple.object.main_label,
        },
        "reference": {
            "id": result.reference.id,
            "source_kind": result.reference.source_kind,
            "final_url": result.reference.final_url,
        },
        "verbalisation": {
            "text": result.verbalisation.text,
            "labels_used": list(result.verbalisation.labels_used),
            "origin": result.verbalisation.origin,
        },
        "extraction": {
            "segments": len(result.segments),
            "passages": len(result.passages),
            "passages_after_dedup": len(result.pstar),
            "all_scores_nonpositive": result.all_scores_nonpositive,
        },
        "evidence": evidence,
        "verdicts": verdicts,
    }
