"""Automated verification of knowledge-graph triples against their references."""

from .backends import BaselineBackend, RemoteBackend, ScorerBackend
from .core import (
    CLASSES,
    Evidence,
    Passage,
    Reference,
    ScoredPassage,
    StanceDistribution,
    Triple,
    TripleComponent,
    Verbalisation,
    VerdictReport,
    validate_triple,
)
from .pipeline import PipelineConfig, PipelineResult, verify_pair
from .selection import EvidenceSet, dedup_overlaps, score_passages, select_evidence
from .verbalisation import LabelPolicy, select_labels, template_verbalise, verbalise
from .verification import (
    AggregateResult,
    FeatureVector,
    aggregate_classifier,
    aggregate_malon,
    aggregate_weighted_sum,
    build_features,
    stance_probs,
    train_aggregation_model,
)

__all__ = [
    "AggregateResult",
    "BaselineBackend",
    "CLASSES",
    "Evidence",
    "EvidenceSet",
    "FeatureVector",
    "LabelPolicy",
    "Passage",
    "PipelineConfig",
    "PipelineResult",
    "Reference",
    "RemoteBackend",
    "ScoredPassage",
    "ScorerBackend",
    "StanceDistribution",
    "Triple",
    "TripleComponent",
    "Verbalisation",
    "VerdictReport",
    "aggregate_classifier",
    "aggregate_malon",
    "aggregate_weighted_sum",
    "build_features",
    "dedup_overlaps",
    "score_passages",
    "select_evidence",
    "select_labels",
    "stance_probs",
    "template_verbalise",
    "train_aggregation_model",
    "validate_triple",
    "verbalise",
    "verify_pair",
]

__version__ = "0.1.0"
