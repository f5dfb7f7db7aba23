"""Claim verification: per-evidence stances and verdict aggregation.

Each evidence gets a stance distribution over (SUPP, REF, NEI); three
aggregation strategies turn the evidence set's relevances and stances into a
final class z and support probability y:

  * weighted sum    - class mass is the stance probability summed with
                      negative relevances clamped to zero;
  * malon rule      - SUPP if any evidence's argmax is SUPP, else REF if any
                      is REF, else NEI; y is the indicator of SUPP;
  * classifier      - a random forest over a fixed 25-value feature vector
                      (five evidence slots of relevance, three stance
                      probabilities and capped length).

The weighted sum's y follows the defining equation and is not normalised, so
it can exceed 1; a normalised companion value is always carried alongside and
user-facing reports store that one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .backends import BackendProtocolError, ScorerBackend, validate_stance_rows
from .core import (
    CLASSES,
    NEI,
    REF,
    SUPP,
    ProveError,
    ScoredPassage,
    StanceDistribution,
    ValidationError,
    Verbalisation,
    argmax_class,
)
from .forest import ForestConfig, NotTrained, RandomForest, SchemaMismatch
from .metrics import MetricsReport, SingleClassLabels, classification_metrics, roc_auc
from .selection import EvidenceSet, _selection_key

FEATURES_PER_SLOT = 5
EVIDENCE_SLOTS = 5
FEATURE_COUNT = FEATURES_PER_SLOT * EVIDENCE_SLOTS
LENGTH_CAP_CHARS = 2000

BINARY_POSITIVE = "supporting"
BINARY_NEGATIVE = "not_supporting"
BINARY_CLASSES = (BINARY_POSITIVE, BINARY_NEGATIVE)

AggregationModel = RandomForest


class SingleClassDataset(ProveError):
    """Training data must contain at least two distinct classes."""


@dataclass(frozen=True)
class FeatureVector:
    """25 reals: five evidence slots of (rho, supp, ref, nei, capped length)."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != FEATURE_COUNT:
            raise ValidationError(
                f"feature vector has {len(self.values)} values, expected {FEATURE_COUNT}"
            )


@dataclass(frozen=True)
class AggregateResult:
    """Outcome of one aggregation strategy.

    ``class_values`` are the strategy's raw per-class values (weighted sums,
    a one-hot choice for the malon rule, classifier probabilities).
    ``support_probability`` is the strategy's defining y (raw, possibly above
    1 for the weighted sum); ``normalized_support`` is always in [0, 1].
    """

    class_values: tuple[float, float, float]
    final_class: str
    support_probability: float
    normalized_support: float

    def __post_init__(self) -> None:
        if all(v == 0.0 for v in self.class_values):
            expected = NEI
        else:
            expected = argmax_class(self.class_values)
        if self.final_class != expected:
            raise ValidationError(
                f"final class {self.final_class} does not follow from "
                f"class values {self.class_values}"
            )
        if not 0.0 <= self.normalized_support <= 1.0:
            raise ValidationError(
                f"normalized support {self.normalized_support} outside [0, 1]"
            )


def stance_probs(
    verbalisation: Verbalisation,
    evidence: EvidenceSet,
    backend: ScorerBackend,
) -> list[StanceDistribution]:
    """One stance distribution per evidence, validated against the contract."""
    if len(evidence) == 0:
        raise ValidationError("stance_probs requires a non-empty evidence set")
    rows = backend.stance(verbalisation.text, [sp.passage.text for sp in evidence])
    if len(rows) != len(evidence):
        raise BackendProtocolError(
            f"got {len(rows)} stance rows for {len(evidence)} evidence"
        )
    validate_stance_rows(rows)
    return [StanceDistribution(supp=r[0], ref=r[1], nei=r[2]) for r in rows]


def aggregate_weighted_sum(
    rho: list[float], sigma: list[StanceDistribution]
) -> AggregateResult:
    """Stance mass weighted by clamped relevance.

    Negative relevances are dismissed (clamped to zero). When every weight
    clamps, no class carries signal and the verdict defaults to NEI with
    y = 0.
    """
    if len(rho) != len(sigma):
        raise ValidationError(f"{len(rho)} relevances for {len(sigma)} stances")
    sums = [0.0, 0.0, 0.0]
    for weight, dist in zip(rho, sigma):
        clamped = max(weight, 0.0)
        for k, component in enumerate(dist.as_tuple()):
            sums[k] += clamped * component
    class_values = (sums[0], sums[1], sums[2])
    total = sum(class_values)
    if total == 0.0:
        return AggregateResult(class_values, NEI, 0.0, 0.0)
    final = argmax_class(class_values)
    return AggregateResult(
        class_values=class_values,
        final_class=final,
        support_probability=class_values[0],
        normalized_support=class_values[0] / total,
    )


def aggregate_malon(sigma: list[StanceDistribution]) -> AggregateResult:
    """Rule-based aggregation over per-evidence argmax stances."""
    if not sigma:
        raise ValidationError("the malon rule needs at least one stance")
    argmaxes = [dist.argmax() for dist in sigma]
    if SUPP in argmaxes:
        final = SUPP
    elif REF in argmaxes:
        final = REF
    else:
        final = NEI
    y = 1.0 if final == SUPP else 0.0
    one_hot = tuple(1.0 if c == final else 0.0 for c in CLASSES)
    return AggregateResult(one_hot, final, y, y)


def build_features(
    evidence: EvidenceSet | Sequence[ScoredPassage],
    sigma: list[StanceDistribution],
) -> FeatureVector:
    """Flatten an evidence set into the fixed 25-value vector.

    Slots are filled in canonical descending-relevance order (re-sorted here,
    so permuting the (evidence, stance) pairs cannot change the vector);
    missing slots stay zero, and lengths are capped at 2000 characters before
    normalising.
    """
    if len(sigma) != len(evidence):
        raise ValidationError(f"{len(sigma)} stances for {len(evidence)} evidence")
    paired = sorted(
        zip(evidence, sigma), key=lambda pair: _selection_key(pair[0])
    )
    values = []
    for sp, dist in paired[:EVIDENCE_SLOTS]:
        length = min(len(sp.passage.text), LENGTH_CAP_CHARS) / LENGTH_CAP_CHARS
        values.extend([sp.relevance, dist.supp, dist.ref, dist.nei, length])
    values.extend([0.0] * (FEATURE_COUNT - len(values)))
    return FeatureVector(values=tuple(values))


def aggregate_classifier(
    features: FeatureVector, model: AggregationModel
) -> AggregateResult:
    """Distribution over classes from the trained aggregation model."""
    if not model.trained:
        raise NotTrained("aggregation model has not been trained")
    if model.n_features != FEATURE_COUNT or tuple(model.classes) != CLASSES:
        raise SchemaMismatch(
            f"model schema ({model.n_features} features over {model.classes}) "
            f"does not match the aggregation feature layout"
        )
    theta = model.predict_proba(np.asarray(features.values))
    row = (float(theta[0]), float(theta[1]), float(theta[2]))
    validate_stance_rows([row])
    final = argmax_class(row)
    return AggregateResult(row, final, row[0], row[0])


# --- training ---------------------------------------------------------------


def to_binary(label: str) -> str:
    return BINARY_POSITIVE if label == SUPP else BINARY_NEGATIVE


@dataclass(frozen=True)
class FoldReport:
    fold: int
    n_train: int
    n_test: int
    ternary: MetricsReport
    binary: MetricsReport

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "ternary": self.ternary.to_dict(),
            "binary": self.binary.to_dict(),
        }


@dataclass(frozen=True)
class CrossValReport:
    """Per-fold and mean metrics for the ternary and binary tasks."""

    seed: int
    folds: tuple[FoldReport, ...]
    mean_ternary_accuracy: float
    mean_ternary_macro_f1: float
    mean_binary_accuracy: float
    mean_binary_macro_f1: float
    mean_binary_auc: float | None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_folds": len(self.folds),
            "folds": [f.to_dict() for f in self.folds],
            "mean": {
                "ternary_accuracy": self.mean_ternary_accuracy,
                "ternary_macro_f1": self.mean_ternary_macro_f1,
                "binary_accuracy": self.mean_binary_accuracy,
                "binary_macro_f1": self.mean_binary_macro_f1,
                "binary_auc": self.mean_binary_auc,
            },
        }


def stratified_folds(labels: list[str], folds: int, seed: int) -> list[int]:
    """Deterministic fold id per sample: label-grouped, shuffled, round-robin.

    Folds are disjoint and cover the dataset exactly once; stratification
    keeps each class spread across folds so small datasets stay trainable.
    """
    rng = np.random.default_rng(seed)
    assignment = [0] * len(labels)
    counter = 0
    for cls in CLASSES + tuple(sorted(set(labels) - set(CLASSES))):
        indices = [i for i, label in enumerate(labels) if label == cls]
        if not indices:
            continue
        order = rng.permutation(len(indices))
        for position in order:
            assignment[indices[int(position)]] = counter % folds
            counter += 1
    return assignment


def train_aggregation_model(
    dataset: list[tuple[FeatureVector, str]],
    folds: int = 5,
    seed: int = 0,
    config: ForestConfig | None = None,
) -> tuple[AggregationModel, CrossValReport]:
    """Cross-validate and fit the aggregation classifier.

    Runs k-fold cross-validation (reporting ternary and binary metrics per
    fold and on average), then fits the returned model on the full dataset.
    Everything is seeded: identical inputs and seed give bit-identical models
    and reports.
    """
    if not dataset:
        raise ValidationError("training requires a non-empty dataset")
    labels = [label for _, label in dataset]
    for label in labels:
        if label not in CLASSES:
            raise ValidationError(f"unknown class label {label!r}")
    if len(set(labels)) < 2:
        raise SingleClassDataset("training data contains a single class")
    config = config or ForestConfig()
    folds = max(2, min(folds, len(dataset)))

    X = np.asarray([fv.values for fv, _ in dataset], dtype=float)
    assignment = stratified_folds(labels, folds, seed)
    root = np.random.default_rng(seed)
    model_seeds = [int(s) for s in root.integers(0, 2**63 - 1, size=folds + 1)]

    fold_reports = []
    for fold in range(folds):
        train_idx = [i for i, a in enumerate(assignment) if a != fold]
        test_idx = [i for i, a in enumerate(assignment) if a == fold]
        if not train_idx or not test_idx:
            continue
        fold_model = RandomForest(
            classes=CLASSES, n_features=FEATURE_COUNT, config=config,
            seed=model_seeds[fold],
        ).fit(X[train_idx], [labels[i] for i in train_idx])
        proba = np.atleast_2d(fold_model.predict_proba(X[test_idx]))
        preds = [CLASSES[int(np.argmax(row))] for row in proba]
        truth = [labels[i] for i in test_idx]
        ternary = classification_metrics(preds, truth, CLASSES)
        binary = classification_metrics(
            [to_binary(p) for p in preds], [to_binary(t) for t in truth], BINARY_CLASSES
        )
        try:
            auc = roc_auc(
                [float(row[0]) for row in proba],
                [1 if t == SUPP else 0 for t in truth],
            )
        except SingleClassLabels:
            auc = None
        binary = MetricsReport(
            classes=binary.classes,
            accuracy=binary.accuracy,
            per_class=binary.per_class,
            macro_precision=binary.macro_precision,
            macro_recall=binary.macro_recall,
            macro_f1=binary.macro_f1,
            weighted_precision=binary.weighted_precision,
            weighted_recall=binary.weighted_recall,
            weighted_f1=binary.weighted_f1,
            confusion=binary.confusion,
            auc=auc,
        )
        fold_reports.append(
            FoldReport(fold, len(train_idx), len(test_idx), ternary, binary)
        )

    aucs = [f.binary.auc for f in fold_reports if f.binary.auc is not None]
    report = CrossValReport(
        seed=seed,
        folds=tuple(fold_reports),
        mean_ternary_accuracy=_mean([f.ternary.accuracy for f in fold_reports]),
        mean_ternary_macro_f1=_mean([f.ternary.macro_f1 for f in fold_reports]),
        mean_binary_accuracy=_mean([f.binary.accuracy for f in fold_reports]),
        mean_binary_macro_f1=_mean([f.binary.macro_f1 for f in fold_reports]),
        mean_binary_auc=_mean(aucs) if aucs else None,
    )
    model = RandomForest(
        classes=CLASSES, n_features=FEATURE_COUNT, config=config,
        seed=model_seeds[-1],
    ).fit(X, labels)
    return model, report


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


FEATURES_SCHEMA = "prove-features"
FEATURES_VERSION = 1


def load_feature_file(path) -> list[tuple[FeatureVector, str]]:
    """Read a pre-computed training set: header line, then one sample per line.

    Lines look like ``{"features": [...25 floats...], "label": "SUPP"}`` after
    a ``{"schema": "prove-features", "version": 1}`` header.
    """
    lines = Path(path).read_text("utf-8").splitlines()
    if not lines:
        raise ValidationError(f"{path}: empty feature file")
    header = json.loads(lines[0])
    if header.get("schema") != FEATURES_SCHEMA or header.get("version") != FEATURES_VERSION:
        raise ValidationError(f"{path}: not a {FEATURES_SCHEMA} v{FEATURES_VERSION} file")
    dataset = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        payload = json.loads(line)
        if "features" not in payload or "label" not in payload:
            raise ValidationError(f"{path}:{lineno}: expected 'features' and 'label'")
        dataset.append((FeatureVector(values=tuple(payload["features"])), payload["label"]))
    return dataset


def save_feature_file(dataset: list[tuple[FeatureVector, str]], path) -> None:
    """Write a training set in the prove-features line-JSON format."""
    lines = [json.dumps({"schema": FEATURES_SCHEMA, "version": FEATURES_VERSION})]
    for fv, label in dataset:
        lines.append(json.dumps({"features": list(fv.values), "label": label}))
    Path(path).write_text("\n".join(lines) + "\n", "utf-8")
