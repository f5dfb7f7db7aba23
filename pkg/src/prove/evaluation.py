"""Dataset loading, crowd-vote aggregation and the evaluation harness.

The dataset format is line-oriented JSON: a schema-versioned header line
followed by one record per line. Each record pairs a claim with a reference
(including its stored html, which is authoritative during evaluation; pages
are never refetched), carries per-evidence crowd votes (T1), evidence-set
votes (T2) and an author-assigned reference-level label.

Vote codes: 0 = SUPP, 1 = REF, 2 = NEI, 3 = not sure.
Author labels: 1A-1D (support stated in various forms), 2A (refuting),
2B (neither); 1A-1D map to SUPP, 2A to REF, 2B to NEI on the ternary task,
and 1x/2x to supporting/not-supporting on the binary task.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .backends import ScorerBackend
from .core import (
    CLASSES,
    NEI,
    ProveError,
    Reference,
    SUPP,
    Triple,
    TripleComponent,
)
from .forest import ForestConfig, RandomForest
from .metrics import (
    SingleClassLabels,
    ZeroVariance,
    classification_metrics,
    fleiss_kappa,
    pearson_r,
    roc_auc,
)
from .pipeline import PipelineConfig, PipelineResult, verify_pair
from .selection import all_scores_nonpositive
from .verification import (
    BINARY_CLASSES,
    FEATURE_COUNT,
    FeatureVector,
    stratified_folds,
    to_binary,
)

logger = logging.getLogger(__name__)

SCHEMA_NAME = "wtr"
SCHEMA_VERSION = 1

VOTE_SUPP, VOTE_REF, VOTE_NEI, VOTE_NOT_SURE = 0, 1, 2, 3
VOTE_CODES = (VOTE_SUPP, VOTE_REF, VOTE_NEI, VOTE_NOT_SURE)
CODE_TO_CLASS = {VOTE_SUPP: "SUPP", VOTE_REF: "REF", VOTE_NEI: "NEI"}

AUTHOR_LABELS = ("1A", "1B", "1C", "1D", "2A", "2B")
SUPPORT_BREAKDOWN = ("1A", "1B", "1D")


class SchemaError(ProveError):
    """The dataset file does not match the schema; message carries the path."""


# --- records -----------------------------------------------------------------


@dataclass(frozen=True)
class ComponentRecord:
    id: str
    label: str
    aliases: tuple[str, ...] = ()
    description: str | None = None


@dataclass(frozen=True)
class VoteSet:
    """One annotation task's votes, with provenance and optional tie-break."""

    votes: tuple[int, ...]
    worker_ids: tuple[str, ...] = ()
    times: tuple[float, ...] = ()
    tie_break: int | None = None


@dataclass(frozen=True)
class T1Annotation(VoteSet):
    evidence: str = ""


@dataclass(frozen=True)
class WtrRecord:
    """One annotated triple-reference pair."""

    reference_id: str
    reference_property_id: str
    reference_datatype: str
    url: str
    netloc: str
    netloc_group: str
    final_url: str
    html: str
    claim_id: str
    rank: str
    datatype: str
    subject: ComponentRecord
    predicate: ComponentRecord
    object: ComponentRecord
    t1: tuple[T1Annotation, ...]
    t2: VoteSet
    author_label: str

    def to_triple(self) -> Triple:
        def component(c: ComponentRecord) -> TripleComponent:
            return TripleComponent(
                id=c.id, main_label=c.label, aliases=c.aliases, description=c.description
            )

        return Triple(
            id=self.claim_id,
            subject=component(self.subject),
            predicate=component(self.predicate),
            object=component(self.object),
            object_datatype=self.datatype,
        )

    def to_reference(self) -> Reference:
        return Reference(
            id=self.reference_id,
            source_kind="url",
            source_value=self.url,
            final_url=self.final_url,
            html=self.html,
            netloc=self.netloc or None,
        )


# --- load/save ---------------------------------------------------------------


def _require(payload: dict, key: str, path: str):
    if key not in payload:
        raise SchemaError(f"{path}.{key}: missing field")
    return payload[key]


def _component(payload: dict, path: str) -> ComponentRecord:
    return ComponentRecord(
        id=str(_require(payload, "id", path)),
        label=str(_require(payload, "label", path)),
        aliases=tuple(payload.get("aliases", ())),
        description=payload.get("description"),
    )


def _votes(payload: dict, path: str) -> tuple[tuple[int, ...], tuple[str, ...], tuple[float, ...], int | None]:
    raw = _require(payload, "votes", path)
    votes = []
    for i, code in enumerate(raw):
        if code not in VOTE_CODES:
            raise SchemaError(f"{path}.votes[{i}]: unknown vote code {code!r}")
        votes.append(int(code))
    tie_break = payload.get("tie_break")
    if tie_break is not None and tie_break not in VOTE_CODES:
        raise SchemaError(f"{path}.tie_break: unknown vote code {tie_break!r}")
    return (
        tuple(votes),
        tuple(str(w) for w in payload.get("worker_ids", ())),
        tuple(float(t) for t in payload.get("times", ())),
        tie_break,
    )


def _record(payload: dict, path: str) -> WtrRecord:
    reference = _require(payload, "reference", path)
    claim = _require(payload, "claim", path)
    t1_raw = _require(payload, "t1", path)
    if len(t1_raw) > 5:
        raise SchemaError(f"{path}.t1: at most five evidence entries allowed")
    t1 = []
    for i, entry in enumerate(t1_raw):
        votes, workers, times, tie_break = _votes(entry, f"{path}.t1[{i}]")
        t1.append(
            T1Annotation(
                votes=votes,
                worker_ids=workers,
                times=times,
                tie_break=tie_break,
                evidence=str(_require(entry, "evidence", f"{path}.t1[{i}]")),
            )
        )
    votes, workers, times, tie_break = _votes(_require(payload, "t2", path), f"{path}.t2")
    author_label = str(_require(payload, "author_label", path)).replace(".", "")
    if author_label not in AUTHOR_LABELS:
        raise SchemaError(f"{path}.author_label: unknown label {author_label!r}")
    return WtrRecord(
        reference_id=str(_require(reference, "id", f"{path}.reference")),
        reference_property_id=str(reference.get("property_id", "")),
        reference_datatype=str(reference.get("datatype", "url")),
        url=str(_require(reference, "url", f"{path}.reference")),
        netloc=str(reference.get("netloc", "")),
        netloc_group=str(reference.get("netloc_group", "")),
        final_url=str(reference.get("final_url", reference.get("url", ""))),
        html=str(_require(reference, "html", f"{path}.reference")),
        claim_id=str(_require(claim, "id", f"{path}.claim")),
        rank=str(claim.get("rank", "normal")),
        datatype=str(claim.get("datatype", "entity")),
        subject=_component(_require(claim, "subject", f"{path}.claim"), f"{path}.claim.subject"),
        predicate=_component(_require(claim, "predicate", f"{path}.claim"), f"{path}.claim.predicate"),
        object=_component(_require(claim, "object", f"{path}.claim"), f"{path}.claim.object"),
        t1=tuple(t1),
        t2=VoteSet(votes=votes, worker_ids=workers, times=times, tie_break=tie_break),
        author_label=author_label,
    )


def load_wtr(path: str | Path) -> list[WtrRecord]:
    """Load records, dropping later claim/url duplicates.

    Two records duplicate each other when their component labels and final
    URL coincide (triples differing only in qualifiers verbalise identically
    and would score identically); the drop count is logged.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: no such dataset file")
    lines = path.read_text("utf-8").splitlines()
    if not lines:
        return []
    try:
        header = json.loads(lines[0])
    except ValueError as exc:
        raise SchemaError(f"{path}:1: header is not JSON: {exc}") from exc
    if header.get("schema") != SCHEMA_NAME:
        raise SchemaError(f"{path}:1: expected schema {SCHEMA_NAME!r}")
    if header.get("version") != SCHEMA_VERSION:
        raise SchemaError(f"{path}:1: unsupported version {header.get('version')!r}")

    records = []
    seen: set[tuple[str, str, str, str]] = set()
    dropped = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: not JSON: {exc}") from exc
        record = _record(payload, f"records[{lineno - 2}]")
        key = (
            record.subject.label,
            record.predicate.label,
            record.object.label,
            record.final_url,
        )
        if key in seen:
            dropped += 1
            continue
        seen.add(key)
        records.append(record)
    if dropped:
        logger.info("dropped %d duplicate claim/url records from %s", dropped, path)
    return records


def save_wtr(records: list[WtrRecord], path: str | Path) -> None:
    """Serialise records in the line-JSON format; round-trips with load_wtr."""

    def vote_dict(vs: VoteSet) -> dict:
        out: dict = {"votes": list(vs.votes)}
        if vs.worker_ids:
            out["worker_ids"] = list(vs.worker_ids)
        if vs.times:
            out["times"] = list(vs.times)
        if vs.tie_break is not None:
            out["tie_break"] = vs.tie_break
        return out

    def component_dict(c: ComponentRecord) -> dict:
        out: dict = {"id": c.id, "label": c.label, "aliases": list(c.aliases)}
        if c.description is not None:
            out["description"] = c.description
        return out

    lines = [json.dumps({"schema": SCHEMA_NAME, "version": SCHEMA_VERSION}, sort_keys=True)]
    for r in records:
        payload = {
            "reference": {
                "id": r.reference_id,
                "property_id": r.reference_property_id,
                "datatype": r.reference_datatype,
                "url": r.url,
                "netloc": r.netloc,
                "netloc_group": r.netloc_group,
                "final_url": r.final_url,
                "html": r.html,
            },
            "claim": {
                "id": r.claim_id,
                "rank": r.rank,
                "datatype": r.datatype,
                "subject": component_dict(r.subject),
                "predicate": component_dict(r.predicate),
                "object": component_dict(r.object),
            },
            "t1": [dict(vote_dict(entry), evidence=entry.evidence) for entry in r.t1],
            "t2": vote_dict(r.t2),
            "author_label": r.author_label,
        }
        lines.append(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    Path(path).write_text("\n".join(lines) + "\n", "utf-8")


# --- vote aggregation --------------------------------------------------------


def majority_vote(votes: list[int]) -> tuple[int, bool]:
    """Modal vote code plus a tie flag.

    Not-sure votes only count when no substantive vote exists (then the
    aggregate itself is not-sure); among substantive votes the mode wins, and
    a non-unique mode sets the tie flag with the smallest code reported.
    """
    if not votes:
        raise ProveError("majority_vote needs at least one vote")
    substantive = [v for v in votes if v != VOTE_NOT_SURE]
    if not substantive:
        return VOTE_NOT_SURE, False
    counts: dict[int, int] = {}
    for vote in substantive:
        counts[vote] = counts.get(vote, 0) + 1
    top = max(counts.values())
    winners = sorted(code for code, count in counts.items() if count == top)
    return winners[0], len(winners) > 1


def resolve_votes(vote_set: VoteSet) -> int | None:
    """Final vote code for a task, or None when the task must be excluded.

    Ties fall back to the explicit tie-break label; tied tasks without one,
    and tasks whose aggregate is not-sure, are excluded.
    """
    code, tie = majority_vote(list(vote_set.votes))
    if tie:
        if vote_set.tie_break is not None:
            code = vote_set.tie_break
        else:
            return None
    if code == VOTE_NOT_SURE:
        return None
    return code


def map_author_label(label: str, task: str = "ternary") -> str:
    """Reference-level label to a stance class (ternary) or support flag (binary)."""
    label = label.replace(".", "")
    if label not in AUTHOR_LABELS:
        raise ProveError(f"unknown author label {label!r}")
    if task == "binary":
        return BINARY_CLASSES[0] if label.startswith("1") else BINARY_CLASSES[1]
    if task != "ternary":
        raise ProveError(f"unknown task {task!r}")
    if label.startswith("1"):
        return SUPP
    return "REF" if label == "2A" else NEI


# --- evaluation harness ------------------------------------------------------


@dataclass(frozen=True)
class EvaluationConfig:
    aggregators: tuple[str, ...] = ("weighted_sum", "malon", "classifier")
    window_sizes: frozenset[int] = frozenset({1, 2})
    evidence_k: int = 5
    folds: int = 5
    seed: int = 0
    jobs: int = 1
    forest: ForestConfig = field(default_factory=ForestConfig)


@dataclass
class RecordOutcome:
    record: WtrRecord
    result: PipelineResult | None
    error: str | None = None


@dataclass
class EvaluationBundle:
    """Everything the harness measured, serialisable to JSON/CSV/tables."""

    config: EvaluationConfig
    n_records: int
    n_errors: int
    errors: list[dict]
    t2_reports: dict
    author_reports: dict
    author_breakdown: dict
    relevance_correlation: float | None
    relevance_pairs: int
    unmatched_t1: int
    all_irrelevant_fraction: float | None
    all_irrelevant_fraction_window1: float | None
    kappa_t1: float | None
    kappa_t2: float | None
    excluded_t2: int
    per_record: list[dict]

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "config": {
                "aggregators": list(self.config.aggregators),
                "window_sizes": sorted(self.config.window_sizes),
                "evidence_k": self.config.evidence_k,
                "folds": self.config.folds,
                "seed": self.config.seed,
            },
            "n_records": self.n_records,
            "n_errors": self.n_errors,
            "errors": self.errors,
            "t2": self.t2_reports,
            "author": self.author_reports,
            "author_breakdown": self.author_breakdown,
            "relevance": {
                "pearson_r": self.relevance_correlation,
                "pairs": self.relevance_pairs,
                "unmatched_t1": self.unmatched_t1,
            },
            "all_irrelevant_fraction": self.all_irrelevant_fraction,
            "all_irrelevant_fraction_window1": self.all_irrelevant_fraction_window1,
            "kappa": {"t1": self.kappa_t1, "t2": self.kappa_t2},
            "excluded_t2": self.excluded_t2,
            "per_record": self.per_record,
        }


def _run_records(
    records: list[WtrRecord],
    backend: ScorerBackend,
    config: EvaluationConfig,
) -> list[RecordOutcome]:
    pipeline_config = PipelineConfig(
        window_sizes=config.window_sizes,
        evidence_k=config.evidence_k,
        aggregators=("weighted_sum", "malon"),
    )

    def one(record: WtrRecord) -> RecordOutcome:
        try:
            result = verify_pair(
                record.to_triple(), record.to_reference(), backend, pipeline_config
            )
            return RecordOutcome(record=record, result=result)
        except ProveError as exc:
            return RecordOutcome(record=record, result=None, error=str(exc))

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(one, records))
    return [one(record) for record in records]


def _cross_val_predict(
    outcomes: list[RecordOutcome],
    labels: dict[int, str],
    config: EvaluationConfig,
) -> dict[int, tuple[str, float]]:
    """Out-of-fold classifier predictions for records with features and labels.

    Records whose pipeline produced no evidence predict NEI with zero support
    (the pipeline's own degenerate rule) without entering training.
    """
    eligible = [
        i
        for i, outcome in enumerate(outcomes)
        if i in labels and outcome.result is not None
    ]
    predictions: dict[int, tuple[str, float]] = {}
    with_features = [
        i for i in eligible if outcomes[i].result.features is not None
    ]
    for i in eligible:
        if outcomes[i].result.features is None:
            predictions[i] = (NEI, 0.0)
    if not with_features:
        return predictions
    label_list = [labels[i] for i in with_features]
    X = np.asarray(
        [outcomes[i].result.features.values for i in with_features], dtype=float
    )
    folds = max(2, min(config.folds, len(with_features)))
    assignment = stratified_folds(label_list, folds, config.seed)
    root = np.random.default_rng(config.seed)
    fold_seeds = [int(s) for s in root.integers(0, 2**63 - 1, size=folds)]
    for fold in range(folds):
        train_rows = [r for r, a in enumerate(assignment) if a != fold]
        test_rows = [r for r, a in enumerate(assignment) if a == fold]
        if not test_rows:
            continue
        if not train_rows:
            for r in test_rows:
                predictions[with_features[r]] = (NEI, 0.0)
            continue
        model = RandomForest(
            classes=CLASSES,
            n_features=FEATURE_COUNT,
            config=config.forest,
            seed=fold_seeds[fold],
        ).fit(X[train_rows], [label_list[r] for r in train_rows])
        proba = np.atleast_2d(model.predict_proba(X[test_rows]))
        for r, row in zip(test_rows, proba):
            predictions[with_features[r]] = (
                CLASSES[int(np.argmax(row))],
                float(row[0]),
            )
    return predictions


def _aggregator_outputs(
    outcomes: list[RecordOutcome],
    labels: dict[int, str],
    aggregator: str,
    config: EvaluationConfig,
) -> dict[int, tuple[str, float]]:
    """(predicted class, support score) per labelled record for one strategy."""
    if aggregator == "classifier":
        return _cross_val_predict(outcomes, labels, config)
    out: dict[int, tuple[str, float]] = {}
    for i, outcome in enumerate(outcomes):
        if i not in labels or outcome.result is None:
            continue
        result = outcome.result.results[aggregator]
        out[i] = (result.final_class, result.normalized_support)
    return out


def _reports_for(
    predictions: dict[int, tuple[str, float]], labels: dict[int, str]
) -> dict:
    """Ternary and binary MetricsReports (with AUC where defined)."""
    indices = sorted(set(predictions) & set(labels))
    if not indices:
        return {"n": 0}
    preds = [predictions[i][0] for i in indices]
    truth = [labels[i] for i in indices]
    scores = [predictions[i][1] for i in indices]
    ternary = classification_metrics(preds, truth, CLASSES)
    binary = classification_metrics(
        [to_binary(p) for p in preds], [to_binary(t) for t in truth], BINARY_CLASSES
    )
    try:
        auc = roc_auc(scores, [1 if t == SUPP else 0 for t in truth])
    except SingleClassLabels:
        auc = None
    payload = {
        "n": len(indices),
        "ternary": ternary.to_dict(),
        "binary": binary.to_dict(),
    }
    if auc is not None:
        payload["binary"]["auc"] = auc
    return payload


def _relevance_pairs(outcomes: list[RecordOutcome]) -> tuple[list[float], list[float], int]:
    """(model score, crowd relevant-vote fraction) pairs matched by text."""
    xs: list[float] = []
    ys: list[float] = []
    unmatched = 0
    for outcome in outcomes:
        if outcome.result is None:
            unmatched += len(outcome.record.t1)
            continue
        by_text: dict[str, float] = {}
        for sp in outcome.result.scored:
            text = sp.passage.text
            if text not in by_text or sp.relevance > by_text[text]:
                by_text[text] = sp.relevance
        for entry in outcome.record.t1:
            if entry.evidence not in by_text:
                unmatched += 1
                continue
            substantive = [v for v in entry.votes if v != VOTE_NOT_SURE]
            if not substantive:
                continue
            relevant = sum(1 for v in substantive if v in (VOTE_SUPP, VOTE_REF))
            xs.append(by_text[entry.evidence])
            ys.append(relevant / len(substantive))
    return xs, ys, unmatched


def evaluate_pipeline(
    records: list[WtrRecord],
    backend: ScorerBackend,
    config: EvaluationConfig | None = None,
) -> EvaluationBundle:
    """Run the pipeline on every record and measure it against annotations.

    Per-record failures are recorded and never abort the run. Stored html is
    authoritative; nothing is refetched. The classifier aggregator is
    cross-validated out-of-fold against each label source.
    """
    config = config or EvaluationConfig()
    outcomes = _run_records(records, backend, config)

    t2_labels: dict[int, str] = {}
    excluded_t2 = 0
    for i, outcome in enumerate(outcomes):
        code = resolve_votes(outcome.record.t2)
        if code is None:
            excluded_t2 += 1
            continue
        t2_labels[i] = CODE_TO_CLASS[code]
    author_labels = {
        i: map_author_label(o.record.author_label, "ternary")
        for i, o in enumerate(outcomes)
    }

    t2_reports: dict = {}
    author_reports: dict = {}
    predictions_by_aggregator: dict[str, dict[int, tuple[str, float]]] = {}
    for aggregator in config.aggregators:
        t2_predictions = _aggregator_outputs(outcomes, t2_labels, aggregator, config)
        t2_reports[aggregator] = _reports_for(t2_predictions, t2_labels)
        author_predictions = _aggregator_outputs(
            outcomes, author_labels, aggregator, config
        )
        author_reports[aggregator] = _reports_for(author_predictions, author_labels)
        predictions_by_aggregator[aggregator] = author_predictions

    # Per-support-type breakdown: each supporting label against every
    # non-supporting record, cross-validated within the subset.
    author_breakdown: dict = {}
    for aggregator in config.aggregators:
        rows: dict = {}
        for support_type in SUPPORT_BREAKDOWN:
            subset = {
                i: label
                for i, label in author_labels.items()
                if outcomes[i].record.author_label in (support_type, "2A", "2B")
            }
            preds = _aggregator_outputs(outcomes, subset, aggregator, config)
            rows[support_type] = _reports_for(preds, subset)
        rows["ALL"] = author_reports[aggregator]
        author_breakdown[aggregator] = rows

    xs, ys, unmatched = _relevance_pairs(outcomes)
    correlation: float | None
    try:
        correlation = pearson_r(xs, ys) if len(xs) >= 2 else None
    except ZeroVariance:
        correlation = None

    usable = [o.result for o in outcomes if o.result is not None]
    fraction = fraction_w1 = None
    if usable:
        fraction = sum(1 for r in usable if r.all_scores_nonpositive) / len(usable)
        fraction_w1 = sum(
            1 for r in usable if all_scores_nonpositive(r.scored, window_size=1)
        ) / len(usable)

    t1_counts = [
        [sum(1 for v in entry.votes if v == code) for code in VOTE_CODES]
        for o in outcomes
        for entry in o.record.t1
    ]
    t2_counts = [
        [sum(1 for v in o.record.t2.votes if v == code) for code in VOTE_CODES]
        for o in outcomes
    ]

    per_record = []
    for i, outcome in enumerate(outcomes):
        row: dict = {
            "claim_id": outcome.record.claim_id,
            "reference_id": outcome.record.reference_id,
            "t2_label": t2_labels.get(i),
            "author_label": outcome.record.author_label,
            "error": outcome.error,
        }
        if outcome.result is not None:
            for name in ("weighted_sum", "malon"):
                if name in outcome.result.results:
                    agg = outcome.result.results[name]
                    row[f"{name}_class"] = agg.final_class
                    row[f"{name}_support"] = agg.normalized_support
        clf = predictions_by_aggregator.get("classifier", {}).get(i)
        if clf is not None:
            row["classifier_class"], row["classifier_support"] = clf
        per_record.append(row)

    errors = [
        {"claim_id": o.record.claim_id, "error": o.error}
        for o in outcomes
        if o.error is not None
    ]
    return EvaluationBundle(
        config=config,
        n_records=len(records),
        n_errors=len(errors),
        errors=errors,
        t2_reports=t2_reports,
        author_reports=author_reports,
        author_breakdown=author_breakdown,
        relevance_correlation=correlation,
        relevance_pairs=len(xs),
        unmatched_t1=unmatched,
        all_irrelevant_fraction=fraction,
        all_irrelevant_fraction_window1=fraction_w1,
        kappa_t1=fleiss_kappa(t1_counts) if t1_counts else None,
        kappa_t2=fleiss_kappa(t2_counts) if t2_counts else None,
        excluded_t2=excluded_t2,
        per_record=per_record,
    )


def features_from_records(
    records: list[WtrRecord],
    backend: ScorerBackend,
    config: EvaluationConfig | None = None,
) -> list[tuple[FeatureVector, str]]:
    """Training samples (feature vector, T2 majority class) from WTR records.

    Records whose pipeline run failed, yielded no evidence, or whose T2 votes
    resolve to no label are skipped with a log line.
    """
    config = config or EvaluationConfig()
    outcomes = _run_records(records, backend, config)
    dataset = []
    skipped = 0
    for outcome in outcomes:
        code = resolve_votes(outcome.record.t2)
        if (
            code is None
            or outcome.result is None
            or outcome.result.features is None
        ):
            skipped += 1
            continue
        dataset.append((outcome.result.features, CODE_TO_CLASS[code]))
    if skipped:
        logger.info("skipped %d records without usable features or labels", skipped)
    return dataset


# --- report rendering --------------------------------------------------------


def _fmt(value: float | None) -> str:
    return f"{value:.3f}" if value is not None else "  -  "


def render_aggregation_table(bundle: EvaluationBundle) -> str:
    """Plain-text table: aggregators x {ternary, binary} against T2 labels."""
    lines = [
        "Aggregation performance vs. evidence-set (T2) majority labels",
        f"{'Method':<14} {'Classes':>7} {'Acc':>6} "
        f"{'P(mac)':>7} {'R(mac)':>7} {'F1(mac)':>8} "
        f"{'P(wgt)':>7} {'R(wgt)':>7} {'F1(wgt)':>8}",
    ]
    for aggregator, report in bundle.t2_reports.items():
        if report.get("n", 0) == 0:
            lines.append(f"{aggregator:<14} (no labelled records)")
            continue
        for task, n_classes in (("ternary", 3), ("binary", 2)):
            section = report[task]
            lines.append(
                f"{aggregator:<14} {n_classes:>7} {_fmt(section['accuracy']):>6} "
                f"{_fmt(section['macro']['precision']):>7} "
                f"{_fmt(section['macro']['recall']):>7} "
                f"{_fmt(section['macro']['f1']):>8} "
                f"{_fmt(section['weighted']['precision']):>7} "
                f"{_fmt(section['weighted']['recall']):>7} "
                f"{_fmt(section['weighted']['f1']):>8}"
            )
    return "\n".join(lines)


def render_support_table(bundle: EvaluationBundle, aggregator: str = "classifier") -> str:
    """Plain-text table: binary performance per support type vs. author labels."""
    lines = [
        f"Binary performance vs. author labels per support type ({aggregator})",
        f"{'Support':<8} {'Acc':>6} {'P(mac)':>7} {'R(mac)':>7} {'F1(mac)':>8} "
        f"{'P(wgt)':>7} {'R(wgt)':>7} {'F1(wgt)':>8} {'AUC':>6}",
    ]
    rows = bundle.author_breakdown.get(aggregator, {})
    for support_type in SUPPORT_BREAKDOWN + ("ALL",):
        report = rows.get(support_type, {})
        if report.get("n", 0) == 0:
            lines.append(f"{support_type:<8} (no records)")
            continue
        section = report["binary"]
        lines.append(
            f"{support_type:<8} {_fmt(section['accuracy']):>6} "
            f"{_fmt(section['macro']['precision']):>7} "
            f"{_fmt(section['macro']['recall']):>7} "
            f"{_fmt(section['macro']['f1']):>8} "
            f"{_fmt(section['weighted']['precision']):>7} "
            f"{_fmt(section['weighted']['recall']):>7} "
            f"{_fmt(section['weighted']['f1']):>8} "
            f"{_fmt(section.get('auc')):>6}"
        )
    return "\n".join(lines)


def write_reports(bundle: EvaluationBundle, out_dir: str | Path) -> dict[str, Path]:
    """Write the JSON bundle, plain-text tables and per-record CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out / "evaluation.json",
        "tables": out / "tables.txt",
        "csv": out / "per_record.csv",
    }
    paths["json"].write_text(
        json.dumps(bundle.to_dict(), indent=2, sort_keys=True) + "\n", "utf-8"
    )
    tables = [render_aggregation_table(bundle)]
    if "classifier" in bundle.config.aggregators:
        tables.append(render_support_table(bundle))
    stats = [
        f"relevance vs. crowd-relevant-fraction pearson r: {bundle.relevance_correlation}",
        f"all-scores-nonpositive fraction (all windows): {bundle.all_irrelevant_fraction}",
        f"all-scores-nonpositive fraction (window 1 only): {bundle.all_irrelevant_fraction_window1}",
        f"fleiss kappa (T1): {bundle.kappa_t1}",
        f"fleiss kappa (T2): {bundle.kappa_t2}",
        f"records excluded from T2 metrics: {bundle.excluded_t2}",
    ]
    tables.append("\n".join(stats))
    paths["tables"].write_text("\n\n".join(tables) + "\n", "utf-8")

    fieldnames = [
        "claim_id", "reference_id", "t2_label", "author_label",
        "weighted_sum_class", "weighted_sum_support",
        "malon_class", "malon_support",
        "classifier_class", "classifier_support", "error",
    ]
    with paths["csv"].open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, extrasaction="ignore")
        writer.writeheader()
        for row in bundle.per_record:
            writer.writerow(row)
    return paths
