"""Classification and correlation metrics used by the evaluation harness.

All metrics follow their textbook definitions: per-class precision/recall/F1
with macro and frequency-weighted averages, rank-based ROC AUC, and the
product-moment correlation. Weighted averaging uses true-label frequencies,
which makes weighted recall algebraically equal to accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ProveError


class LengthMismatch(ProveError):
    """Prediction and label sequences differ in length (or are empty)."""


class SingleClassLabels(ProveError):
    """AUC needs both a positive and a negative example."""


class ZeroVariance(ProveError):
    """Correlation is undefined when either series is constant."""


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    """Every reported table cell for one prediction set."""

    classes: tuple[str, ...]
    accuracy: float
    per_class: dict[str, ClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    confusion: tuple[tuple[int, ...], ...]  # rows: true class, cols: predicted
    auc: float | None = None
    pearson_r: float | None = None

    def to_dict(self) -> dict:
        out = {
            "classes": list(self.classes),
            "accuracy": self.accuracy,
            "per_class": {
                name: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for name, m in self.per_class.items()
            },
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
            "weighted": {
                "precision": self.weighted_precision,
                "recall": self.weighted_recall,
                "f1": self.weighted_f1,
            },
            "confusion": [list(row) for row in self.confusion],
        }
        if self.auc is not None:
            out["auc"] = self.auc
        if self.pearson_r is not None:
            out["pearson_r"] = self.pearson_r
        return out


def classification_metrics(
    preds: list[str], labels: list[str], classes: tuple[str, ...]
) -> MetricsReport:
    """Accuracy, confusion matrix and per-class/macro/weighted P, R, F1."""
    if not labels or len(preds) != len(labels):
        raise LengthMismatch(f"{len(preds)} predictions for {len(labels)} labels")
    index = {c: i for i, c in enumerate(classes)}
    for value in preds + labels:
        if value not in index:
            raise LengthMismatch(f"value {value!r} outside class list {classes}")

    k = len(classes)
    confusion = [[0] * k for _ in range(k)]
    for pred, label in zip(preds, labels):
        confusion[index[label]][index[pred]] += 1

    total = len(labels)
    accuracy = sum(confusion[i][i] for i in range(k)) / total

    per_class: dict[str, ClassMetrics] = {}
    for i, name in enumerate(classes):
        tp = confusion[i][i]
        predicted = sum(confusion[r][i] for r in range(k))
        support = sum(confusion[i])
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        per_class[name] = ClassMetrics(precision, recall, f1, support)

    macro_precision = sum(m.precision for m in per_class.values()) / k
    macro_recall = sum(m.recall for m in per_class.values()) / k
    macro_f1 = sum(m.f1 for m in per_class.values()) / k
    weighted_precision = sum(m.precision * m.support for m in per_class.values()) / total
    weighted_recall = sum(m.recall * m.support for m in per_class.values()) / total
    weighted_f1 = sum(m.f1 * m.support for m in per_class.values()) / total

    return MetricsReport(
        classes=tuple(classes),
        accuracy=accuracy,
        per_class=per_class,
        macro_precision=macro_precision,
        macro_recall=macro_recall,
        macro_f1=macro_f1,
        weighted_precision=weighted_precision,
        weighted_recall=weighted_recall,
        weighted_f1=weighted_f1,
        confusion=tuple(tuple(row) for row in confusion),
    )


def roc_auc(scores: list[float], binary_labels: list[int]) -> float:
    """P(score of a positive > score of a negative) + half the tie mass.

    Computed from average ranks, which equals the normalised Mann-Whitney U
    statistic; invariant under any strictly monotone transform of the scores.
    """
    if len(scores) != len(binary_labels) or not scores:
        raise LengthMismatch(f"{len(scores)} scores for {len(binary_labels)} labels")
    n_pos = sum(1 for label in binary_labels if label)
    n_neg = len(binary_labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassLabels("AUC needs both positive and negative labels")

    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ranks = [0.0] * len(scores)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        # Average 1-based rank across the tie block.
        rank = (i + j) / 2.0 + 1.0
        for position in range(i, j + 1):
            ranks[order[position]] = rank
        i = j + 1

    rank_sum = sum(rank for rank, label in zip(ranks, binary_labels) if label)
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def pearson_r(xs: list[float], ys: list[float]) -> float:
    """Product-moment correlation of two equal-length series."""
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} xs for {len(ys)} ys")
    if len(xs) < 2:
        raise LengthMismatch("correlation needs at least two points")
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise ZeroVariance("one of the series is constant")
    cov = sum(a * b for a, b in zip(dx, dy))
    return cov / (var_x**0.5 * var_y**0.5)


def fleiss_kappa(vote_counts: list[list[int]]) -> float | None:
    """Fleiss' kappa, generalised to a varying number of raters per item.

    ``vote_counts`` holds one row per item with per-category vote counts.
    Items with fewer than two votes carry no agreement information and are
    skipped; returns None when nothing remains or agreement is degenerate.
    """
    rows = [row for row in vote_counts if sum(row) >= 2]
    if not rows:
        return None
    total_votes = sum(sum(row) for row in rows)
    k = len(rows[0])
    category_share = [
        sum(row[j] for row in rows) / total_votes for j in range(k)
    ]
    expected = sum(p * p for p in category_share)
    observed = 0.0
    for row in rows:
        n = sum(row)
        observed += sum(c * (c - 1) for c in row) / (n * (n - 1))
    observed /= len(rows)
    if expected == 1.0:
        return None
    return (observed - expected) / (1.0 - expected)
