"""Metric implementations against definitional oracles."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prove.metrics import (
    LengthMismatch,
    SingleClassLabels,
    ZeroVariance,
    classification_metrics,
    fleiss_kappa,
    pearson_r,
    roc_auc,
)

CLASSES3 = ("SUPP", "REF", "NEI")


# --- independent oracles, written from the definitions ----------------------


def oracle_confusion(preds, labels, classes):
    matrix = {t: {p: 0 for p in classes} for t in classes}
    for p, t in zip(preds, labels):
        matrix[t][p] += 1
    return matrix


def oracle_metrics(preds, labels, classes):
    matrix = oracle_confusion(preds, labels, classes)
    accuracy = sum(1 for p, t in zip(preds, labels) if p == t) / len(labels)
    per_class = {}
    for c in classes:
        tp = matrix[c][c]
        fp = sum(matrix[t][c] for t in classes if t != c)
        fn = sum(matrix[c][p] for p in classes if p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[c] = (precision, recall, f1, sum(matrix[c].values()))
    return accuracy, per_class, matrix


def oracle_auc(scores, labels):
    """O(n^2) pair counting: P(pos > neg) + 0.5 P(pos == neg)."""
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    wins = ties = 0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1
            elif p == n:
                ties += 1
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


def oracle_pearson(xs, ys):
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = math.sqrt(sum((x - mx) ** 2 for x in xs)) * math.sqrt(
        sum((y - my) ** 2 for y in ys)
    )
    return num / den


# --- classification ----------------------------------------------------------


class TestClassificationMetrics:
    def test_perfect_predictions(self):
        labels = ["SUPP", "REF", "NEI", "SUPP"]
        report = classification_metrics(labels, labels, CLASSES3)
        assert report.accuracy == 1.0
        assert all(m.f1 == 1.0 for m in report.per_class.values() if m.support)

    def test_single_class_predictions_on_balanced_labels(self):
        labels = ["SUPP", "REF", "NEI"] * 4
        preds = ["SUPP"] * 12
        report = classification_metrics(preds, labels, CLASSES3)
        assert report.accuracy == pytest.approx(1 / 3)
        # Hand-computed: SUPP gets P=1/3, R=1, F1=0.5; other classes 0.
        assert report.macro_f1 == pytest.approx((0.5 + 0.0 + 0.0) / 3)

    def test_f1_zero_when_no_precision_or_recall(self):
        report = classification_metrics(
            ["REF", "REF"], ["SUPP", "SUPP"], ("SUPP", "REF")
        )
        assert report.per_class["SUPP"].f1 == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            classification_metrics(["SUPP"], ["SUPP", "REF"], CLASSES3)

    def test_empty_rejected(self):
        with pytest.raises(LengthMismatch):
            classification_metrics([], [], CLASSES3)

    @given(st.integers(1, 60), st.integers(0, 10_000))
    @settings(max_examples=80)
    def test_matches_definitional_oracle(self, n, seed):
        rng = random.Random(seed)
        labels = [rng.choice(CLASSES3) for _ in range(n)]
        preds = [rng.choice(CLASSES3) for _ in range(n)]
        report = classification_metrics(preds, labels, CLASSES3)
        accuracy, per_class, matrix = oracle_metrics(preds, labels, CLASSES3)
        assert report.accuracy == accuracy
        for i, c in enumerate(CLASSES3):
            precision, recall, f1, support = per_class[c]
            assert report.per_class[c].precision == precision
            assert report.per_class[c].recall == recall
            assert report.per_class[c].f1 == f1
            assert report.per_class[c].support == support
            for j, p in enumerate(CLASSES3):
                assert report.confusion[i][j] == matrix[c][p]

    @given(st.integers(1, 60), st.integers(0, 10_000))
    @settings(max_examples=80)
    def test_weighted_recall_equals_accuracy(self, n, seed):
        rng = random.Random(seed)
        labels = [rng.choice(CLASSES3) for _ in range(n)]
        preds = [rng.choice(CLASSES3) for _ in range(n)]
        report = classification_metrics(preds, labels, CLASSES3)
        assert report.weighted_recall == pytest.approx(report.accuracy, abs=1e-12)


# --- AUC ---------------------------------------------------------------------


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([0.9, 0.1], [1, 0]) == 1.0

    def test_all_ties(self):
        assert roc_auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]) == 0.5

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassLabels):
            roc_auc([0.1, 0.2], [1, 1])

    @given(st.integers(2, 50), st.integers(0, 10_000))
    @settings(max_examples=100)
    def test_matches_pair_counting_oracle(self, n, seed):
        rng = random.Random(seed)
        scores = [round(rng.uniform(0, 1), 2) for _ in range(n)]
        labels = [rng.randint(0, 1) for _ in range(n)]
        if len(set(labels)) < 2:
            labels[0], labels[-1] = 0, 1
        assert roc_auc(scores, labels) == pytest.approx(
            oracle_auc(scores, labels), abs=1e-9
        )

    @given(st.integers(2, 40), st.integers(0, 10_000))
    @settings(max_examples=60)
    def test_monotone_transform_invariance(self, n, seed):
        rng = random.Random(seed)
        scores = [rng.uniform(-1, 1) for _ in range(n)]
        labels = [rng.randint(0, 1) for _ in range(n)]
        if len(set(labels)) < 2:
            labels[0], labels[-1] = 0, 1
        transformed = [math.exp(3 * s) + 2 for s in scores]
        assert roc_auc(scores, labels) == pytest.approx(
            roc_auc(transformed, labels), abs=1e-12
        )


# --- correlation -------------------------------------------------------------


class TestPearson:
    def test_exact_linearity(self):
        xs = [1.0, 2.0, 3.0, 4.0]
        assert pearson_r(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0)

    def test_exact_anticorrelation(self):
        xs = [1.0, 2.0, 3.0]
        assert pearson_r(xs, [-x for x in xs]) == pytest.approx(-1.0)

    def test_zero_variance_rejected(self):
        with pytest.raises(ZeroVariance):
            pearson_r([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_too_short_rejected(self):
        with pytest.raises(LengthMismatch):
            pearson_r([1.0], [1.0])

    @given(st.integers(2, 40), st.integers(0, 10_000))
    @settings(max_examples=100)
    def test_matches_formula_oracle(self, n, seed):
        rng = random.Random(seed)
        xs = [rng.uniform(-5, 5) for _ in range(n)]
        ys = [rng.uniform(-5, 5) for _ in range(n)]
        if len(set(xs)) < 2:
            xs[0] += 1.0
        if len(set(ys)) < 2:
            ys[0] += 1.0
        assert pearson_r(xs, ys) == pytest.approx(oracle_pearson(xs, ys), abs=1e-9)


# --- agreement ---------------------------------------------------------------


class TestFleissKappa:
    def test_perfect_agreement(self):
        counts = [[5, 0, 0, 0], [0, 5, 0, 0], [5, 0, 0, 0]]
        assert fleiss_kappa(counts) == pytest.approx(1.0)

    def test_no_items_is_none(self):
        assert fleiss_kappa([]) is None
        assert fleiss_kappa([[1, 0, 0, 0]]) is None

    def test_textbook_range(self):
        counts = [[3, 2, 0, 0], [4, 1, 0, 0], [1, 4, 0, 0], [2, 3, 0, 0]]
        kappa = fleiss_kappa(counts)
        assert kappa is not None
        assert -1.0 <= kappa <= 1.0
