"""Relevance scoring, overlap removal and evidence selection."""

from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prove.backends import BackendProtocolError, ScorerBackend
from prove.core import Passage, ScoredPassage, ValidationError, Verbalisation
from prove.selection import (
    EvidenceSet,
    all_scores_nonpositive,
    dedup_overlaps,
    score_passages,
    select_evidence,
)

CLAIM = Verbalisation(
    text="Anna Vogel's occupation is sculptor.",
    labels_used=("Anna Vogel", "occupation", "sculptor"),
    origin="template",
)


def passage(text: str, start: int, n: int = 1) -> Passage:
    return Passage(text=text, window_size=n, start_index=start, end_index=start + n - 1)


def scored(relevance: float, start: int, n: int = 1, text: str = "t") -> ScoredPassage:
    return ScoredPassage(passage=passage(text, start, n), relevance=relevance)


class BrokenBackend(ScorerBackend):
    def __init__(self, scores):
        self.scores = scores

    def verbalise(self, s, p, o):
        return "x."

    def relevance(self, claim, passages):
        return self.scores

    def stance(self, claim, evidence):
        return [(1.0, 0.0, 0.0)] * len(evidence)


class TestScorePassages:
    def test_restating_passage_ranks_top(self, baseline):
        passages = [
            passage("Anna Vogel is a sculptor.", 0),
            passage("Opening hours vary by season.", 1),
        ]
        out = score_passages(CLAIM, passages, baseline)
        assert len(out) == 2
        # Hand-checked: overlap {anna, vogel, sculptor, is} pushes the
        # restating passage above zero, the unrelated one to the bottom.
        assert out[0].relevance > 0 > out[1].relevance
        assert out[0].relevance == max(sp.relevance for sp in out)

    def test_zero_overlap_scores_minus_one(self, baseline):
        [sp] = score_passages(CLAIM, [passage("zzz qqq", 0)], baseline)
        assert sp.relevance == -1.0

    def test_order_preserved(self, baseline):
        passages = [passage(t, i) for i, t in enumerate(["a", "b", "c"])]
        out = score_passages(CLAIM, passages, baseline)
        assert [sp.passage.text for sp in out] == ["a", "b", "c"]

    def test_out_of_range_score_rejected(self):
        with pytest.raises(BackendProtocolError):
            score_passages(CLAIM, [passage("a", 0)], BrokenBackend([1.5]))

    def test_count_mismatch_rejected(self):
        with pytest.raises(BackendProtocolError):
            score_passages(CLAIM, [passage("a", 0)], BrokenBackend([0.1, 0.2]))

    def test_empty_passages_rejected(self, baseline):
        with pytest.raises(ValidationError):
            score_passages(CLAIM, [], baseline)


def dedup_oracle(items: list[ScoredPassage]) -> list[ScoredPassage]:
    """Brute-force pairwise filter straight from the definition."""
    return [
        p
        for p in items
        if not any(
            q.relevance > p.relevance and q.passage.overlaps(p.passage) for q in items
        )
    ]


class TestDedupOverlaps:
    def test_dominated_overlap_removed(self):
        a = scored(0.9, start=0, n=2, text="a b")
        b = scored(0.5, start=0, n=1, text="a")
        assert dedup_overlaps([a, b]) == [a]

    def test_disjoint_spans_survive(self):
        a = scored(0.9, start=0)
        b = scored(-0.5, start=5)
        assert dedup_overlaps([a, b]) == [a, b]

    def test_equal_scores_both_survive(self):
        a = scored(0.7, start=0, n=2, text="a b")
        b = scored(0.7, start=1, n=1, text="b")
        got = dedup_overlaps([a, b])
        assert got == dedup_oracle([a, b])
        assert got == [a, b]

    @given(
        st.lists(
            st.tuples(
                st.integers(0, 9),
                st.integers(1, 3),
                st.floats(-1, 1, allow_nan=False),
            ),
            min_size=0,
            max_size=10,
        )
    )
    def test_matches_pairwise_oracle(self, raw):
        items = [scored(round(r, 3), start=i, n=n) for i, n, r in raw]
        assert dedup_overlaps(items) == dedup_oracle(items)

    @given(
        st.lists(
            st.tuples(st.integers(0, 9), st.integers(1, 3), st.floats(-1, 1, allow_nan=False)),
            min_size=1,
            max_size=10,
        )
    )
    def test_never_removes_global_maximum(self, raw):
        items = [scored(r, start=i, n=n) for i, n, r in raw]
        best = max(items, key=lambda sp: sp.relevance)
        assert best in dedup_overlaps(items)


def best_subset_sum(items: list[ScoredPassage], k: int) -> float:
    """Exhaustive maximum relevance sum at the selection size min(k, n).

    Selection always returns min(k, n) passages (never fewer), so the oracle
    enumerates subsets of exactly that size.
    """
    size = min(k, len(items))
    return max(
        (math.fsum(sp.relevance for sp in combo)
         for combo in itertools.combinations(items, size)),
        default=0.0,
    )


class TestSelectEvidence:
    def test_top_five_of_seven(self):
        items = [scored(r, start=i * 3) for i, r in enumerate([0.9, 0.1, 0.8, -0.2, 0.5, 0.7, 0.3])]
        chosen = select_evidence(items, k=5)
        assert [sp.relevance for sp in chosen] == [0.9, 0.8, 0.7, 0.5, 0.3]

    def test_short_set_returned_whole(self):
        items = [scored(0.2, 0), scored(0.1, 3), scored(0.0, 6)]
        assert len(select_evidence(items, k=5)) == 3

    def test_tie_at_cut_prefers_smaller_start(self):
        items = [
            scored(0.9, start=0),
            scored(0.5, start=8),
            scored(0.5, start=2),
        ]
        chosen = select_evidence(items, k=2)
        assert [sp.passage.start_index for sp in chosen] == [0, 2]
        # Oracle: chosen subset's sum must be among the maximal 2-subsets.
        assert math.fsum(sp.relevance for sp in chosen) == best_subset_sum(items, 2)

    def test_window_size_breaks_remaining_ties(self):
        items = [scored(0.5, start=0, n=2, text="a b"), scored(0.5, start=0, n=1, text="a")]
        chosen = select_evidence(items, k=1)
        assert chosen.items[0].passage.window_size == 1

    @given(
        st.lists(
            st.tuples(st.integers(0, 30), st.floats(-1, 1, allow_nan=False)),
            min_size=0,
            max_size=12,
        )
    )
    @settings(max_examples=120)
    def test_maximises_relevance_sum(self, raw):
        # Spans spaced out so overlap never constrains the choice.
        items = [scored(r, start=100 * i + s) for i, (s, r) in enumerate(raw)]
        chosen = select_evidence(items, k=5)
        got = math.fsum(sp.relevance for sp in chosen)
        assert got == best_subset_sum(items, 5)


class TestEvidenceSet:
    def test_ordering_enforced(self):
        with pytest.raises(ValidationError):
            EvidenceSet(items=(scored(0.1, 0), scored(0.9, 5)))

    def test_dominated_overlap_rejected(self):
        with pytest.raises(ValidationError):
            EvidenceSet(items=(scored(0.9, 0, n=2, text="a b"), scored(0.5, 1)))

    def test_equal_score_overlap_allowed(self):
        EvidenceSet(items=(scored(0.5, 0, n=2, text="a b"), scored(0.5, 1)))


class TestNonpositiveStatistic:
    def test_all_nonpositive(self):
        assert all_scores_nonpositive([scored(-0.1, 0), scored(0.0, 2)])

    def test_positive_present(self):
        assert not all_scores_nonpositive([scored(-0.1, 0), scored(0.2, 2)])

    def test_window_filter(self):
        items = [scored(0.5, 0, n=2, text="a b"), scored(-0.5, 0, n=1, text="a")]
        assert all_scores_nonpositive(items, window_size=1)
        assert not all_scores_nonpositive(items, window_size=2)
