"""Domain type invariants."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prove.core import (
    CLASSES,
    Evidence,
    MissingLabel,
    Passage,
    Reference,
    ScoredPassage,
    StanceDistribution,
    Triple,
    TripleComponent,
    UnverbalisableObject,
    ValidationError,
    VerdictReport,
    argmax_class,
    validate_triple,
)


def make_triple(datatype: str = "entity") -> Triple:
    return Triple(
        id="t1",
        subject=TripleComponent(id="Q1", main_label="Alpha"),
        predicate=TripleComponent(id="P1", main_label="relates to"),
        object=TripleComponent(id="Q2", main_label="Beta"),
        object_datatype=datatype,
    )


class TestTripleComponent:
    def test_empty_label_rejected(self):
        with pytest.raises(MissingLabel):
            TripleComponent(id="Q1", main_label="")

    def test_duplicate_aliases_rejected(self):
        with pytest.raises(ValidationError):
            TripleComponent(id="Q1", main_label="x", aliases=("a", "a"))

    def test_main_label_not_an_alias(self):
        with pytest.raises(ValidationError):
            TripleComponent(id="Q1", main_label="x", aliases=("x",))


class TestValidateTriple:
    def test_entity_triple_ok(self):
        validate_triple(make_triple())

    def test_image_object_rejected(self):
        with pytest.raises(UnverbalisableObject):
            validate_triple(make_triple(datatype="image"))

    @pytest.mark.parametrize("datatype", ["url", "coordinate", "external-id"])
    def test_other_unverbalisable_types(self, datatype):
        with pytest.raises(UnverbalisableObject):
            validate_triple(make_triple(datatype=datatype))


class TestReference:
    def test_document_with_html_rejected(self):
        with pytest.raises(ValidationError):
            Reference(id="r", source_kind="document", source_value="text", html="<p>")

    def test_with_fetched_records_netloc(self):
        ref = Reference(id="r", source_kind="url", source_value="http://a.example/x")
        fetched = ref.with_fetched("https://b.example/y", "<html></html>")
        assert fetched.final_url == "https://b.example/y"
        assert fetched.netloc == "b.example"
        assert fetched.html == "<html></html>"


class TestStanceDistribution:
    @given(st.tuples(st.floats(0.001, 1), st.floats(0.001, 1), st.floats(0.001, 1)))
    def test_normalised_triples_accepted(self, raw):
        total = sum(raw)
        dist = StanceDistribution(raw[0] / total, raw[1] / total, raw[2] / total)
        assert abs(dist.supp + dist.ref + dist.nei - 1.0) <= 1e-6

    @given(
        st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)).filter(
            lambda t: abs(sum(t) - 1.0) > 1e-4
        )
    )
    def test_non_distributions_rejected(self, raw):
        with pytest.raises(ValidationError):
            StanceDistribution(*raw)

    def test_component_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            StanceDistribution(1.2, -0.2, 0.0)


class TestPassage:
    @given(st.lists(st.text(alphabet="abcdef", min_size=1), min_size=1, max_size=8),
           st.data())
    def test_reconstruction_invariant(self, segments, data):
        n = data.draw(st.integers(1, len(segments)))
        i = data.draw(st.integers(0, len(segments) - n))
        passage = Passage(
            text=" ".join(segments[i:i + n]),
            window_size=n,
            start_index=i,
            end_index=i + n - 1,
        )
        assert passage.text == " ".join(segments[i:i + n])

    def test_span_size_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            Passage(text="a b", window_size=2, start_index=0, end_index=0)

    def test_overlap_by_span_intersection(self):
        a = Passage(text="a b", window_size=2, start_index=0, end_index=1)
        b = Passage(text="b", window_size=1, start_index=1, end_index=1)
        c = Passage(text="c", window_size=1, start_index=2, end_index=2)
        assert a.overlaps(b) and b.overlaps(a)
        assert not a.overlaps(c)


def make_evidence(relevance: float, start: int = 0) -> Evidence:
    sp = ScoredPassage(
        passage=Passage(text="evidence text", window_size=1,
                        start_index=start, end_index=start),
        relevance=relevance,
    )
    return Evidence.from_parts(sp, StanceDistribution(0.5, 0.25, 0.25))


class TestVerdictReport:
    def test_argmax_rule(self):
        report = VerdictReport(
            final_class="REF",
            support_probability=0.1,
            evidence=(),
            aggregator="weighted_sum",
            aggregate_values=(0.1, 0.7, 0.2),
        )
        assert report.final_class == "REF"

    def test_wrong_class_rejected(self):
        with pytest.raises(ValidationError):
            VerdictReport(
                final_class="SUPP",
                support_probability=0.1,
                evidence=(),
                aggregator="weighted_sum",
                aggregate_values=(0.1, 0.7, 0.2),
            )

    def test_all_zero_values_mean_nei(self):
        report = VerdictReport(
            final_class="NEI",
            support_probability=0.0,
            evidence=(),
            aggregator="weighted_sum",
            aggregate_values=(0.0, 0.0, 0.0),
        )
        assert report.final_class == "NEI"
        with pytest.raises(ValidationError):
            VerdictReport(
                final_class="SUPP",
                support_probability=0.0,
                evidence=(),
                aggregator="weighted_sum",
                aggregate_values=(0.0, 0.0, 0.0),
            )

    def test_evidence_must_descend_by_relevance(self):
        with pytest.raises(ValidationError):
            VerdictReport(
                final_class="SUPP",
                support_probability=0.9,
                evidence=(make_evidence(0.1, 0), make_evidence(0.9, 2)),
                aggregator="malon",
                aggregate_values=(1.0, 0.0, 0.0),
            )

    def test_evidence_length_checked(self):
        sp = ScoredPassage(
            passage=Passage(text="abc", window_size=1, start_index=0, end_index=0),
            relevance=0.5,
        )
        with pytest.raises(ValidationError):
            Evidence(scored=sp, stance=StanceDistribution(1.0, 0.0, 0.0), length_chars=2)


class TestArgmax:
    def test_tie_break_order(self):
        assert argmax_class((0.4, 0.4, 0.2)) == "SUPP"
        assert argmax_class((0.2, 0.4, 0.4)) == "REF"
        assert argmax_class((1 / 3, 1 / 3, 1 / 3)) == "SUPP"

    @given(st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)))
    def test_argmax_is_maximal(self, values):
        chosen = argmax_class(values)
        assert values[CLASSES.index(chosen)] == max(values)
