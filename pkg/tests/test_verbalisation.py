"""Label selection, templates and backend fallback."""

from __future__ import annotations

import pytest

from prove.backends import BackendError, BackendProtocolError, BaselineBackend, ScorerBackend
from prove.core import ProveError, Triple, TripleComponent
from prove.verbalisation import (
    LabelPolicy,
    OverrideNotAnAlias,
    format_datetime_label,
    select_labels,
    template_verbalise,
    verbalise,
)


def make_triple(object_label: str = "James H. Billington",
                datatype: str = "entity") -> Triple:
    return Triple(
        id="t",
        subject=TripleComponent(id="Q1100653", main_label="Librarian of Congress"),
        predicate=TripleComponent(
            id="P40", main_label="child", aliases=("has child", "parent of")
        ),
        object=TripleComponent(id="Q734212", main_label=object_label),
        object_datatype=datatype,
    )


class StubBackend(ScorerBackend):
    def __init__(self, sentence: str | None = "Stub sentence.", fail: bool = False):
        self.sentence = sentence
        self.fail = fail

    def verbalise(self, subject, predicate, object_):
        if self.fail:
            raise BackendError("offline")
        return self.sentence

    def relevance(self, claim, passages):
        return [0.0] * len(passages)

    def stance(self, claim, evidence):
        return [(1 / 3, 1 / 3, 1 / 3)] * len(evidence)


class TestSelectLabels:
    def test_defaults_to_main_labels(self):
        labels = select_labels(make_triple())
        assert labels == ("Librarian of Congress", "child", "James H. Billington")

    def test_alias_override(self):
        policy = LabelPolicy(overrides={"P40": "has child"})
        labels = select_labels(make_triple(), policy)
        assert labels[1] == "has child"

    def test_override_not_an_alias(self):
        policy = LabelPolicy(overrides={"P40": "offspring"})
        with pytest.raises(OverrideNotAnAlias):
            select_labels(make_triple(), policy)

    def test_override_may_equal_main_label(self):
        policy = LabelPolicy(overrides={"P40": "child"})
        assert select_labels(make_triple(), policy)[1] == "child"

    def test_pure_function(self):
        triple = make_triple()
        policy = LabelPolicy(overrides={"P40": "has child"})
        assert select_labels(triple, policy) == select_labels(triple, policy)

    def test_datetime_formatting_applied_to_object(self):
        triple = make_triple(object_label="1890-05-17", datatype="datetime")
        assert select_labels(triple)[2] == "17 May 1890"

    def test_override_file_roundtrip(self, tmp_path):
        path = tmp_path / "overrides.tsv"
        path.write_text("# comment\nP40\thas child\n", "utf-8")
        policy = LabelPolicy.from_file(path)
        assert policy.overrides == {"P40": "has child"}


class TestDatetimeFormatting:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("1890-05-17", "17 May 1890"),
            ("1890-05", "May 1890"),
            ("1890", "1890"),
            ("+1890-05-17T00:00:00Z", "17 May 1890"),
            ("not a date", "not a date"),
        ],
    )
    def test_granularity_patterns(self, raw, expected):
        assert format_datetime_label(raw) == expected


class TestTemplateVerbalise:
    def test_child_pattern(self):
        v = template_verbalise(("A", "child", "B"))
        assert v.text == "A's child is B."
        assert v.origin == "template"

    def test_inception_pattern(self):
        assert template_verbalise(("X", "inception", "1890")).text == "X's inception is 1890."

    def test_empty_predicate_rejected(self):
        with pytest.raises(ProveError):
            template_verbalise(("A", "", "B"))


class TestVerbalise:
    def test_backend_sentence_used(self):
        v = verbalise(("Librarian of Congress", "position holder", "James H. Billington"),
                      StubBackend("James H. Billington is the Librarian of Congress."))
        assert v.origin == "backend"
        assert "Billington" in v.text

    def test_baseline_backend_names_all_labels(self):
        labels = ("Librarian of Congress", "position holder", "James H. Billington")
        v = verbalise(labels, BaselineBackend())
        for label in labels:
            assert label in v.text

    def test_offline_backend_falls_back_to_template(self):
        v = verbalise(("A", "child", "B"), StubBackend(fail=True))
        assert v.origin == "template"
        assert v.text == "A's child is B."
        assert "A" in v.text and "B" in v.text

    def test_empty_backend_response_is_protocol_error(self):
        with pytest.raises(BackendProtocolError):
            verbalise(("A", "child", "B"), StubBackend(sentence=""))
