"""Dataset loading, vote aggregation and the evaluation harness."""

from __future__ import annotations

import dataclasses
import json
import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prove.evaluation import (
    EvaluationConfig,
    SchemaError,
    VoteSet,
    evaluate_pipeline,
    features_from_records,
    load_wtr,
    majority_vote,
    map_author_label,
    render_aggregation_table,
    render_support_table,
    resolve_votes,
    save_wtr,
    write_reports,
)

FIXTURE = "tests/fixtures/wtr_small.jsonl"


class TestMajorityVote:
    def test_two_way_tie_flagged(self):
        label, tie = majority_vote([0, 0, 2, 2, 1])
        assert tie is True
        assert label == 0  # smallest tied code reported

    def test_clear_majority(self):
        assert majority_vote([0, 0, 0, 2, 1]) == (0, False)

    def test_all_not_sure(self):
        assert majority_vote([3, 3, 3]) == (3, False)

    def test_not_sure_never_wins_over_substantive(self):
        assert majority_vote([3, 3, 3, 2]) == (2, False)

    def test_empty_rejected(self):
        with pytest.raises(Exception):
            majority_vote([])

    @given(st.lists(st.integers(0, 3), min_size=1, max_size=12), st.integers(0, 100))
    def test_permutation_invariant(self, votes, seed):
        shuffled = votes[:]
        random.Random(seed).shuffle(shuffled)
        assert majority_vote(votes) == majority_vote(shuffled)

    @given(st.lists(st.lists(st.integers(0, 3), min_size=1, max_size=9),
                    min_size=1, max_size=40))
    def test_tie_fraction_matches_recount_oracle(self, vote_lists):
        # Independent recount: a tie means the two most common substantive
        # votes have equal counts.
        def recount_tie(votes):
            substantive = [v for v in votes if v != 3]
            if not substantive:
                return False
            common = Counter(substantive).most_common()
            return len(common) > 1 and common[0][1] == common[1][1]

        got = sum(1 for votes in vote_lists if majority_vote(votes)[1])
        expected = sum(1 for votes in vote_lists if recount_tie(votes))
        assert got == expected


class TestResolveVotes:
    def test_tie_break_field_used(self):
        vs = VoteSet(votes=(0, 0, 2, 2, 3), tie_break=2)
        assert resolve_votes(vs) == 2

    def test_tie_without_break_excluded(self):
        assert resolve_votes(VoteSet(votes=(0, 2))) is None

    def test_not_sure_aggregate_excluded(self):
        assert resolve_votes(VoteSet(votes=(3, 3))) is None

    def test_majority_passes_through(self):
        assert resolve_votes(VoteSet(votes=(1, 1, 2))) == 1


class TestMapAuthorLabel:
    @pytest.mark.parametrize(
        "label,expected",
        [("1A", "SUPP"), ("1B", "SUPP"), ("1C", "SUPP"), ("1D", "SUPP"),
         ("2A", "REF"), ("2B", "NEI")],
    )
    def test_ternary(self, label, expected):
        assert map_author_label(label, "ternary") == expected

    @pytest.mark.parametrize(
        "label,expected",
        [("1A", "supporting"), ("1D", "supporting"),
         ("2A", "not_supporting"), ("2B", "not_supporting")],
    )
    def test_binary(self, label, expected):
        assert map_author_label(label, "binary") == expected

    def test_dotted_forms_accepted(self):
        assert map_author_label("1.D.", "ternary") == "SUPP"


class TestLoadWtr:
    def test_fixture_loads(self):
        records = load_wtr(FIXTURE)
        assert len(records) == 5
        assert {r.author_label for r in records} == {"1A", "1B", "1D", "2A", "2B"}
        assert all(len(r.t1) <= 5 for r in records)

    def test_round_trip(self, tmp_path):
        records = load_wtr(FIXTURE)
        out = tmp_path / "copy.jsonl"
        save_wtr(records, out)
        assert load_wtr(out) == records

    def test_duplicates_dropped(self, tmp_path):
        records = load_wtr(FIXTURE)
        # 5 originals + 7 duplicates of the first record -> 5 survive.
        duplicated = records + [
            dataclasses.replace(records[0], claim_id=f"dup{i}") for i in range(7)
        ]
        out = tmp_path / "dups.jsonl"
        save_wtr(duplicated, out)
        assert len(load_wtr(out)) == 5

    def test_unknown_vote_code_rejected_with_path(self, tmp_path):
        records = load_wtr(FIXTURE)
        broken = dataclasses.replace(
            records[0], t2=VoteSet(votes=(0, 4, 2))
        )
        out = tmp_path / "broken.jsonl"
        save_wtr([broken], out)
        with pytest.raises(SchemaError) as err:
            load_wtr(out)
        assert "t2.votes[1]" in str(err.value)

    def test_unknown_author_label_rejected(self, tmp_path):
        out = tmp_path / "label.jsonl"
        lines = open(FIXTURE, encoding="utf-8").read().splitlines()
        payload = json.loads(lines[1])
        payload["author_label"] = "3X"
        out.write_text(lines[0] + "\n" + json.dumps(payload) + "\n", "utf-8")
        with pytest.raises(SchemaError):
            load_wtr(out)

    def test_header_only_file_is_empty(self, tmp_path):
        out = tmp_path / "empty.jsonl"
        out.write_text('{"schema": "wtr", "version": 1}\n', "utf-8")
        assert load_wtr(out) == []

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(SchemaError):
            load_wtr(tmp_path / "nope.jsonl")

    def test_wrong_schema_rejected(self, tmp_path):
        out = tmp_path / "wrong.jsonl"
        out.write_text('{"schema": "other", "version": 1}\n', "utf-8")
        with pytest.raises(SchemaError):
            load_wtr(out)


@pytest.fixture(scope="module")
def bundle(baseline):
    records = load_wtr(FIXTURE)
    return evaluate_pipeline(records, baseline, EvaluationConfig(seed=7))


class TestEvaluatePipeline:
    def test_all_records_processed(self, bundle):
        assert bundle.n_records == 5
        assert bundle.n_errors == 0
        assert len(bundle.per_record) == 5

    def test_reports_for_all_aggregators(self, bundle):
        for aggregator in ("weighted_sum", "malon", "classifier"):
            assert aggregator in bundle.t2_reports
            assert aggregator in bundle.author_reports
            assert bundle.t2_reports[aggregator]["n"] > 0
            assert "ternary" in bundle.t2_reports[aggregator]
            assert "binary" in bundle.t2_reports[aggregator]

    def test_breakdown_rows_present(self, bundle):
        rows = bundle.author_breakdown["classifier"]
        assert set(rows) == {"1A", "1B", "1D", "ALL"}
        assert rows["ALL"]["n"] == 5
        # Each per-type subset holds that type plus the two non-supporting records.
        assert rows["1A"]["n"] == 3

    def test_relevance_statistics(self, bundle):
        assert bundle.relevance_pairs >= 2
        assert bundle.relevance_correlation is not None
        assert -1.0 <= bundle.relevance_correlation <= 1.0
        assert bundle.unmatched_t1 == 0

    def test_fractions_and_kappa(self, bundle):
        assert 0.0 <= bundle.all_irrelevant_fraction <= 1.0
        assert 0.0 <= bundle.all_irrelevant_fraction_window1 <= 1.0
        assert bundle.kappa_t1 is not None
        assert bundle.kappa_t2 is not None

    def test_deterministic_under_seed(self, baseline):
        records = load_wtr(FIXTURE)
        first = evaluate_pipeline(records, baseline, EvaluationConfig(seed=3))
        second = evaluate_pipeline(records, baseline, EvaluationConfig(seed=3))
        assert json.dumps(first.to_dict(), sort_keys=True) == json.dumps(
            second.to_dict(), sort_keys=True
        )

    def test_jobs_do_not_change_results(self, baseline):
        records = load_wtr(FIXTURE)
        serial = evaluate_pipeline(records, baseline, EvaluationConfig(seed=3, jobs=1))
        parallel = evaluate_pipeline(records, baseline, EvaluationConfig(seed=3, jobs=4))
        assert serial.to_dict() == parallel.to_dict()

    def test_per_record_error_recorded_without_abort(self, baseline):
        records = load_wtr(FIXTURE)
        broken = dataclasses.replace(records[0], datatype="url", claim_id="bad")
        bundle = evaluate_pipeline([broken] + records[1:], baseline, EvaluationConfig())
        assert bundle.n_errors == 1
        assert bundle.errors[0]["claim_id"] == "bad"
        assert len(bundle.per_record) == 5

    def test_report_files_written(self, bundle, tmp_path):
        paths = write_reports(bundle, tmp_path / "out")
        for path in paths.values():
            assert path.exists()
        payload = json.loads(paths["json"].read_text("utf-8"))
        assert payload["schema_version"] == 1
        tables = paths["tables"].read_text("utf-8")
        assert "Aggregation performance" in tables
        assert "ALL" in tables
        csv_text = paths["csv"].read_text("utf-8")
        assert csv_text.splitlines()[0].startswith("claim_id,")
        assert len(csv_text.splitlines()) == 6

    def test_tables_render(self, bundle):
        table2 = render_aggregation_table(bundle)
        assert "weighted_sum" in table2 and "classifier" in table2
        table3 = render_support_table(bundle)
        assert "1A" in table3 and "ALL" in table3


class TestFeaturesFromRecords:
    def test_fixture_produces_labelled_samples(self, baseline):
        records = load_wtr(FIXTURE)
        samples = features_from_records(records, baseline)
        assert len(samples) == 5
        labels = {label for _, label in samples}
        assert labels == {"SUPP", "REF", "NEI"}
        assert all(len(fv.values) == 25 for fv, _ in samples)
