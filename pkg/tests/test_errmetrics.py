import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from oodlab.errmetrics import (EditOp, PredictionRecord, align, corpus_cer, corpus_wer, ece,
                               levenshtein, load_predictions, mce, reliability_table,
                               scored_characters, write_predictions)
from oodlab.errors import DataError, UsageError

short_text = st.text(alphabet="abc ", max_size=10)


# ============================================================================
# EDIT DISTANCE
# ============================================================================

@pytest.mark.parametrize("a, b, distance", [
    ("kitten", "sitting", 3),
    ("", "abc", 3),
    ("abc", "", 3),
    ("flaw", "lawn", 2),
    ("same", "same", 0),
])
def test_levenshtein_known_values(a, b, distance):
    assert levenshtein(a, b) == distance


def recursive_distance(a: str, b: str) -> int:
    if not a or not b:
        return len(a) + len(b)
    if a[0] == b[0]:
        return recursive_distance(a[1:], b[1:])
    return 1 + min(recursive_distance(a[1:], b),
                   recursive_distance(a, b[1:]),
                   recursive_distance(a[1:], b[1:]))


@settings(max_examples=1000, deadline=None)
@given(st.text(alphabet="abc", max_size=7), st.text(alphabet="abc", max_size=7))
def test_levenshtein_matches_recursive_definition(a, b):
    assert levenshtein(a, b) == recursive_distance(a, b)


def test_levenshtein_on_word_lists():
    assert levenshtein(["a", "move", "to"], ["a", "moved", "to", "stop"]) == 2
    assert levenshtein([], ["word"]) == 1


@settings(max_examples=80)
@given(short_text, short_text, short_text)
def test_levenshtein_is_a_metric(a, b, c):
    assert levenshtein(a, b) == levenshtein(b, a)
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)
    assert (levenshtein(a, b) == 0) == (a == b)


@settings(max_examples=80)
@given(short_text, short_text)
def test_alignment_cost_equals_distance(ref, hyp):
    pairs = align(ref, hyp)
    assert sum(pair.op != EditOp.MATCH for pair in pairs) == levenshtein(ref, hyp)
    assert [p.ref_index for p in pairs if p.ref_index is not None] == list(range(len(ref)))
    assert [p.hyp_index for p in pairs if p.hyp_index is not None] == list(range(len(hyp)))


def test_alignment_prefers_substitution():
    assert [pair.op for pair in align("ab", "xb")] == [EditOp.SUBSTITUTE, EditOp.MATCH]


# ============================================================================
# RATES
# ============================================================================

def _record(ref, hyp, conf=None, sample_id="s"):
    return PredictionRecord(sample_id=sample_id, reference=ref, hypothesis=hyp,
                            confidences=conf)


class TestRates:
    def test_cer_pools_over_records(self):
        records = [_record("abcd", "abxd"), _record("efghij", "efghij")]
        assert corpus_cer(records) == pytest.approx(10.0)

    def test_wer_can_exceed_100(self):
        assert corpus_wer([_record("one", "a b c")]) == pytest.approx(300.0)

    def test_wer_ignores_whitespace_runs(self):
        assert corpus_wer([_record("the  cat", "the cat ")]) == 0.0

    def test_empty_inputs(self):
        with pytest.raises(DataError):
            corpus_cer([])
        with pytest.raises(DataError, match="empty"):
            corpus_cer([_record("", "x")])

    def test_confidence_length_must_match(self):
        with pytest.raises(DataError, match="confidences"):
            _record("ab", "ab", (0.5,))
        with pytest.raises(DataError, match=r"\[0, 1\]"):
            _record("a", "a", (1.5,))


# ============================================================================
# CALIBRATION
# ============================================================================

class TestCalibration:
    def test_perfect_confidence_on_correct_text(self):
        assert ece([_record("abc", "abc", (1.0, 1.0, 1.0))]) == 0.0

    def test_uniform_overconfidence(self):
        records = [_record("ab", "ab", (0.9, 0.9))]
        assert ece(records) == pytest.approx(0.1)
        assert mce(records) == pytest.approx(0.1)

    def test_mixed_bins(self):
        # bin (0.2, 0.4]: one wrong char at 0.3 -> gap 0.3
        # bin (0.8, 1.0]: three right chars at 0.9 -> gap 0.1
        records = [_record("abcd", "abcx", (0.9, 0.9, 0.9, 0.3))]
        assert ece(records, bins=5) == pytest.approx(0.25 * 0.3 + 0.75 * 0.1)
        assert mce(records, bins=5) == pytest.approx(0.3)

    def test_inserted_characters_are_not_scored(self):
        conf, correct = scored_characters([_record("ab", "axb", (0.9, 0.1, 0.8))])
        np.testing.assert_array_equal(conf, [0.9, 0.8])
        np.testing.assert_array_equal(correct, [True, True])

    def test_zero_confidence_falls_in_first_bin(self):
        table = reliability_table([_record("a", "b", (0.0,))], bins=4)
        assert table.loc[0, "count"] == 1
        assert table["count"].sum() == 1
        assert np.isnan(table.loc[3, "accuracy"])

    def test_needs_confidences(self):
        with pytest.raises(DataError):
            ece([_record("a", "a")])
        with pytest.raises(UsageError):
            reliability_table([_record("a", "a", (1.0,))], bins=0)

    @settings(max_examples=50)
    @given(st.lists(st.tuples(short_text, short_text, st.floats(0.0, 1.0)),
                    min_size=1, max_size=5))
    def test_ece_lies_in_unit_interval(self, triples):
        records = [_record(r, h, (c,) * len(h), sample_id=str(i))
                   for i, (r, h, c) in enumerate(triples)]
        try:
            value = ece(records)
        except DataError:
            return
        assert 0.0 <= value <= 1.0


# ============================================================================
# PREDICTION LOGS
# ============================================================================

class TestPredictionLogs:
    def test_write_then_load(self, tmp_path):
        records = [_record("a b", "a c", (0.5, 0.25, 1.0), "l1"),
                   _record("xyz", "", (), "l2")]
        loaded = load_predictions(write_predictions(records, tmp_path / "p.tsv"))
        assert loaded == records

    def test_without_confidences(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("sample_id\treference\thypothesis\nl1\tabc\tabd\n", encoding="utf-8")
        [record] = load_predictions(path)
        assert not record.has_confidences
        assert corpus_cer([record]) == pytest.approx(100 / 3)

    def test_missing_column(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("sample_id\treference\nl1\tabc\n", encoding="utf-8")
        with pytest.raises(DataError, match="hypothesis"):
            load_predictions(path)

    def test_bad_confidence_cell(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("sample_id\treference\thypothesis\tconfidences\n"
                        "l1\tab\tab\t0.5,high\n", encoding="utf-8")
        with pytest.raises(DataError, match="malformed"):
            load_predictions(path)
