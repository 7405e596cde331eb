import logging
import math
from collections import Counter

import hypothesis.strategies as st
import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings

from oodlab.errors import DataError, UsageError
from oodlab.textdiv import (NgramModel, divergence_matrix, fit_ngrams, fit_orders,
                            kl_divergence, normalize_matrix, textual_divergence)

lines = st.lists(st.text(alphabet="abcd ", max_size=12), min_size=1, max_size=6).filter(
    lambda corpus: any(corpus))


# ============================================================================
# N-GRAMS
# ============================================================================

@settings(max_examples=50)
@given(lines, st.integers(1, 5))
def test_ngram_total_counts_every_window(corpus, n):
    model = fit_ngrams(corpus, n)
    assert model.total == sum(max(len(line) - n + 1, 0) for line in corpus)


def test_ngrams_do_not_cross_lines():
    model = fit_ngrams(["ab", "cd"], 2)
    assert set(model.counts) == {("a", "b"), ("c", "d")}


def test_symbol_sequences_count_as_single_symbols():
    model = fit_ngrams([("a", "[UNK]", "b")], 1)
    assert model.counts[("[UNK]",)] == 1


def test_empty_corpus():
    with pytest.raises(DataError):
        fit_ngrams([], 1)
    with pytest.raises(DataError):
        fit_ngrams(["", ""], 2)


def test_invalid_orders():
    with pytest.raises(UsageError):
        NgramModel(order=6)
    with pytest.raises(UsageError):
        NgramModel(order=1, alpha=-0.5)


def test_smoothed_probabilities_sum_to_one():
    model = fit_ngrams(["aab"], 1, alpha=0.5)
    p = model.probabilities([("a",), ("b",), ("z",)])
    assert p.sum() == pytest.approx(1.0)
    assert p[0] == pytest.approx((2 + 0.5) / (3 + 1.5))


# ============================================================================
# KL DIVERGENCE
# ============================================================================

def _unigrams(counts, alpha=0.0):
    return NgramModel(order=1, counts=Counter({(k,): v for k, v in counts.items()}), alpha=alpha)


def direct_kl(p_counts, q_counts, alpha):
    """Plain-loop KL of two count tables smoothed over their joint observed support"""
    support = sorted({k for k, v in p_counts.items() if v > 0}
                     | {k for k, v in q_counts.items() if v > 0})
    if not support:
        return 0.0
    p_total = sum(p_counts.get(k, 0) for k in support) + alpha * len(support)
    q_total = sum(q_counts.get(k, 0) for k in support) + alpha * len(support)
    value = 0.0
    for k in support:
        p = (p_counts.get(k, 0) + alpha) / p_total
        q = (q_counts.get(k, 0) + alpha) / q_total
        value += p * math.log(p / q)
    return value


def direct_divergence(src, tgt, nmax, alpha=1.0):
    """Average over orders of direct_kl on substring counts"""
    values = []
    for n in range(1, nmax + 1):
        p = Counter(line[i:i + n] for line in src for i in range(len(line) - n + 1))
        q = Counter(line[i:i + n] for line in tgt for i in range(len(line) - n + 1))
        values.append(direct_kl(p, q, alpha))
    return sum(values) / nmax


counts = st.dictionaries(st.sampled_from("abcdefgh"), st.integers(0, 40), max_size=8)


class TestKl:
    def test_hand_computed_value(self):
        P = _unigrams({"a": 5, "b": 5})
        Q = _unigrams({"a": 9, "b": 1})
        expected = 0.5 * math.log(0.5 / 0.9) + 0.5 * math.log(0.5 / 0.1)
        assert kl_divergence(P, Q) == pytest.approx(expected)
        assert kl_divergence(P, Q) == pytest.approx(0.5108, abs=1e-4)

    def test_is_directional(self):
        P = _unigrams({"a": 5, "b": 5})
        Q = _unigrams({"a": 9, "b": 1})
        assert kl_divergence(Q, P) == pytest.approx(0.3681, abs=1e-4)
        assert kl_divergence(Q, P) != pytest.approx(kl_divergence(P, Q))

    def test_unseen_mass_without_smoothing_is_infinite(self, caplog):
        P = _unigrams({"a": 1, "b": 1})
        Q = _unigrams({"a": 1})
        with caplog.at_level(logging.WARNING):
            assert kl_divergence(P, Q) == math.inf
        assert "infinite" in caplog.text

    @settings(max_examples=100)
    @given(counts, counts, st.sampled_from([0.1, 0.5, 1.0, 3.0]))
    def test_matches_direct_summation(self, p_counts, q_counts, alpha):
        value = kl_divergence(_unigrams(p_counts, alpha), _unigrams(q_counts, alpha))
        assert value == pytest.approx(direct_kl(p_counts, q_counts, alpha), abs=1e-12)

    def test_order_mismatch(self):
        with pytest.raises(UsageError):
            kl_divergence(NgramModel(order=1), NgramModel(order=2))

    @settings(max_examples=50)
    @given(lines, lines)
    def test_nonnegative(self, a, b):
        for P, Q in zip(fit_orders(a, 3), fit_orders(b, 3)):
            assert kl_divergence(P, Q) >= 0.0


# ============================================================================
# TEXTUAL DIVERGENCE
# ============================================================================

def test_disjoint_two_letter_corpora():
    # orders 1 and 2 each give ln2 / 3; orders 3..5 have no n-grams at all
    assert textual_divergence(["ab"], ["cd"]) == pytest.approx(2 * math.log(2) / 15)


@settings(max_examples=30)
@given(lines)
def test_identical_corpora_have_zero_divergence(corpus):
    assert textual_divergence(corpus, list(corpus)) == pytest.approx(0.0, abs=1e-12)


def test_more_smoothing_never_increases_divergence():
    # equal line lengths give both sides the same n-gram totals at every order
    src, tgt = ["the cat sat", "on the mat"], ["le chat est", "sur la nap"]
    values = [textual_divergence(src, tgt, nmax=3, alpha=alpha) for alpha in (0.1, 1.0, 10.0)]
    assert values[0] >= values[1] >= values[2] > 0.0
    assert values[0] > values[2]


def test_nmax_out_of_range():
    with pytest.raises(UsageError):
        textual_divergence(["ab"], ["ab"], nmax=0)
    with pytest.raises(UsageError):
        divergence_matrix([["ab"], ["cd"]], nmax=6)


class TestMatrix:
    corpora = [["the cat sat"], ["le chat"], ["the hat"]]

    def test_entries_match_direct_counts(self):
        names = ["en", "fr", "en2"]
        matrix = divergence_matrix(self.corpora, names=names, nmax=3)
        assert list(matrix.index) == names
        assert np.all(np.diag(matrix.to_numpy()) == 0.0)
        for i, source in enumerate(names):
            for j, target in enumerate(names):
                if i != j:
                    expected = direct_divergence(self.corpora[i], self.corpora[j], nmax=3)
                    assert matrix.loc[source, target] == pytest.approx(expected, rel=1e-12)
        assert (matrix.to_numpy() > 0).all(where=~np.eye(3, dtype=bool))

    def test_workers_do_not_change_values(self):
        serial = divergence_matrix(self.corpora, nmax=3)
        threaded = divergence_matrix(self.corpora, nmax=3, max_workers=3)
        pd.testing.assert_frame_equal(serial, threaded)

    def test_needs_two_corpora(self):
        with pytest.raises(UsageError):
            divergence_matrix([["ab"]])

    def test_normalized_range(self):
        matrix = divergence_matrix(self.corpora, nmax=3, normalize=True)
        off = matrix.to_numpy()[~np.eye(3, dtype=bool)]
        assert off.min() == 0.0 and off.max() == pytest.approx(100.0)
        assert np.all(np.diag(matrix.to_numpy()) == 0.0)


def test_normalize_constant_off_diagonal(caplog):
    values = np.array([[5.0, 2.0], [2.0, 9.0]])
    with caplog.at_level(logging.WARNING):
        out = normalize_matrix(values)
    np.testing.assert_array_equal(out, np.zeros((2, 2)))
    assert "equal" in caplog.text


def test_normalize_rejects_non_finite():
    with pytest.raises(DataError):
        normalize_matrix(np.array([[0.0, math.inf], [1.0, 0.0]]))
