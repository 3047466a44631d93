import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusword.words import (
    Alphabet,
    ComplexityReport,
    FiniteWord,
    StabilizationPolicy,
    WordError,
    complexity,
    complexity_entry,
    constant_word,
    factor_counts,
    factor_set_to_csv,
    factors,
    word_from_finite,
)

AB2 = Alphabet(2)
AB3 = Alphabet(3)


class TestAlphabet:
    def test_default_labels(self):
        assert [AB3.label(i) for i in range(3)] == ["1", "2", "3"]
        assert AB3.symbol_of_label("2") == 1

    def test_custom_labels(self):
        ab = Alphabet(2, ("a", "b"))
        assert ab.label(1) == "b"
        assert ab.symbol_of_label("a") == 0

    def test_size_bounds(self):
        with pytest.raises(WordError):
            Alphabet(0)
        with pytest.raises(WordError):
            Alphabet(257)

    def test_label_count_must_match(self):
        with pytest.raises(WordError):
            Alphabet(3, ("a", "b"))


class TestFiniteWord:
    def test_from_labels_roundtrip(self):
        w = FiniteWord.from_labels(AB2, "12212")
        assert str(w) == "12212"
        assert len(w) == 5
        assert list(w) == [0, 1, 1, 0, 1]

    def test_equality_and_hash(self):
        w1 = FiniteWord.from_labels(AB2, "121")
        w2 = FiniteWord(AB2, [0, 1, 0])
        assert w1 == w2
        assert hash(w1) == hash(w2)
        assert w1 != FiniteWord.from_labels(AB2, "122")

    def test_concatenation_and_slicing(self):
        w = FiniteWord.from_labels(AB2, "12") + FiniteWord.from_labels(AB2, "21")
        assert str(w) == "1221"
        assert str(w[1:3]) == "22"
        assert w[0] == 0

    def test_immutable(self):
        w = FiniteWord.from_labels(AB2, "12")
        with pytest.raises(AttributeError):
            w.symbols = np.zeros(2)
        with pytest.raises(ValueError):
            w.symbols[0] = 1

    def test_out_of_range_symbol(self):
        with pytest.raises(WordError):
            FiniteWord(AB2, [0, 2])


class TestLazyWord:
    def test_constant_word(self):
        w = constant_word(AB2, 1)
        assert w.prefix(5).tolist() == [1, 1, 1, 1, 1]
        assert not w.exhausted

    def test_prefix_caching_is_stable(self):
        w = word_from_finite(AB2, [0, 1, 0, 0, 1])
        first = w.prefix(3).tolist()
        assert w.prefix(3).tolist() == first

    def test_finite_source_truncates(self):
        w = word_from_finite(AB2, [0, 1, 0])
        assert w.prefix(10).tolist() == [0, 1, 0]
        assert w.exhausted
        assert w.truncation_reason == "finite source"

    def test_negative_prefix_rejected(self):
        with pytest.raises(WordError):
            constant_word(AB2).prefix(-1)


class TestFactors:
    def test_counts_sum_to_positions(self):
        w = word_from_finite(AB2, [0, 1, 1, 0, 1, 1, 0])
        counts = factor_counts(w, 2, 7)
        assert sum(counts.values()) == 6
        assert counts[FiniteWord.from_labels(AB2, "22")] == 2

    def test_factor_set(self):
        w = word_from_finite(AB2, [0, 1, 1, 0, 1, 1, 0])
        fs = factors(w, 2, 7)
        assert {str(f) for f in fs} == {"12", "22", "21"}

    def test_bad_arguments(self):
        w = constant_word(AB2)
        with pytest.raises(WordError):
            factor_counts(w, 0, 5)
        with pytest.raises(WordError):
            factor_counts(w, 5, 3)

    @given(st.lists(st.integers(0, 1), min_size=4, max_size=60), st.integers(1, 4))
    @settings(max_examples=60, deadline=None)
    def test_counts_match_naive_enumeration(self, data, n):
        if len(data) < n:
            return
        w = word_from_finite(AB2, data)
        counts = factor_counts(w, n, len(data))
        naive = {}
        for i in range(len(data) - n + 1):
            key = tuple(data[i : i + n])
            naive[key] = naive.get(key, 0) + 1
        assert {tuple(f.symbols): c for f, c in counts.items()} == naive


class TestComplexity:
    def test_constant_word_complexity(self):
        rep = complexity(constant_word(AB2), 8)
        assert [e.p for e in rep.rows()] == [1] * 8
        assert rep.all_stabilized()

    def test_periodic_word_complexity(self):
        w = word_from_finite(AB2, [0, 1, 0, 1] * 4096)
        rep = complexity(w, 6)
        assert [e.p for e in rep.rows()] == [2] * 6

    def test_entry_reports_prefix_length(self):
        e = complexity_entry(constant_word(AB2), 3, StabilizationPolicy())
        assert e.n == 3
        assert e.prefix_len >= 1024
        assert e.stabilized

    def test_truncated_word_not_stabilized_at_cap(self):
        w = word_from_finite(AB2, list(np.random.default_rng(7).integers(0, 2, 200)))
        policy = StabilizationPolicy(base=64, cap=128)
        e = complexity_entry(w, 3, policy)
        assert isinstance(e.p, int) and e.p >= 1

    def test_policy_initial(self):
        policy = StabilizationPolicy(base=1024, per_n=64)
        assert policy.initial(1) == 1024
        assert policy.initial(100) == 6400
        assert StabilizationPolicy(cap=500).initial(1) == 500

    @given(st.integers(1, 6))
    @settings(max_examples=6, deadline=None)
    def test_complexity_monotone_in_n(self, n_max):
        w = word_from_finite(AB2, list(np.random.default_rng(1).integers(0, 2, 5000)))
        rep = complexity(w, n_max)
        ps = [e.p for e in rep.rows()]
        assert all(a <= b for a, b in zip(ps, ps[1:]))


class TestCsv:
    def test_complexity_csv_header(self):
        rep = complexity(constant_word(AB2), 2)
        buf = io.StringIO()
        rep.to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "n,p_n,prefix_len,stabilized"
        assert lines[1].startswith("1,1,")

    def test_factor_set_csv(self):
        fs = factors(word_from_finite(AB2, [0, 1, 0]), 1, 3)
        buf = io.StringIO()
        factor_set_to_csv(fs, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "factor"
        assert sorted(lines[1:]) == ["1", "2"]

    def test_report_p_lookup(self):
        rep = complexity(constant_word(AB2), 4)
        assert isinstance(rep, ComplexityReport)
        assert rep.p(3) == 1
        with pytest.raises(KeyError):
            rep.p(99)
