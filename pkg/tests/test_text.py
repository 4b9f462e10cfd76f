import pytest
from hypothesis import given
from hypothesis import strategies as st

from marginalia.errors import DomainError
from marginalia.text import normalize_newlines, verbatim_contains, word_count


class TestWordCount:
    def test_two_words(self):
        assert word_count("hello world") == 2

    def test_empty(self):
        assert word_count("") == 0

    def test_hyphenated_compound_is_one_word(self):
        # maximal non-whitespace runs: "state-of-the-art" and "model"
        assert word_count("state-of-the-art model") == 2

    def test_whitespace_only(self):
        assert word_count(" \t\n ") == 0

    @given(st.text())
    def test_invariant_under_whitespace_noise(self, text):
        noisy = "  " + text.replace(" ", "   ") + "\t\n"
        assert word_count(noisy) == word_count(text)

    @given(st.lists(st.text(alphabet="abc-'", min_size=1), max_size=20))
    def test_counts_joined_tokens(self, tokens):
        assert word_count(" ".join(tokens)) == len(tokens)


class TestVerbatimContains:
    def test_literal_substring(self):
        assert verbatim_contains("the prisoner's dilemma arises", "prisoner's dilemma")

    def test_no_case_folding(self):
        assert not verbatim_contains("the Prisoner's dilemma", "prisoner's dilemma")

    def test_crlf_normalized_on_both_sides(self):
        assert verbatim_contains("alpha\r\nbeta", "alpha\nbeta")
        assert verbatim_contains("alpha\nbeta", "alpha\r\nbeta")

    def test_no_whitespace_collapsing(self):
        assert not verbatim_contains("a  b", "a b")

    def test_empty_needle_rejected(self):
        with pytest.raises(DomainError):
            verbatim_contains("anything", "")

    @given(st.text(min_size=1))
    def test_reflexive(self, text):
        assert verbatim_contains(text, text)

    @given(st.text(), st.text(min_size=1), st.text())
    def test_concatenation_contains_middle(self, left, middle, right):
        assert verbatim_contains(left + middle + right, middle)


def test_normalize_newlines_only_touches_crlf():
    assert normalize_newlines("a\r\nb\rc\nd") == "a\nb\rc\nd"
