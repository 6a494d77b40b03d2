from __future__ import annotations

import pytest
from hypothesis import given

from charqa.errors import EmptyTranscription, PositionOutOfRange
from charqa.words import (
    Charset,
    Word,
    char_at,
    charset_from_string,
    first_index,
    frequency,
    has_repeat,
    make_word,
    normalize_text,
)

from conftest import words


class TestMakeWord:
    def test_hello_has_five_units(self):
        w = make_word("HELLO")
        assert len(w) == 5
        assert w.units == ("H", "E", "L", "L", "O")

    def test_single_character(self):
        assert make_word("A").units == ("A",)

    def test_decomposed_accent_composes(self):
        # 'cafe' + combining acute = 5 scalars in, 4 units out
        w = make_word("café")
        assert len(w) == 4
        assert w.units[-1] == "é"

    @pytest.mark.parametrize("raw", ["", "   ", "\t\n", "   "])
    def test_rejects_blank_input(self, raw):
        with pytest.raises(EmptyTranscription):
            make_word(raw)

    def test_strips_surrounding_whitespace(self):
        assert make_word("  HELLO  ").units == make_word("HELLO").units

    @given(words)
    def test_round_trip_idempotent(self, s):
        w = make_word(s)
        assert make_word(w.render()).units == w.units

    @given(words)
    def test_units_match_normalized_raw(self, s):
        w = make_word(s)
        assert "".join(w.units) == normalize_text(w.raw)


class TestCharAt:
    def test_position_two(self):
        assert char_at(make_word("HELLO"), 2) == "E"

    def test_position_one(self):
        assert char_at(make_word("HELLO"), 1) == "H"

    @pytest.mark.parametrize("pos", [0, 6, -1, 100])
    def test_out_of_range(self, pos):
        with pytest.raises(PositionOutOfRange):
            char_at(make_word("HELLO"), pos)


def test_frequency():
    w = make_word("HELLO")
    assert frequency(w, "L") == 2
    assert frequency(w, "Z") == 0
    assert frequency(make_word("AAA"), "A") == 3


def test_frequency_case_fold():
    assert frequency(make_word("Hello"), "h") == 0
    assert frequency(make_word("Hello"), "h", case_fold=True) == 1


def test_first_index():
    w = make_word("HELLO")
    assert first_index(w, "L") == 3
    assert first_index(w, "H") == 1
    assert first_index(w, "Q") is None


def test_has_repeat():
    assert has_repeat(make_word("HELLO"))
    assert not has_repeat(make_word("A"))
    assert has_repeat(make_word("ABCA"))


@given(words)
def test_frequencies_sum_to_length(s):
    w = make_word(s)
    assert sum(frequency(w, c) for c in set(w.units)) == len(w)


@given(words)
def test_first_index_iff_present(s):
    w = make_word(s)
    for c in set(w.units) | {"☃"}:
        idx = first_index(w, c)
        assert (idx is not None) == (frequency(w, c) >= 1)
        if idx is not None:
            assert char_at(w, idx) == c


@given(words)
def test_has_repeat_iff_distinct_below_length(s):
    w = make_word(s)
    assert has_repeat(w) == (len(set(w.units)) < len(w))


class TestCharset:
    def test_ordered_is_sorted_by_scalar(self):
        cs = charset_from_string("bca")
        assert cs.ordered() == ("a", "b", "c")

    def test_members_deduplicated(self):
        assert len(charset_from_string("aabbcc").members) == 3

    def test_covers(self):
        cs = charset_from_string("HELO")
        assert cs.covers(make_word("HELLO"), case_fold=False)
        assert not cs.covers(make_word("WORLD"), case_fold=False)

    def test_covers_case_fold(self):
        cs = charset_from_string("helo")
        assert not cs.covers(make_word("HELLO"), case_fold=False)
        assert cs.covers(make_word("HELLO"), case_fold=True)

    def test_rejects_empty(self):
        with pytest.raises(Exception):
            Charset(frozenset())


def test_word_is_immutable():
    w = make_word("HELLO")
    with pytest.raises(Exception):
        w.raw = "OTHER"  # type: ignore[misc]
    assert isinstance(w, Word)
