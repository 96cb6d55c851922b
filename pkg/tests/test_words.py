"""Word structure over {t, s0..sn}: order shape, cones, parsing."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relic import words as W


def all_words(n, length):
    return list(W.words_up_to(n, length))


# one-step rewrites, transcribed independently of the implementation

def covers(n, a):
    if not a:
        return set()
    head, last = a[:-1], a[-1]
    if last == "s0":
        return {head + (f"s{n}",), head + ("s1", "t")}
    if last.startswith("s") and last != f"s{n}":
        i = int(last[1:])
        return {head + (f"s{i + 1}", "t")}
    return set()


def leq_oracle(n, a, b):
    return a == b or b in covers(n, a)


class TestOrder:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_one_step_rewrite_oracle(self, n):
        ws = all_words(n, 3)
        for a in ws:
            for b in ws:
                assert W.an_leq(n, a, b) == leq_oracle(n, a, b), (a, b)

    @pytest.mark.parametrize("n", [1, 3, 5])
    def test_partial_order_no_three_chains(self, n):
        ws = all_words(n, 3)
        strict = [(a, b) for a in ws for b in ws if W.an_lt(n, a, b)]
        for a, b in strict:
            assert a != b
            assert not W.an_lt(n, b, a)
        below = {}
        for a, b in strict:
            below.setdefault(b, set()).add(a)
        # nothing strictly below a strict lower bound: chains stop at length 2
        for a, b in strict:
            assert not below.get(a), (a, b)

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_unique_predecessor(self, n):
        ws = all_words(n, 4)
        under = {}
        for a in ws:
            for b in W.successors(n, a):
                under.setdefault(b, []).append(a)
        for b, lows in under.items():
            assert len(lows) == 1
            assert W.predecessor(n, b) == lows[0]
        for b in ws:
            p = W.predecessor(n, b)
            if p is not None:
                assert W.an_lt(n, p, b)

    @pytest.mark.parametrize("n", [1, 3, 5])
    def test_prefix_extension_never_goes_up(self, n):
        # a word followed by more letters is never above the original:
        # the whole order lives in the last letter
        for a in all_words(n, 2):
            for b in all_words(n, 2):
                if b:
                    assert not W.an_leq(n, a, a + b), (a, b)

    @pytest.mark.parametrize("n", [2, 4])
    def test_left_concat_monotone_right_not(self, n):
        ws = all_words(n, 2)
        pairs = [(a, b) for a in ws for b in ws if W.an_lt(n, a, b)]
        ctx = [("t",), ("s0",), (f"s{n}", "t")]
        for a, b in pairs:
            for c in ctx:
                assert W.an_leq(n, c + a, c + b), (c, a, b)
        # appending destroys every strict step
        for a, b in pairs:
            for c in ctx:
                assert not W.an_leq(n, a + c, b + c), (a, b, c)


class TestCones:
    def test_upclosure_examples(self):
        assert W.an_upclose(3, ("s0",)) == {("s0",), ("s3",), ("s1", "t")}
        assert W.an_upclose(3, ("s3",)) == {("s3",)}
        assert W.an_upclose(3, ("s1",)) == {("s1",), ("s2", "t")}
        assert W.an_upclose(3, ("t",)) == {("t",)}
        assert W.an_upclose(3, ("s2", "t")) == {("s2", "t")}
        assert W.an_upclose(2, W.EMPTY) == {W.EMPTY}

    @pytest.mark.parametrize("n", [1, 3, 5])
    def test_upclosure_small_and_consistent(self, n):
        ws = all_words(n, 4)
        for a in ws:
            cone = W.an_upclose(n, a)
            assert a in cone
            assert len(cone) <= 3
            for b in cone:
                assert W.an_leq(n, a, b)

    def test_minimal_generators_drop_dominated(self):
        gens = W.minimal_generators(3, {("s0",), ("s3",), ("s1", "t")})
        assert gens == {("s0",)}
        gens = W.minimal_generators(3, {("s1",), ("s3",)})
        assert gens == {("s1",), ("s3",)}

    def test_upclose_set_unions_cones(self):
        got = W.upclose_set(3, [("s0",), ("s1",)])
        assert got == W.an_upclose(3, ("s0",)) | W.an_upclose(3, ("s1",))


class TestText:
    def test_format_empty_mark(self):
        assert W.format_word(W.EMPTY) == W.EMPTY_MARK == "^"
        assert W.parse_word(4, "^") == W.EMPTY
        assert W.parse_word(4, "") == W.EMPTY

    @pytest.mark.parametrize("text", ["t", "s0", "s12", "s0ts1", "ts3t"])
    def test_round_trip(self, text):
        w = W.parse_word(12, text)
        assert W.format_word(w) == text
        assert W.check_word(12, w) == w

    def test_parse_errors(self):
        with pytest.raises(ValueError, match="bad character 's9'"):
            W.parse_word(3, "s9")
        with pytest.raises(ValueError, match="bad word 'x' at offset 0"):
            W.parse_word(3, "x")
        with pytest.raises(ValueError, match="bad character"):
            W.check_word(3, ("s9",))

    def test_alphabet(self):
        assert W.alphabet(2) == ("t", "s0", "s1", "s2")

    @given(st.integers(1, 6), st.data())
    @settings(max_examples=120, deadline=None)
    def test_round_trip_generated(self, n, data):
        letters = list(W.alphabet(n))
        w = tuple(data.draw(st.lists(st.sampled_from(letters), max_size=5)))
        assert W.parse_word(n, W.format_word(w)) == w


class TestCounts:
    def test_word_counts(self):
        # (n+2)^0 + ... + (n+2)^k words of length <= k
        assert len(all_words(3, 2)) == 1 + 5 + 25
        assert len(all_words(5, 4)) == sum(7 ** i for i in range(5))

    def test_generation_is_sorted_and_unique(self):
        ws = all_words(2, 3)
        assert len(set(ws)) == len(ws)
