import pytest
from hypothesis import given, strategies as st

from bernlab.groups import (
    FreeGroup,
    GroupError,
    Integers,
    Word,
    ball,
    descending_sign_changes,
    e_class,
    format_element,
    inv,
    mul,
    parse_element,
    pi_a,
    pi_b,
    reduce_letters,
    sphere,
    w_class,
    word_length,
)

F2 = FreeGroup(2)
Z = Integers()


def w(text):
    return parse_element(F2, text)


class TestReduction:
    def test_cancellation(self):
        assert mul(w("a"), w("a^-1")) == w("e")
        assert mul(w("a b"), w("b^-1 a")) == w("a^2")

    def test_parse_format_roundtrip(self):
        for text in ("e", "a", "a b^-1 a^2", "b^-3 a b"):
            assert format_element(w(text)) == text if text != "e" else True
            assert parse_element(F2, format_element(w(text))) == w(text)

    def test_unreduced_word_rejected(self):
        with pytest.raises(GroupError):
            Word(2, ((1, 1), (1, 2)))
        with pytest.raises(GroupError):
            Word(2, ((1, 0),))

    @given(st.lists(st.tuples(st.integers(1, 2), st.sampled_from([1, -1])),
                    max_size=30))
    def test_reduce_idempotent(self, letters):
        word = reduce_letters(letters, 2)
        relet = [(g, 1 if e > 0 else -1)
                 for g, e in word.syls for _ in range(abs(e))]
        assert reduce_letters(relet, 2) == word

    @given(st.lists(st.tuples(st.integers(1, 2), st.sampled_from([1, -1])),
                    max_size=20),
           st.lists(st.tuples(st.integers(1, 2), st.sampled_from([1, -1])),
                    max_size=20))
    def test_mul_inv_identity(self, la, lb):
        g, h = reduce_letters(la, 2), reduce_letters(lb, 2)
        assert mul(g, inv(g)) == Word(2, ())
        assert inv(mul(g, h)) == mul(inv(h), inv(g))


class TestEnumeration:
    def test_sphere_cardinality(self):
        # |S_n| = 4 * 3^(n-1) in F2
        for n in range(1, 7):
            assert len(list(sphere(F2, n))) == 4 * 3 ** (n - 1)
        assert list(sphere(F2, 0)) == [Word(2, ())]

    def test_sphere_distinct_and_correct_length(self):
        for n in range(5):
            elems = list(sphere(F2, n))
            assert len(set(elems)) == len(elems)
            assert all(word_length(g) == n for g in elems)

    def test_ball_count(self):
        assert len(list(ball(F2, 5))) == 1 + sum(4 * 3 ** (n - 1)
                                                 for n in range(1, 6))

    def test_integers(self):
        assert sorted(ball(Z, 3)) == [-3, -2, -1, 0, 1, 2, 3]
        assert mul(4, -7) == -3 and inv(5) == -5 and word_length(-9) == 9


class TestClasses:
    def test_w_class(self):
        assert w_class(w("e")) == "W"
        assert w_class(w("a")) == "W_a"
        assert w_class(w("b a^-1")) == "W"
        assert w_class(w("a b^2")) == "W_b"

    def test_e_class_projections(self):
        assert e_class(w("e")) == "e"
        assert e_class(w("b a^-3")) == "E_a"
        assert pi_a(w("b a^-3")) == -3
        assert pi_b(w("a b^2")) == 2
        with pytest.raises(GroupError):
            pi_a(w("b"))

    def test_descending_sign_changes(self):
        # only (positive, negative) adjacent exponent pairs count
        assert descending_sign_changes(w("a b^-1")) == 1
        assert descending_sign_changes(w("a^-1 b")) == 0
        assert descending_sign_changes(w("a b^-1 a")) == 1
        assert descending_sign_changes(w("a b a b")) == 0
        assert descending_sign_changes(w("a b^-1 a b^-1")) == 2
        assert descending_sign_changes(w("e")) == 0
