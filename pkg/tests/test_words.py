import random

import pytest
from hypothesis import given, strategies as st

from subdyn.words import (
    Word, WordError, commutator, conjugate, cyclic_reduce, enumerate_ball, format_word,
    identity, invert, is_cyclically_reduced, multiply, parse_word, power, random_word, reduce,
)


def W(s, r=2):
    return parse_word(s, r)


def naive_reduce(letters):
    # repeated scan until no cancelling pair remains
    ls = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(ls) - 1):
            if ls[i] == -ls[i + 1]:
                del ls[i:i + 2]
                changed = True
                break
    return tuple(ls)


raw_letters = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=30)


def test_reduce_examples():
    assert reduce([1, 2, -2, 1], 2) == W("aa")
    assert reduce([], 2) == identity(2)
    assert reduce([1, -1, -2, 2], 2) == identity(2)


def test_reduce_out_of_range():
    with pytest.raises(WordError):
        reduce([3], 2)
    with pytest.raises(WordError):
        Word(2, (1, -1))


def test_group_examples():
    a, b = W("a"), W("b")
    assert multiply(a, invert(a)) == identity(2)
    assert conjugate(b, a) == W("abA")
    assert invert(W("ab")) == W("BA")
    assert conjugate(b, identity(2)) == b


def test_rank_mismatch():
    with pytest.raises(WordError):
        multiply(W("a", 2), W("a", 3))


def test_cyclic_reduce_examples():
    assert cyclic_reduce(W("abA")) == (W("a"), W("b"))
    assert cyclic_reduce(W("b")) == (identity(2), W("b"))
    eta, theta = cyclic_reduce(W("aabA"))
    assert (eta, theta) == (W("a"), W("ab"))
    assert eta * theta * ~eta == W("aabA")


def test_commutator_examples():
    assert commutator(W("a"), W("b")) == W("abAB")
    assert commutator(W("a"), W("aa")) == identity(2)
    # (ab) b (ab)^-1 b^-1 = a b b B A B = a b A B
    assert commutator(W("ab"), W("b")) == reduce([1, 2, 2, -2, -1, -2], 2)
    assert commutator(W("ab"), W("b")) == W("abAB")


def test_parse_format_roundtrip():
    assert W("ab'a") == W("aBa")
    assert format_word(W("abA")) == "abA"
    assert str(identity(2)) == "e"
    assert parse_word("1", 6) == identity(6)


@given(raw_letters)
def test_reduce_matches_naive_and_idempotent(ls):
    w = reduce(ls, 3)
    assert w.letters == naive_reduce(ls)
    assert reduce(w.letters, 3) == w


@given(raw_letters, raw_letters)
def test_length_subadditive(x, y):
    u, v = reduce(x, 3), reduce(y, 3)
    assert len(u * v) <= len(u) + len(v)
    assert (u * v) * ~v == u


def test_cyclic_reduce_round_trip_random():
    rng = random.Random(0)
    for _ in range(1000):
        w = random_word(3, rng.randint(0, 12), rng)
        eta, theta = cyclic_reduce(w)
        assert eta * theta * ~eta == w
        assert is_cyclically_reduced(theta)
        assert (not theta) == (not w)


def test_power():
    rng = random.Random(1)
    for _ in range(200):
        w = random_word(2, rng.randint(0, 6), rng)
        n = rng.randint(-4, 4)
        expected = identity(2)
        for _ in range(abs(n)):
            expected = expected * (w if n > 0 else ~w)
        assert power(w, n) == expected


def test_enumerate_ball_counts():
    # 1 + 4 + 12 + 36 reduced words in F_2 of length <= 3
    assert len(enumerate_ball(2, 3)) == 1 + 4 + 12 + 36
    assert len(set(enumerate_ball(2, 3))) == 53
