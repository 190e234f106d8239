import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subdyn import recurrence as R
from subdyn.recurrence import FiniteMPSystem


def brute_first_return(T, A, x):
    """Naive first-return time, stepping one point at a time."""
    y, m = T[x], 1
    while y not in A:
        y, m = T[y], m + 1
    return m


@st.composite
def systems(draw, max_n=20):
    n = draw(st.integers(1, max_n))
    T = draw(st.permutations(range(n)))
    A = draw(st.sets(st.integers(0, n - 1), min_size=1))
    return FiniteMPSystem.uniform(list(T)), frozenset(A)


def test_identity_tower():
    S = FiniteMPSystem.uniform([0, 1, 2, 3])
    t = R.build_tower(S, range(4))
    assert t.returns == {1: frozenset(range(4))}
    assert t.tail_masses(S) == [1, 0]
    assert R.recurrence_bound(S, {1, 2}, F(1, 3)) == 1


def test_rotation_example():
    S = FiniteMPSystem.rotation(5)
    t = R.build_tower(S, {0, 1})
    assert t.returns == {1: frozenset({0}), 4: frozenset({1})}
    assert S.mass(t.tail(S, 3)) == F(4, 5)
    assert S.mass(t.tail(S, 4)) == 0
    assert R.recurrence_bound(S, {0, 1}, F(1, 10)) == 4
    assert R.verify_bound(S, {0, 1}, 4, range(51), F(1, 10))
    assert not R.verify_bound(S, {0, 1}, 3, [1], F(1, 10))


def test_whole_space():
    S = FiniteMPSystem.uniform([2, 0, 1, 4, 3])
    assert R.recurrence_bound(S, range(5), F(1, 100)) == 1
    for n in range(1, 5):
        assert R.verify_bound(S, range(5), n, range(20), F(1, 100))


def test_errors():
    S = FiniteMPSystem.rotation(3)
    with pytest.raises(R.EmptyBaseError):
        R.build_tower(S, [])
    with pytest.raises(R.NullBaseError):
        R.recurrence_bound(S, [], F(1, 2))
    with pytest.raises(R.RecurrenceError):
        FiniteMPSystem(2, (F(1, 3), F(2, 3)), (1, 0))
    with pytest.raises(R.RecurrenceError):
        FiniteMPSystem(2, (F(1, 2), F(1, 2)), (0, 0))


def test_nonuniform_weights():
    S = FiniteMPSystem(4, (F(1, 8), F(1, 8), F(3, 8), F(3, 8)), (1, 0, 3, 2))
    assert R.recurrence_bound(S, {0, 2}, F(1, 2)) == 2
    assert R.verify_bound(S, {0, 2}, 2, range(10), F(1, 2))


@settings(max_examples=150, deadline=None)
@given(systems())
def test_tower_matches_brute(sa):
    S, A = sa
    t = R.build_tower(S, A)
    for m, V in t.returns.items():
        for x in V:
            assert brute_first_return(S.T, A, x) == m
    # column mass equals the mass of the forward orbit
    total = sum((m * S.mass(V) for m, V in t.returns.items()), F(0))
    assert total == S.mass(R.forward_orbit(S, A))
    masses = t.tail_masses(S)
    assert all(a >= b for a, b in zip(masses, masses[1:]))
    assert masses[-1] == 0


@settings(max_examples=100, deadline=None)
@given(systems(), st.fractions(F(1, 50), F(1)))
def test_bound_verifies_and_inclusion(sa, eps):
    S, A = sa
    n = R.recurrence_bound(S, A, eps)
    t = R.build_tower(S, A)
    assert S.mass(t.tail(S, n)) < eps
    assert n == 1 or S.mass(t.tail(S, n - 1)) >= eps
    assert R.verify_bound(S, A, n, range(30), eps)
    for N in range(0, 30, 3):
        assert R.inclusion_holds(S, A, n, N)
