"""Kakutani-Rokhlin towers and uniform return bounds on finite systems.

A system is a permutation T of {0, ..., N-1} with invariant rational
weights.  All masses are exact Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class RecurrenceError(ValueError):
    pass


class EmptyBaseError(RecurrenceError):
    pass


class NullBaseError(RecurrenceError):
    pass


@dataclass(frozen=True)
class FiniteMPSystem:
    n: int
    weights: tuple[Fraction, ...]
    T: tuple[int, ...]

    def __post_init__(self):
        if len(self.weights) != self.n or len(self.T) != self.n:
            raise RecurrenceError("weights and T must have length n")
        if sorted(self.T) != list(range(self.n)):
            raise RecurrenceError("T is not a permutation of 0..n-1")
        if any(w <= 0 for w in self.weights) or sum(self.weights) != 1:
            raise RecurrenceError("weights must be positive and sum to 1")
        if any(self.weights[self.T[x]] != self.weights[x] for x in range(self.n)):
            raise RecurrenceError("weights are not T-invariant")

    @classmethod
    def uniform(cls, T: Sequence[int]) -> "FiniteMPSystem":
        n = len(T)
        return cls(n, tuple(Fraction(1, n) for _ in range(n)), tuple(T))

    @classmethod
    def rotation(cls, n: int, step: int = 1) -> "FiniteMPSystem":
        return cls.uniform([(x + step) % n for x in range(n)])

    def mass(self, pts: Iterable[int]) -> Fraction:
        return sum((self.weights[x] for x in set(pts)), Fraction(0))

    def image(self, pts: Iterable[int], i: int) -> frozenset[int]:
        """T^i applied to a set; negative i uses the inverse."""
        f = self.T if i >= 0 else self.inverse
        out = set(pts)
        for _ in range(abs(i)):
            out = {f[x] for x in out}
        return frozenset(out)

    @property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for x, y in enumerate(self.T):
            inv[y] = x
        return tuple(inv)


@dataclass(frozen=True)
class Tower:
    base: frozenset[int]
    returns: dict[int, frozenset[int]]  # first-return time m -> V_m
    height: int                          # largest first-return time

    def tail(self, S: FiniteMPSystem, m: int) -> frozenset[int]:
        """Every level of every column whose height exceeds m."""
        out: set[int] = set()
        for k, V in self.returns.items():
            if k > m:
                for i in range(k):
                    out |= S.image(V, i)
        return frozenset(out)

    def tail_masses(self, S: FiniteMPSystem) -> list[Fraction]:
        return [S.mass(self.tail(S, m)) for m in range(self.height + 1)]


def _as_set(S: FiniteMPSystem, A: Iterable[int]) -> frozenset[int]:
    A = frozenset(A)
    if any(not 0 <= x < S.n for x in A):
        raise RecurrenceError("base contains points outside the system")
    return A


def build_tower(S: FiniteMPSystem, A: Iterable[int]) -> Tower:
    A = _as_set(S, A)
    if not A:
        raise EmptyBaseError("base set is empty")
    returns: dict[int, set[int]] = {}
    for x in A:
        m, y = 1, S.T[x]
        while y not in A:
            y = S.T[y]
            m += 1
        returns.setdefault(m, set()).add(x)
    tower = Tower(A, {m: frozenset(V) for m, V in sorted(returns.items())}, max(returns))
    _check_tower(S, tower)
    return tower


def _check_tower(S: FiniteMPSystem, tower: Tower) -> None:
    seen: set[int] = set()
    for V in tower.returns.values():
        assert not (seen & V)
        seen |= V
    assert seen == tower.base
    levels: set[int] = set()
    count = 0
    for m, V in tower.returns.items():
        for i in range(m):
            L = S.image(V, i)
            count += len(L)
            levels |= L
    assert count == len(levels), "tower levels overlap"
    assert levels == forward_orbit(S, tower.base)


def forward_orbit(S: FiniteMPSystem, A: Iterable[int]) -> frozenset[int]:
    out = set(A)
    frontier = list(out)
    while frontier:
        y = S.T[frontier.pop()]
        if y not in out:
            out.add(y)
            frontier.append(y)
    return frozenset(out)


def recurrence_bound(S: FiniteMPSystem, A: Iterable[int], eps: Fraction) -> int:
    """Least n >= 1 with mu(Tail(n)) < eps."""
    A = _as_set(S, A)
    eps = Fraction(eps)
    if eps <= 0:
        raise RecurrenceError("eps must be positive")
    if S.mass(A) == 0:
        raise NullBaseError("base set has measure zero")
    tower = build_tower(S, A)
    n = 1
    while S.mass(tower.tail(S, n)) >= eps:
        n += 1
    return n


def uncovered(S: FiniteMPSystem, A: Iterable[int], n: int, N: int) -> frozenset[int]:
    """A minus the union of T^i A for N <= i < N + n."""
    A = frozenset(A)
    cover: set[int] = set()
    cur = S.image(A, N)
    for _ in range(n):
        cover |= cur
        cur = S.image(cur, 1)
    return A - cover


def verify_bound(S: FiniteMPSystem, A: Iterable[int], n: int, N_range: Iterable[int],
                 eps: Fraction) -> bool:
    """mu(A minus the union of T^i A, N <= i < N + n) < eps for every N in range."""
    A = _as_set(S, A)
    eps = Fraction(eps)
    return all(S.mass(uncovered(S, A, n, N)) < eps for N in N_range)


def inclusion_holds(S: FiniteMPSystem, A: Iterable[int], n: int, N: int) -> bool:
    """The uncovered part of A sits inside T^N(Tail(n)).

    An uncovered x has T^-N x at tower level >= n, hence in a column of
    height > n.
    """
    tower = build_tower(S, A)
    return uncovered(S, A, n, N) <= S.image(tower.tail(S, n), N)
