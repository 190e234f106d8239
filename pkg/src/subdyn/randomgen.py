"""Seeded random instances: words, subgroups, finite actions."""

from __future__ import annotations

import random
from fractions import Fraction

from . import stallings
from .words import Word, random_word


def random_subgroup(rank: int, rng: random.Random, max_gens: int = 3,
                    max_len: int = 6) -> stallings.CoreGraph:
    k = rng.randint(1, max_gens)
    gens = [random_word(rank, rng.randint(1, max_len), rng) for _ in range(k)]
    return stallings.from_generators(gens, rank)


def random_permutation(n: int, rng: random.Random) -> list[int]:
    p = list(range(1, n + 1))
    rng.shuffle(p)
    return p


def is_transitive(perms: list[list[int]]) -> bool:
    n = len(perms[0])
    seen = {1}
    stack = [1]
    while stack:
        x = stack.pop()
        for p in perms:
            y = p[x - 1]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def random_transitive_perms(rank: int, n: int, rng: random.Random) -> list[list[int]]:
    while True:
        perms = [random_permutation(n, rng) for _ in range(rank)]
        if is_transitive(perms):
            return perms


def random_finite_index(rank: int, rng: random.Random, max_index: int = 12,
                        min_index: int = 1) -> stallings.CoreGraph:
    """Point stabilizer of a random transitive permutation action."""
    n = rng.randint(min_index, max_index)
    return stallings.from_permutations(rank, random_transitive_perms(rank, n, rng), 1)


def random_element(G: stallings.CoreGraph, rng: random.Random, max_factors: int = 3) -> Word:
    """Random nontrivial product of basis elements of G (G nontrivial)."""
    basis = stallings.basis(G)
    if not basis:
        raise ValueError("trivial subgroup has no nontrivial elements")
    while True:
        w = Word(G.rank, ())
        for _ in range(rng.randint(1, max_factors)):
            b = rng.choice(basis)
            w = w * (b if rng.random() < 0.5 else ~b)
        if w:
            return w


def random_uniform_action(rank: int, n: int, rng: random.Random):
    """Random permutations on n points with uniform weights."""
    from .irs import FiniteAction
    perms = tuple(tuple(random_permutation(n, rng)) for _ in range(rank))
    return FiniteAction(rank, n, tuple(Fraction(1, n) for _ in range(n)), perms)
