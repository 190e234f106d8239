"""Radius-truncated Chabauty topology on Sub(F_r)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from fractions import Fraction
from typing import Iterable

from . import stallings
from .stallings import CoreGraph
from .words import Word


@dataclass(frozen=True)
class BallSignature:
    radius: int
    words: tuple[Word, ...]

    @cached_property
    def members(self) -> frozenset[Word]:
        return frozenset(self.words)

    def __contains__(self, w: Word) -> bool:
        return w in self.members


@lru_cache(maxsize=4096)
def ball_signature(G: CoreGraph, radius: int) -> BallSignature:
    """All reduced words of length <= radius lying in G, shortlex sorted."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    rows = [dict(r) for r in G.table]
    found: list[tuple[int, ...]] = []
    # a word in G is a closed path, so only paths inside the graph need visiting
    stack: list[tuple[tuple[int, ...], int]] = [((), 0)]
    while stack:
        letters, v = stack.pop()
        if v == 0:
            found.append(letters)
        if len(letters) == radius:
            continue
        for lab, t in rows[v].items():
            if letters and letters[-1] == -lab:
                continue
            stack.append((letters + (lab,), t))
    found.sort(key=lambda t: (len(t), [_lex(x) for x in t]))
    return BallSignature(radius, tuple(Word(G.rank, t) for t in found))


def _lex(x: int) -> tuple[int, int]:
    return (abs(x), 0 if x > 0 else 1)


def in_basic_open(D: CoreGraph, C: CoreGraph, M: Iterable[Word]) -> bool:
    """True iff D and C agree on every element of M."""
    if D.rank != C.rank:
        raise ValueError("rank mismatch")
    return all(stallings.contains(D, w) == stallings.contains(C, w) for w in M)


def env_contains(D: CoreGraph, Sigma: CoreGraph) -> bool:
    """D lies in the envelope of Sigma, i.e. Sigma <= D."""
    return stallings.is_subgroup(Sigma, D)


def chabauty_dist(G1: CoreGraph, G2: CoreGraph, rmax: int) -> Fraction:
    """2^-R for the least radius R where the balls differ; 0 if none up to rmax.

    A returned 0 only means the distance is at most 2^-rmax.
    """
    if rmax < 1:
        raise ValueError("rmax must be >= 1")
    s1 = ball_signature(G1, rmax).words
    s2 = set(ball_signature(G2, rmax).words)
    diff = set(s1).symmetric_difference(s2)
    if not diff:
        return Fraction(0)
    return Fraction(1, 2 ** min(len(w) for w in diff))
