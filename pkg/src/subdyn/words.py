"""Reduced words in the free group F_r.

Letters are nonzero integers: ``i`` is the i-th generator and ``-i`` its
inverse, with ``1 <= i <= r``.  Printable syntax uses ``a..z`` for generators
and the uppercase letter (or a trailing ``'``) for inverses.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from typing import Iterable, Sequence

LOWER = string.ascii_lowercase


class WordError(ValueError):
    pass


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True, order=True)
class Word:
    rank: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise WordError(f"rank must be positive, got {self.rank}")
        for x in self.letters:
            if x == 0 or abs(x) > self.rank:
                raise WordError(f"generator index {x} out of range for rank {self.rank}")
        for x, y in zip(self.letters, self.letters[1:]):
            if x == -y:
                raise WordError("letters are not freely reduced; use reduce()")

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        # identity is falsy so `if w:` reads as "w != e"
        return bool(self.letters)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({self.rank}, {format_word(self)!r})"

    def __mul__(self, other: Word) -> Word:
        return multiply(self, other)

    def __invert__(self) -> Word:
        return invert(self)

    def __pow__(self, n: int) -> Word:
        return power(self, n)


def identity(rank: int) -> Word:
    return Word(rank, ())


def generators(rank: int) -> list[Word]:
    return [Word(rank, (i,)) for i in range(1, rank + 1)]


def reduce(letters: Sequence[int], rank: int) -> Word:
    """Freely reduce a raw letter sequence."""
    for x in letters:
        if x == 0 or abs(x) > rank:
            raise WordError(f"generator index {x} out of range for rank {rank}")
    return Word(rank, _free_reduce(letters))


def _check_rank(u: Word, v: Word) -> None:
    if u.rank != v.rank:
        raise WordError(f"rank mismatch: {u.rank} vs {v.rank}")


def multiply(u: Word, v: Word) -> Word:
    _check_rank(u, v)
    a, b = list(u.letters), v.letters
    k = 0
    while a and k < len(b) and a[-1] == -b[k]:
        a.pop()
        k += 1
    return Word(u.rank, tuple(a) + b[k:])


def invert(u: Word) -> Word:
    return Word(u.rank, tuple(-x for x in reversed(u.letters)))


def power(u: Word, n: int) -> Word:
    if n < 0:
        u, n = invert(u), -n
    eta, theta = cyclic_reduce(u)
    # theta cyclically reduced, so theta^n needs no cancellation
    core = Word(u.rank, theta.letters * n)
    return multiply(multiply(eta, core), invert(eta))


def conjugate(u: Word, g: Word) -> Word:
    """Return g u g^-1."""
    return multiply(multiply(g, u), invert(g))


def commutator(u: Word, v: Word) -> Word:
    """Return u v u^-1 v^-1."""
    _check_rank(u, v)
    return multiply(multiply(u, v), multiply(invert(u), invert(v)))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w = eta * theta * eta^-1`` with ``theta`` cyclically reduced."""
    ls = w.letters
    k = 0
    while 2 * k + 1 < len(ls) and ls[k] == -ls[len(ls) - 1 - k]:
        k += 1
    return Word(w.rank, ls[:k]), Word(w.rank, ls[k:len(ls) - k])


def is_cyclically_reduced(w: Word) -> bool:
    return len(w) < 2 or w.letters[0] != -w.letters[-1]


def parse_word(text: str, rank: int) -> Word:
    """Parse ``abA`` / ``ab a'`` style syntax; ``e``, ``1`` and ``""`` mean identity.

    With rank >= 5 the letter ``e`` is a generator, so only ``1`` or the empty
    string denote the identity there.
    """
    if rank > 26:
        raise WordError("printable syntax supports rank <= 26")
    s = text.replace(" ", "").replace("*", "")
    if s in ("", "1") or (s == "e" and rank < 5):
        return identity(rank)
    raw: list[int] = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch.lower() not in LOWER:
            raise WordError(f"unexpected character {ch!r} in {text!r}")
        idx = LOWER.index(ch.lower()) + 1
        sign = -1 if ch.isupper() else 1
        i += 1
        if i < len(s) and s[i] == "'":
            sign = -sign
            i += 1
        raw.append(sign * idx)
    return reduce(raw, rank)


def format_word(w: Word) -> str:
    if not w.letters:
        return "e" if w.rank < 5 else "1"
    if w.rank > 26:
        return " ".join(str(x) for x in w.letters)
    return "".join(LOWER[x - 1] if x > 0 else LOWER[-x - 1].upper() for x in w.letters)


def enumerate_ball(rank: int, radius: int) -> list[Word]:
    """All reduced words of length <= radius, in shortlex order."""
    letters = [i for k in range(1, rank + 1) for i in (k, -k)]
    out = [identity(rank)]
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(radius):
        nxt = []
        for t in frontier:
            for x in letters:
                if t and t[-1] == -x:
                    continue
                nxt.append(t + (x,))
        out.extend(Word(rank, t) for t in nxt)
        frontier = nxt
    return out


def random_word(rank: int, length: int, rng: random.Random) -> Word:
    """Uniform-ish random reduced word of exactly the given length."""
    out: list[int] = []
    while len(out) < length:
        x = rng.choice([1, -1]) * rng.randint(1, rank)
        if out and out[-1] == -x:
            continue
        out.append(x)
    return Word(rank, tuple(out))
