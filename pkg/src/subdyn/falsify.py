"""Search for short relations among group elements.

A relation of length <= L is a product u v^-1 of two distinct reduced words
of length <= ceil(L/2) with equal images, so hashing every short word
finds it without enumerating length-L words.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Hashable, Sequence

import numpy as np


def _reduced_words(k: int, max_len: int):
    """Reduced words over letters ±1..±k, shortlex, including the empty word."""
    letters = [x for i in range(1, k + 1) for x in (i, -i)]
    level = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in level:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                u = w + (x,)
                nxt.append(u)
                yield u
        level = nxt


def _free_reduce(w):
    out = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def find_relation(gens: Sequence, max_len: int, mul: Callable, inv: Callable,
                  identity, keys: Callable[[object], Sequence[Hashable]],
                  confirm: Callable[[object], bool] | None = None):
    """A nonempty reduced word of length <= max_len mapping to the identity.

    `keys` returns hash keys for an element; equal elements must share at
    least one key.  `confirm` rechecks a candidate relator's value.
    Returns the word as a tuple of signed generator indices, or None.
    """
    half = math.ceil(max_len / 2)
    k = len(gens)
    inverses = [inv(g) for g in gens]
    values = {(): identity}
    seen: dict[Hashable, tuple] = {}
    for w in _reduced_words(k, half):
        if w:
            prev = values[w[:-1]]
            x = w[-1]
            values[w] = mul(prev, gens[x - 1] if x > 0 else inverses[-x - 1])
        val = values[w]
        for key in keys(val):
            other = seen.get(key)
            if other is not None and other != w:
                rel = _free_reduce(w + tuple(-x for x in reversed(other)))
                if rel and len(rel) <= max_len:
                    if confirm is None or confirm(_evaluate(rel, gens, inverses, mul, identity)):
                        return rel
            else:
                seen.setdefault(key, w)
    return None


def _evaluate(w, gens, inverses, mul, identity):
    out = identity
    for x in w:
        out = mul(out, gens[x - 1] if x > 0 else inverses[-x - 1])
    return out


# -- ready-made element types ---------------------------------------------------

def word_relation(elements: Sequence, max_len: int = 12):
    """Relation among free-group Words (exact)."""
    from .words import identity as word_identity

    ident = word_identity(elements[0].rank)
    return find_relation(elements, max_len, lambda a, b: a * b, lambda a: ~a, ident,
                         lambda w: (w,))


def _projective_key_exact(M):
    flat = [Fraction(x) for row in M for x in row]
    lead = next(x for x in flat if x != 0)
    return tuple(x / lead for x in flat)


def exact_matrix_relation(mats: Sequence, max_len: int = 12):
    """Relation among rational matrices modulo scalars (exact arithmetic)."""
    n = len(mats[0])
    M = [tuple(tuple(Fraction(x) for x in row) for row in A) for A in mats]

    def mul(A, B):
        return tuple(tuple(sum((A[i][k] * B[k][j] for k in range(n)), Fraction(0))
                           for j in range(n)) for i in range(n))

    def inv(A):
        from .projdyn.field import Padic  # exact Gauss-Jordan over Q

        return Padic(2).inv(A)

    ident = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    return find_relation(M, max_len, mul, inv, ident, lambda A: (_projective_key_exact(A),))


def float_matrix_relation(mats: Sequence, max_len: int = 12, digits: int = 7, tol: float = 1e-6):
    """Relation among real matrices modulo scalars (floating point).

    Matrices are scaled to unit max-entry with positive lead; two staggered
    roundings make near-equal values share a key.
    """
    mats = [np.asarray(A, dtype=float) for A in mats]
    n = mats[0].shape[0]

    def norm(A):
        m = A.flat[np.argmax(np.abs(A))]
        return A / m

    def keys(A):
        B = norm(A).ravel()
        s = 10.0 ** digits
        return (("a",) + tuple(np.round(B * s).astype(np.int64)),
                ("b",) + tuple(np.round(B * s + 0.5).astype(np.int64)))

    def confirm(A):
        B = norm(A)
        return bool(np.max(np.abs(B - B[0, 0] * np.eye(n))) < tol)

    return find_relation(mats, max_len, lambda A, B: norm(A @ B), lambda A: norm(np.linalg.inv(A)),
                         np.eye(n), keys, confirm)
