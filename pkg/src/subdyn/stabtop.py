"""Finite certificates for the stabilizer topology on a free group.

Recurrence is certified only for finite-index subgroups: there the
conjugation orbit of a subgroup under any element is finite, so return
times are periodic.  Membership tests inside the exponent searches run on
coset permutations; every returned word is re-checked against the core
graphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from . import stallings
from .irs import conjugation_period, return_times
from .stallings import CoreGraph
from .words import Word, commutator, cyclic_reduce, generators, identity, power


class BoundExhaustedError(RuntimeError):
    pass


@dataclass(frozen=True)
class RecurrenceCertificate:
    delta: CoreGraph
    sigma: CoreGraph
    gamma: Word
    period: int
    witness: int


@dataclass(frozen=True)
class IndependenceWitness:
    elements: tuple[Word, ...]
    generated: CoreGraph
    rank_check: int


# -- coset permutations (right action, read words left to right) ----------

def _perm(G: CoreGraph, w: Word) -> tuple[int, ...]:
    return tuple(stallings.read(G, w, v) for v in range(G.num_vertices))


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Permutation of the product xy, given p = perm(x), q = perm(y)."""
    return tuple(q[p[v]] for v in range(len(p)))


def _inverse(p: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(p)
    for v, t in enumerate(p):
        out[t] = v
    return tuple(out)


def _pow(p: tuple[int, ...], n: int) -> tuple[int, ...]:
    if n < 0:
        p, n = _inverse(p), -n
    out = tuple(range(len(p)))
    base = p
    while n:
        if n & 1:
            out = _compose(out, base)
        base = _compose(base, base)
        n >>= 1
    return out


def _order(p: tuple[int, ...]) -> int:
    seen = set()
    out = 1
    for v in range(len(p)):
        if v in seen:
            continue
        k, t = 0, v
        while t not in seen:
            seen.add(t)
            t = p[t]
            k += 1
        out = out * k // math.gcd(out, k)
    return out


def _comm_perm(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    return _compose(_compose(p, q), _compose(_inverse(p), _inverse(q)))


def _require_finite_index(G: CoreGraph, what: str = "subgroup") -> None:
    if not stallings.is_complete(G):
        raise stallings.InfiniteIndexError(f"{what} {G!r} must have finite index")


def element_periods(Delta1: CoreGraph, Delta2: CoreGraph, d1: Word, d2: Word) -> tuple[int, int]:
    """Orders of d1, d2 acting on the cosets of both subgroups.

    d_i^{P_i} then lies in the normal cores of Delta1 and Delta2, so the hit
    set of the commutator search is invariant under shifting n_i by P_i.
    """
    _require_finite_index(Delta1)
    _require_finite_index(Delta2)
    P1 = math.lcm(_order(_perm(Delta1, d1)), _order(_perm(Delta2, d1)))
    P2 = math.lcm(_order(_perm(Delta1, d2)), _order(_perm(Delta2, d2)))
    return P1, P2


def recurrence_certificate(Delta: CoreGraph, Sigma: CoreGraph, gamma: Word) -> RecurrenceCertificate:
    _require_finite_index(Delta)
    period = conjugation_period(Delta, gamma)
    rt = return_times(Delta, Sigma, gamma, period)
    if not rt.hits:
        raise BoundExhaustedError("no return inside one period; return set is empty")
    return RecurrenceCertificate(Delta, Sigma, gamma, period, rt.hits[0])


def commutator_hits(Delta1: CoreGraph, Delta2: CoreGraph, d1: Word, d2: Word,
                    bound: int) -> list[tuple[int, int]]:
    """All (n1, n2) in [1, bound]^2 with [d1^n1, d2^n2] in Delta1 ∩ Delta2."""
    p1 = (_perm(Delta1, d1), _perm(Delta2, d1))
    p2 = (_perm(Delta1, d2), _perm(Delta2, d2))
    out = []
    for n1 in range(1, bound + 1):
        a = (_pow(p1[0], n1), _pow(p1[1], n1))
        for n2 in range(1, bound + 1):
            b = (_pow(p2[0], n2), _pow(p2[1], n2))
            if _comm_perm(a[0], b[0])[0] == 0 and _comm_perm(a[1], b[1])[0] == 0:
                out.append((n1, n2))
    return out


def commutator_in_intersection(Delta1: CoreGraph, Delta2: CoreGraph, d1: Word, d2: Word,
                               bound: int | None = None) -> tuple[int, int, Word]:
    """Lexicographically least (n1, n2) with [d1^n1, d2^n2] in Delta1 ∩ Delta2.

    With ``bound=None`` the search runs up to the element periods, where a hit
    is guaranteed for finite-index inputs.
    """
    if not stallings.contains(Delta1, d1) or not stallings.contains(Delta2, d2):
        raise ValueError("need d1 in Delta1 and d2 in Delta2")
    _require_finite_index(Delta1)
    _require_finite_index(Delta2)
    if bound is None:
        bound = max(element_periods(Delta1, Delta2, d1, d2))
    p1 = (_perm(Delta1, d1), _perm(Delta2, d1))
    p2 = (_perm(Delta1, d2), _perm(Delta2, d2))
    for n1 in range(1, bound + 1):
        a = (_pow(p1[0], n1), _pow(p1[1], n1))
        for n2 in range(1, bound + 1):
            b = (_pow(p2[0], n2), _pow(p2[1], n2))
            if _comm_perm(a[0], b[0])[0] == 0 and _comm_perm(a[1], b[1])[0] == 0:
                v = commutator(power(d1, n1), power(d2, n2))
                assert stallings.contains(Delta1, v) and stallings.contains(Delta2, v)
                return n1, n2, v
    raise BoundExhaustedError(f"no commutator in the intersection with exponents <= {bound}")


def _commutes(u: Word, v: Word) -> bool:
    return not commutator(u, v)


def _candidates(G: CoreGraph) -> list[Word]:
    B = stallings.basis(G)
    out = list(B)
    for x, y in itertools.product(B, repeat=2):
        if x != y:
            out.append(x * y)
    return out


def independent_tuple(deltas: Sequence[CoreGraph], power_bound: int = 6) -> IndependenceWitness:
    """One element per subgroup, jointly free of rank J.

    Picks pairwise non-commuting candidates, then the least powers (by max
    exponent, then lexicographically) whose span has rank J.
    """
    rank_ = deltas[0].rank
    chosen: list[Word] = []
    for G in deltas:
        if stallings.rank(G) < 2:
            raise ValueError(f"{G!r} is abelian; need rank >= 2")
        pick = next((c for c in _candidates(G) if all(not _commutes(c, d) for d in chosen)), None)
        if pick is None:
            raise BoundExhaustedError(f"no non-commuting candidate in {G!r}")
        chosen.append(pick)
    J = len(chosen)
    for top in range(1, power_bound + 1):
        for exps in itertools.product(range(1, top + 1), repeat=J):
            if max(exps) != top:
                continue
            elems = [power(d, n) for d, n in zip(chosen, exps)]
            H = stallings.from_generators(elems, rank_)
            if stallings.rank(H) == J:
                return IndependenceWitness(tuple(elems), H, J)
    raise BoundExhaustedError(f"no independent powers with exponents <= {power_bound}")


def axis_data(w: Word) -> tuple[Word, Word]:
    """(eta, theta) with w = eta theta eta^-1: axis passes eta, translation theta."""
    return cyclic_reduce(w)


@dataclass
class _Node:
    ambient: Word
    formal: Word  # same element written in the free basis delta_1..delta_J


def _formal_to_ambient(formal: Word, deltas: Sequence[Word]) -> Word:
    out = identity(deltas[0].rank)
    for lab in formal.letters:
        d = deltas[abs(lab) - 1]
        out = out * (d if lab > 0 else ~d)
    return out


def intersection_element(deltas: Sequence[CoreGraph], bound: int | None = None,
                         power_bound: int = 6) -> tuple[Word, dict]:
    """A nontrivial element of the intersection of finite-index subgroups.

    Follows the induction: with independent d_j in Delta_j, build w in
    Delta_1..Delta_{J-1} and u in Delta_J..Delta_2, then v = [w^n, u^m].
    Returns v and a JSON-friendly trace of every level.
    """
    J = len(deltas)
    if J == 0:
        raise ValueError("need at least one subgroup")
    for G in deltas:
        _require_finite_index(G)
        if stallings.rank(G) == 0:
            raise ValueError("subgroups must be nontrivial")
    if J == 1:
        v = stallings.basis(deltas[0])[0]
        return v, {"J": 1, "elements": [str(v)], "levels": [], "v": str(v), "form_ok": True}
    wit = independent_tuple(deltas, power_bound)
    ds = list(wit.elements)
    levels: list[dict] = []

    def build(idx: tuple[int, ...]) -> _Node:
        # idx lists positions (0-based) into deltas in the order of the induction
        if len(idx) == 1:
            k = idx[0]
            return _Node(ds[k], Word(J, (k + 1,)))
        w = build(idx[:-1])
        u = build(tuple(reversed(idx[1:])))
        D1, DJ = deltas[idx[0]], deltas[idx[-1]]
        n, m, v = commutator_in_intersection(D1, DJ, w.ambient, u.ambient, bound)
        formal = commutator(power(w.formal, n), power(u.formal, m))
        for k in idx:
            assert stallings.contains(deltas[k], v)
        levels.append({"indices": [k + 1 for k in idx], "w": _formal_str(w.formal), "u": _formal_str(u.formal),
                       "n": n, "m": m, "length": len(v)})
        return _Node(v, formal)

    top = build(tuple(range(J)))
    v = top.ambient
    assert _formal_to_ambient(top.formal, ds) == v
    f = top.formal.letters
    form_ok = bool(f) and f[0] == 1 and f[-1] == -J
    if not v:
        raise AssertionError("intersection element is trivial")
    trace = {"J": J, "elements": [str(d) for d in ds], "levels": levels,
             "v_formal": _formal_str(top.formal), "v_length": len(v), "form_ok": form_ok}
    return v, trace


def _formal_str(w: Word) -> str:
    return " ".join(f"d{abs(x)}" + ("" if x > 0 else "^-1") for x in w.letters) or "e"


def in_recurrent_subbasis(Delta: CoreGraph, H: Sequence[CoreGraph],
                          transversal_bound: int = 64) -> bool:
    """Finite check that Delta belongs to the recurrent sub-basis built from H.

    Every conjugate of Delta (one per left coset representative) must contain
    a member of H, and Delta must carry recurrence certificates for its basis
    cyclic subgroups and itself against every generator.
    """
    _require_finite_index(Delta)
    if Delta.num_vertices > transversal_bound:
        raise BoundExhaustedError(f"index {Delta.num_vertices} exceeds transversal bound")
    if not H:
        return False
    for g in stallings.coset_representatives(Delta):
        C = stallings.conjugate_subgroup(Delta, g)
        if not any(stallings.is_subgroup(T, C) for T in H):
            return False
    sigmas = [Delta] + [stallings.from_generators([b], Delta.rank) for b in stallings.basis(Delta)]
    for Sig in sigmas:
        for s in generators(Delta.rank):
            try:
                recurrence_certificate(Delta, Sig, s)
            except BoundExhaustedError:
                return False
    return True


def filter_base_check(base: Sequence[CoreGraph]) -> tuple[bool, tuple[CoreGraph, CoreGraph] | None]:
    """Every pair has a member of the base inside its intersection."""
    for D1, D2 in itertools.combinations_with_replacement(base, 2):
        I = stallings.intersect(D1, D2)
        if not any(stallings.is_subgroup(D3, I) for D3 in base):
            return False, (D1, D2)
    return True, None
