"""Finitely supported invariant random subgroups of F_r.

An ``AtomicIRS`` is a finite list of subgroups with positive rational
weights summing to one.  Atoms are kept in canonical core-graph form, so
two atoms are the same subgroup exactly when their keys agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import stallings
from .chabauty import ball_signature, env_contains
from .stallings import CoreGraph
from .words import Word, enumerate_ball, generators, identity


class IRSError(ValueError):
    pass


class NotNormalError(IRSError):
    pass


class NotAlmostNormalError(IRSError):
    pass


class AtomNotInSigmaError(IRSError):
    pass


class NullEventError(IRSError):
    pass


class NotInvariantEventError(IRSError):
    pass


class InvarianceError(IRSError):
    pass


@dataclass(frozen=True)
class FiniteAction:
    """Left action of F_r on points 1..n by permutations.

    ``perms[i][k-1]`` is the image of point ``k`` under generator ``i+1``.
    """

    rank: int
    n: int
    weights: tuple[Fraction, ...]
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.perms) != self.rank:
            raise IRSError(f"need {self.rank} permutations, got {len(self.perms)}")
        if len(self.weights) != self.n:
            raise IRSError("one weight per point required")
        for p in self.perms:
            if sorted(p) != list(range(1, self.n + 1)):
                raise IRSError(f"not a permutation of 1..{self.n}: {p}")
        if any(w <= 0 for w in self.weights) or sum(self.weights) != 1:
            raise IRSError("weights must be positive and sum to 1")
        for p in self.perms:
            for x in range(self.n):
                if self.weights[p[x] - 1] != self.weights[x]:
                    raise IRSError("permutations must preserve the weights")

    def act(self, w: Word, x: int) -> int:
        """Image of point x under the group element w."""
        for lab in reversed(w.letters):
            p = self.perms[abs(lab) - 1]
            x = p[x - 1] if lab > 0 else p.index(x) + 1
        return x


def _aggregate(pairs: Iterable[tuple[CoreGraph, Fraction]]) -> tuple[tuple[CoreGraph, Fraction], ...]:
    acc: dict = {}
    graphs: dict = {}
    for G, w in pairs:
        if w == 0:
            continue
        k = G.key()
        graphs.setdefault(k, G)
        acc[k] = acc.get(k, Fraction(0)) + w
    return tuple(sorted(((graphs[k], acc[k]) for k in acc), key=lambda t: (t[0].num_vertices, t[0].key())))


@dataclass(frozen=True)
class AtomicIRS:
    rank: int
    atoms: tuple[tuple[CoreGraph, Fraction], ...] = field(default=())

    @classmethod
    def from_pairs(cls, rank: int, pairs: Iterable[tuple[CoreGraph, Fraction]]) -> AtomicIRS:
        pairs = list(pairs)
        for G, w in pairs:
            if G.rank != rank:
                raise IRSError("atom rank mismatch")
            if w < 0:
                raise IRSError("negative weight")
        mu = cls(rank, _aggregate(pairs))
        if sum(w for _, w in mu.atoms) != 1:
            raise IRSError("weights must sum to 1")
        return mu

    def weight(self, G: CoreGraph) -> Fraction:
        k = G.key()
        for A, w in self.atoms:
            if A.key() == k:
                return w
        return Fraction(0)

    def __len__(self) -> int:
        return len(self.atoms)

    def same_as(self, other: AtomicIRS) -> bool:
        return self.rank == other.rank and [(G.key(), w) for G, w in self.atoms] == \
            [(G.key(), w) for G, w in other.atoms]


def is_invariant(mu: AtomicIRS, gens: Sequence[Word] | None = None) -> bool:
    """Exact check that conjugating by each of ``gens`` preserves every weight."""
    if gens is None:
        gens = generators(mu.rank)
    for s in gens:
        for G, w in mu.atoms:
            if mu.weight(stallings.conjugate_subgroup(G, s)) != w:
                return False
    return True


def _certify(mu: AtomicIRS, gens: Sequence[Word] | None = None) -> AtomicIRS:
    if not is_invariant(mu, gens):
        raise InvarianceError("result failed the conjugation-invariance check")
    return mu


def stabilizer_irs(A: FiniteAction) -> AtomicIRS:
    """Push-forward of the point measure under x -> stabilizer of x."""
    pairs = [(stallings.from_permutations(A.rank, A.perms, x), A.weights[x - 1])
             for x in range(1, A.n + 1)]
    return _certify(AtomicIRS.from_pairs(A.rank, pairs))


def dirac(G: CoreGraph) -> AtomicIRS:
    return AtomicIRS.from_pairs(G.rank, [(G, Fraction(1))])


def dirac_normal(N: CoreGraph) -> AtomicIRS:
    if not stallings.is_normal(N):
        raise NotNormalError(f"{N!r} is not normal")
    return dirac(N)


def _normalizer_search(H: CoreGraph, radius: int) -> CoreGraph:
    found = [g for g in enumerate_ball(H.rank, radius)
             if g and stallings.equal(stallings.conjugate_subgroup(H, g), H)]
    return stallings.from_generators(found, H.rank)


def almost_normal_irs(H: CoreGraph, search_radius: int = 4) -> AtomicIRS:
    """Uniform measure on the conjugates of H.

    The conjugate set is certified finite either by ``index(H) < inf`` or by a
    finite-index normalizer subgroup found among words of length <= search_radius.
    """
    if stallings.is_complete(H):
        N = H
    else:
        N = _normalizer_search(H, search_radius)
        if not stallings.is_complete(N):
            raise NotAlmostNormalError(
                f"no finite-index normalizer found for {H!r} within radius {search_radius}")
    conj = {}
    for g in stallings.coset_representatives(N):
        C = stallings.conjugate_subgroup(H, g)
        conj.setdefault(C.key(), C)
    k = len(conj)
    return _certify(AtomicIRS.from_pairs(H.rank, [(C, Fraction(1, k)) for C in conj.values()]))


def restrict(mu: AtomicIRS, Sigma: CoreGraph) -> AtomicIRS:
    """Law of Delta ∩ Sigma; invariant under conjugation by Sigma."""
    out = AtomicIRS.from_pairs(mu.rank, [(stallings.intersect(G, Sigma), w) for G, w in mu.atoms])
    return _certify(out, stallings.basis(Sigma))


def induce(mu: AtomicIRS, Sigma: CoreGraph) -> AtomicIRS:
    """Average of the push-forwards of mu by left coset representatives of Sigma."""
    if not stallings.is_complete(Sigma):
        raise stallings.InfiniteIndexError("induction needs a finite-index subgroup")
    for G, _ in mu.atoms:
        if not stallings.is_subgroup(G, Sigma):
            raise AtomNotInSigmaError(f"atom {G!r} is not contained in {Sigma!r}")
    if not is_invariant(mu, stallings.basis(Sigma)):
        raise InvarianceError("input is not invariant under Sigma")
    reps = stallings.coset_representatives(Sigma)
    n = len(reps)
    pairs = [(stallings.conjugate_subgroup(G, g), w / n) for g in reps for G, w in mu.atoms]
    return _certify(AtomicIRS.from_pairs(mu.rank, pairs))


def intersect_irs(mu1: AtomicIRS, mu2: AtomicIRS) -> AtomicIRS:
    if mu1.rank != mu2.rank:
        raise IRSError("rank mismatch")
    pairs = [(stallings.intersect(G1, G2), w1 * w2) for G1, w1 in mu1.atoms for G2, w2 in mu2.atoms]
    return _certify(AtomicIRS.from_pairs(mu1.rank, pairs))


def env_measure(mu: AtomicIRS, Sigma: CoreGraph) -> Fraction:
    """mu-probability that a random subgroup contains Sigma."""
    return sum((w for G, w in mu.atoms if env_contains(G, Sigma)), Fraction(0))


def is_essential(mu: AtomicIRS, Sigma: CoreGraph) -> bool:
    return env_measure(mu, Sigma) > 0


def check_locally_essential(mu: AtomicIRS, Delta: CoreGraph, radius: int,
                            k: int) -> tuple[bool, CoreGraph | None]:
    """Falsifier: test every subgroup spanned by <= k words of Delta's radius ball.

    Returns ``(True, None)`` when all of them are essential, else ``(False, witness)``.
    Atoms of ``mu`` always pass, since each of their subgroups sits inside the atom.
    """
    words = [w for w in ball_signature(Delta, radius).words if w]
    # w and w^-1 span the same subgroup
    reps = sorted({min(w, ~w) for w in words})
    seen = set()
    for size in range(1, k + 1):
        for combo in itertools.combinations(reps, size):
            S = stallings.from_generators(list(combo), mu.rank)
            if S.key() in seen:
                continue
            seen.add(S.key())
            if env_measure(mu, S) == 0:
                return False, S
    return True, None


@dataclass(frozen=True)
class ReturnTimes:
    delta: CoreGraph
    sigma: CoreGraph
    gamma: Word
    hits: tuple[int, ...]
    period: int | None = None
    recurrent: bool | None = None


def conjugation_period(Delta: CoreGraph, gamma: Word, limit: int | None = None) -> int | None:
    """Least P >= 1 with gamma^P Delta gamma^-P = Delta (finite-index Delta only)."""
    if not stallings.is_complete(Delta):
        return None
    limit = limit or Delta.num_vertices * 1000
    cur = Delta
    for P in range(1, limit + 1):
        cur = stallings.conjugate_subgroup(cur, gamma)
        if cur.key() == Delta.key():
            return P
    return None


def return_times(Delta: CoreGraph, Sigma: CoreGraph, gamma: Word, cutoff: int) -> ReturnTimes:
    """Times n in 1..cutoff with gamma^-n Sigma gamma^n <= Delta.

    For finite-index Delta the hit set is periodic with the conjugation period
    of Delta under gamma, so it is infinite iff some n <= period is a hit.
    """
    period = conjugation_period(Delta, gamma)
    horizon = max(cutoff, period or 0)
    hits = []
    cur = Sigma
    inv = ~gamma
    for n in range(1, horizon + 1):
        cur = stallings.conjugate_subgroup(cur, inv)
        if stallings.is_subgroup(cur, Delta):
            hits.append(n)
    recurrent = None if period is None else any(n <= period for n in hits)
    return ReturnTimes(Delta, Sigma, gamma, tuple(n for n in hits if n <= cutoff), period, recurrent)


def check_cover(mu: AtomicIRS, family: Sequence[CoreGraph]) -> tuple[bool, CoreGraph | None]:
    """Every atom contains some member of the family."""
    for G, _ in mu.atoms:
        if not any(env_contains(G, S) for S in family):
            return False, G
    return True, None


def check_refinement(F: Sequence[CoreGraph], H: Sequence[CoreGraph],
                     mu: AtomicIRS) -> tuple[bool, tuple[CoreGraph, CoreGraph] | None]:
    """For each Sigma in F and atom Delta >= Sigma, some Theta in H has Sigma <= Theta <= Delta."""
    for Sig in F:
        for D, _ in mu.atoms:
            if not env_contains(D, Sig):
                continue
            if not any(env_contains(T, Sig) and env_contains(D, T) for T in H):
                return False, (Sig, D)
    return True, None


def condition(mu: AtomicIRS, event: Callable[[CoreGraph], bool]) -> tuple[Fraction, AtomicIRS]:
    """Weight of an invariant event and mu conditioned on it."""
    for G, _ in mu.atoms:
        val = event(G)
        for s in generators(mu.rank):
            if event(stallings.conjugate_subgroup(G, s)) != val:
                raise NotInvariantEventError(f"event is not conjugation invariant at {G!r}")
    kept = [(G, w) for G, w in mu.atoms if event(G)]
    total = sum((w for _, w in kept), Fraction(0))
    if total == 0:
        raise NullEventError("event has measure zero")
    return total, _certify(AtomicIRS.from_pairs(mu.rank, [(G, w / total) for G, w in kept]))


def _mat_mul(A, B):
    n = len(A)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _mat_inv(A):
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        f = M[c][c]
        M[c] = [x / f for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                g = M[r][c]
                M[r] = [x - g * y for x, y in zip(M[r], M[c])]
    return tuple(tuple(row[n:]) for row in M)


def evaluate_image(w: Word, images: Mapping[int, Sequence]) -> tuple:
    """Image of w under a homomorphism given on generators.

    Images are permutations (flat int sequences, 1-indexed) or square
    matrices (nested sequences, evaluated with exact rationals).
    """
    sample = images[1]
    if isinstance(sample[0], (list, tuple)):
        mats = {i: tuple(tuple(Fraction(x) for x in row) for row in m) for i, m in images.items()}
        n = len(sample)
        out = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        for lab in w.letters:
            M = mats[abs(lab)] if lab > 0 else _mat_inv(mats[abs(lab)])
            out = _mat_mul(out, M)
        return out
    n = len(sample)
    perm = tuple(range(1, n + 1))
    # left action: the rightmost letter acts first
    for lab in reversed(w.letters):
        p = list(images[abs(lab)])
        if lab < 0:
            q = [0] * n
            for k, v in enumerate(p):
                q[v - 1] = k + 1
            p = q
        perm = tuple(p[x - 1] for x in perm)
    return perm


def _is_identity(img: tuple) -> bool:
    if img and isinstance(img[0], tuple):
        return all(img[i][j] == (1 if i == j else 0) for i in range(len(img)) for j in range(len(img)))
    return img == tuple(range(1, len(img) + 1))


def nontrivial_under(mu: AtomicIRS, images: Mapping[int, Sequence]) -> bool:
    """True iff no atom lies inside the kernel of the homomorphism."""
    for G, _ in mu.atoms:
        if all(_is_identity(evaluate_image(b, images)) for b in stallings.basis(G)):
            return False
    return True
