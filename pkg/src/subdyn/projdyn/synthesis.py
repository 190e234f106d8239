"""Constructing contracting, very proximal and independent elements.

Every step ends in a checkable certificate: Cartan-bound contractions on
explicit balls, ball separations and containments with recorded margins.
Searches are bounded and report exhaustion instead of guessing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (DegeneratePositionError, NoConvergenceError, NotContractingError, OverlapError,
                     RangeExhaustedError, SearchExhaustedError, SingularError)
from .geometry import canonical_fixed_data, dist_point_hyperplane, image_point, local_lipschitz
from .pingpong import (Arena, Ball, _gap_between, bound_arena, bound_margin, containment, is_very_proximal,
                       pingpong_certify, separation)
from .. import stallings
from ..words import Word, identity as word_identity


def _fixed(F, g):
    v, H = canonical_fixed_data(F, g)
    vi, Hi = canonical_fixed_data(F, F.inv(g))
    return v, H, vi, Hi


def _conj(F, h, a, l):
    hl = F.power(h, l)
    return F.mul(F.mul(hl, a), F.inv(hl))


def _default_radius(F):
    return Fraction(1, F.p ** 2) if F.kind == "padic" else 0.05


def _default_proximality(F):
    if F.kind == "padic":
        return Fraction(1), Fraction(F.p + 1, F.p ** 2)
    return 0.5, 0.1


def _below(F, x):
    """A radius just under the distance x, so that the open set stops short of it."""
    if F.kind == "padic":
        return x * Fraction(F.p, F.p + 1)
    return math.sin(math.asin(min(1.0, float(x))) * (1 - 1e-9))


# -- contracting conjugates -------------------------------------------------------------

def make_contracting(F, g, x, m_range=range(1, 11), threshold=1e-3, radius=None,
                     samples=500, seed=0):
    """Smallest m with y = g^m x g^-m locally threshold-Lipschitz near the attracting point of g^-1.

    Returns (m, y, lip) with lip the measured local constant.
    """
    v, H, vi, Hi = _fixed(F, g)
    d = dist_point_hyperplane(F, image_point(F, x, vi), H)
    if F.is_zero(d):
        raise DegeneratePositionError("x maps the attracting point of g^-1 into the repelling hyperplane of g")
    radius = _default_radius(F) if radius is None else radius
    for m in m_range:
        y = _conj(F, g, x, m)
        lip = local_lipschitz(F, y, vi, radius, samples, seed)
        if lip < threshold:
            return m, y, lip
    raise RangeExhaustedError(f"no m in {m_range} brings the local constant under {threshold}")


# -- very proximal products -----------------------------------------------------------------

def helper_words(F, helpers, max_len):
    """(word, matrix) for reduced words in the helpers and inverses, shortest first."""
    n = F.dim(helpers[0])
    inverses = [F.inv(h) for h in helpers]
    out = [((), F.identity(n))]
    layer = out
    for _ in range(max_len):
        nxt = []
        for w, M in layer:
            for i in range(len(helpers)):
                for s, h in ((i + 1, helpers[i]), (-(i + 1), inverses[i])):
                    if w and w[-1] == -s:
                        continue
                    nxt.append((w + (s,), F.mul(M, h)))
        out += nxt
        layer = nxt
    return out


def make_very_proximal(F, y, helpers, word_bound=3, r=None, eps=None, budget=300, seed=0):
    """First pair (f1, f2) of helper words with a = y f1 y^-1 f2 very proximal.

    If y itself already passes, it is returned with f1 = f2 = None, since the
    empty pair would give the identity.  Returns (f1, f2, a, certificate),
    with f1 and f2 given as words in the helper indices.
    """
    r0, e0 = _default_proximality(F)
    r, eps = (r0 if r is None else r), (e0 if eps is None else eps)
    cert = is_very_proximal(F, y, r, eps, budget, seed)
    if cert.certified:
        return None, None, y, cert
    yi = F.inv(y)
    words = helper_words(F, helpers, word_bound)
    pairs = sorted(itertools.product(range(len(words)), repeat=2),
                   key=lambda ij: (len(words[ij[0]][0]) + len(words[ij[1]][0]), ij))
    for i, j in pairs:
        (w1, f1), (w2, f2) = words[i], words[j]
        a = F.mul(F.mul(F.mul(y, f1), yi), f2)
        if F.is_scalar(a) or _no_dominant_eigenvalue(F, a):
            continue
        cert = is_very_proximal(F, a, r, eps, budget, seed)
        if cert.certified:
            return w1, w2, a, cert
    raise SearchExhaustedError(f"no helper words of length <= {word_bound} give a very proximal product")


def _no_dominant_eigenvalue(F, a):
    """Quick real-field rejection: power iteration cannot settle without a strict top eigenvalue."""
    if F.kind != "real":
        return False
    mods = sorted(abs(np.linalg.eigvals(a)), reverse=True)
    return mods[1] >= mods[0] * (1 - 1e-9)


# -- nesting inside the neighbourhoods of h ---------------------------------------------------

@dataclass
class GoodPosition:
    l: int
    element: object
    target: Arena          # h's attracting ball and h^-1's repelling neighbourhood carry the sets
    margins: dict = field(default_factory=dict)


def position_good(F, h, a, l_range=range(0, 11), target=None, arena_a=None):
    """Smallest l with every ping-pong set of h^l a h^-l inside h's neighbourhoods.

    The sets of a' = h^l a h^-l are the h^l-images of the sets of a.  For l >= 1
    an attracting set B of a is carried into the ball A(h) when a Cartan bound
    for h^l certifies that h^l maps the complement of some neighbourhood R of
    the repelling hyperplane of h into A(h), with R chosen to miss B; the
    repelling sets are handled the same way with h^-l and the roles swapped.
    """
    ha = bound_arena(F, h)
    target = ha if target is None else target
    arena_a = bound_arena(F, a) if arena_a is None else arena_a
    Hh, vhi = ha.repel.center, ha.attract_inv.center
    A_set = (arena_a.attract, arena_a.attract_inv)
    R_set = (arena_a.repel, arena_a.repel_inv)
    room = None
    for l in l_range:
        margins = {}
        if l == 0:
            for k, B in enumerate(A_set):
                margins[f"A{k}"] = containment(F, B, target.attract)
            for k, B in enumerate(R_set):
                margins[f"R{k}"] = containment(F, B, target.repel_inv)
        else:
            if room is None:
                room = _room(F, A_set, R_set, Hh, vhi)
            hl, hil = F.power(h, l), F.power(F.inv(h), l)
            for k, B in enumerate(A_set):
                rho = _below(F, _reach(F, B, Ball(Hh, 0, True)))
                margins[f"A{k}"] = bound_margin(F, hl, target.attract, Ball(Hh, rho, True))
            for k, B in enumerate(R_set):
                rho = _below(F, _reach(F, Ball(vhi, 0), B))
                # h^-l maps the complement of the target repelling set into a ball missing B
                margins[f"R{k}"] = bound_margin(F, hil, Ball(vhi, rho), target.repel_inv)
        if all(m > 0 for m in margins.values()):
            return GoodPosition(l, _conj(F, h, a, l), target, margins)
    raise RangeExhaustedError(f"no l in {l_range} nests the sets of a inside those of h")


def _room(F, A_set, R_set, Hh, vhi):
    """Check the sets of a keep clear of the data that powers of h push away from."""
    for B in A_set:
        if F.is_zero(dist_point_hyperplane(F, B.center, Hh)):
            raise DegeneratePositionError("an attracting point of a lies on the repelling hyperplane of h")
        if separation(F, B, Ball(Hh, 0, True)) <= 0:
            raise DegeneratePositionError("an attracting set of a meets the repelling hyperplane of h")
    for B in R_set:
        if F.is_zero(dist_point_hyperplane(F, vhi, B.center)):
            raise DegeneratePositionError("the attracting point of h^-1 lies on a repelling hyperplane of a")
        if separation(F, Ball(vhi, 0), B) <= 0:
            raise DegeneratePositionError("a repelling set of a contains the attracting point of h^-1")
    return True


def _reach(F, B, other: Ball):
    """Largest radius for `other` (centre kept) still disjoint from B, as a distance."""
    if F.kind == "padic":
        return _gap_between(F, B, other)
    gap = separation(F, B, other)
    return math.sin(max(gap, 0.0))


# -- conjugates by powers of g ----------------------------------------------------------------

@dataclass
class ArrangedTuple:
    elements: list
    indices: list
    properties: dict
    certified: bool


def arrange_independent(F, g, elements: Sequence, indices: Sequence[int], arenas=None):
    """Certify {g^i a_i g^-i} as a free basis via translates of two sets.

    D is the union of the attracting balls of the a_i and D-hat adds their
    repelling neighbourhoods.  If D misses the repelling sets of g and g^-1,
    and D-hat misses the attracting balls of g and g^-1, then g^k D meets
    D-hat only for k = 0, which separates the ping-pong sets of the
    conjugates with distinct indices.
    """
    if len(set(indices)) != len(indices):
        raise OverlapError("duplicate conjugation indices", ("translate", 3), 0)
    if len(indices) != len(elements):
        raise ValueError("one index per element")
    ga = bound_arena(F, g)
    arenas = [bound_arena(F, a) for a in elements] if arenas is None else list(arenas)
    props = {"own": [], "D_vs_R": [], "Dhat_vs_A": []}
    for k, (a, A) in enumerate(zip(elements, arenas)):
        res = pingpong_certify(F, [(a, A)])
        if not res.certified:
            raise OverlapError(f"element {k} fails its own ping-pong: {res.reason}", ("own", 1, k), None)
        props["own"].append(min(m[-1] for m in res.margins) if res.margins else None)
    if len(elements) > 1:
        for k, A in enumerate(arenas):
            for B in (A.attract, A.attract_inv):
                for R in (ga.repel, ga.repel_inv):
                    s = separation(F, B, R)
                    if s <= 0:
                        raise OverlapError(f"attracting set of element {k} meets a repelling set of g",
                                           ("D", 2, k), s)
                    props["D_vs_R"].append(s)
            for B in (A.attract, A.attract_inv, A.repel, A.repel_inv):
                for Ag in (ga.attract, ga.attract_inv):
                    s = separation(F, Ag, B)
                    if s <= 0:
                        raise OverlapError(f"set of element {k} meets an attracting ball of g",
                                           ("Dhat", 1, k), s)
                    props["Dhat_vs_A"].append(s)
    conj = [_conj(F, g, a, i) if i >= 0 else _conj(F, F.inv(g), a, -i)
            for a, i in zip(elements, indices)]
    return ArrangedTuple(conj, list(indices), props, True)


# -- elements of double cosets ------------------------------------------------------------------

@dataclass
class CosetElement:
    l1: int
    l2: int
    element: object
    arena: Arena
    margins: dict
    skipped: list  # lexicographically smaller (l1, l2) that failed, with the reason


def _nested_margins(F, fa: Arena, pa: Arena, qa: Arena):
    return {
        "A(f)⊂A(b_q)": containment(F, fa.attract, qa.attract),
        "R(f)⊂R(b_p)": containment(F, fa.repel, pa.repel),
        "R(f^-1)⊂R(b_q^-1)": containment(F, fa.repel_inv, qa.repel_inv),
        "A(f^-1)⊂A(b_p^-1)": containment(F, fa.attract_inv, pa.attract_inv),
    }


def synthesize_coset_element(F, b_p, b_q, x, y, gamma, l_range=range(0, 13), accept=None):
    """Smallest (l1, l2) with f = b_q^l2 y gamma x b_p^l1 nested in the arenas of b_p, b_q.

    f gets the arena its own Cartan bound certifies; the four containments are
    checked with positive margins.  `accept`, if given, is an extra test on
    the candidate (used to keep a growing family in ping-pong).
    """
    c = F.mul(F.mul(y, gamma), x)
    vp, Hp, vpi, Hpi = _fixed(F, b_p)
    vq, Hq, vqi, Hqi = _fixed(F, b_q)
    if F.is_zero(dist_point_hyperplane(F, image_point(F, c, vp), Hq)):
        raise DegeneratePositionError("y gamma x maps the attracting point of b_p into the repelling hyperplane of b_q")
    if F.is_zero(dist_point_hyperplane(F, image_point(F, F.inv(c), vqi), Hpi)):
        raise DegeneratePositionError("(y gamma x)^-1 maps the attracting point of b_q^-1 into the repelling hyperplane of b_p^-1")
    pa, qa = bound_arena(F, b_p), bound_arena(F, b_q)
    skipped = []
    for l1 in l_range:
        for l2 in l_range:
            f = F.mul(F.mul(F.power(b_q, l2), c), F.power(b_p, l1))
            try:
                fa = bound_arena(F, f)
            except (NotContractingError, NoConvergenceError, SingularError) as exc:
                skipped.append(((l1, l2), str(exc)))
                continue
            margins = _nested_margins(F, fa, pa, qa)
            bad = [k for k, m in margins.items() if m <= 0]
            if not bad and accept is not None:
                ok, why = accept(f, fa)
                if not ok:
                    bad = [why]
            if bad:
                skipped.append(((l1, l2), ", ".join(bad)))
                continue
            return CosetElement(l1, l2, f, fa, margins, skipped)
    raise RangeExhaustedError(f"no (l1, l2) in {l_range} squared nests f inside the arenas")


def evaluate_word(F, mats, w: Word):
    n = F.dim(mats[0])
    inv = [F.inv(M) for M in mats]
    out = F.identity(n)
    for x in w.letters:
        out = F.mul(out, mats[x - 1] if x > 0 else inv[-x - 1])
    return out


@dataclass
class FamilyElement:
    p: int
    q: int
    gamma: Word
    x: Word             # in Theta_p
    y: Word             # in Theta_q
    word: Word          # b_q^l2 y gamma x b_p^l1
    l1: int
    l2: int
    matrix: object


@dataclass
class FamilyResult:
    elements: list      # FamilyElement
    failures: list      # (request, reason)
    certified: bool
    stallings_rank: int


def double_coset_free_family(F, mats, groups, requests, budget=4, width=4):
    """Independent elements f(p, q, gamma) in Theta_q gamma Theta_p.

    mats assigns a matrix to each free generator; groups is a list of
    (theta generator words, b word) with b in Theta very proximal; requests
    lists (p, q, gamma word).  x and y are drawn from Theta_p and Theta_q
    (identity first, then generators and inverses) until the position is
    non-degenerate, and each new f must play ping-pong with those already
    accepted.  When a request cannot be met, everything is redone with the
    powers of the b's padded by one more; budget caps the padding rounds.
    The best partial family is returned together with its failures.
    """
    rank = len(mats)
    bmat = [evaluate_word(F, mats, b) for _, b in groups]
    best = FamilyResult([], [((p, q, str(g)), "budget exhausted") for p, q, g in requests], False, 0)
    for pad in range(1, budget + 1):
        res = _family_round(F, mats, groups, bmat, requests, range(pad, pad + width))
        if len(res.elements) > len(best.elements) or not best.elements:
            best = res
        if not res.failures:
            break
    return best


def _family_round(F, mats, groups, bmat, requests, l_range):
    rank = len(mats)
    elements, failures, accepted = [], [], []

    def candidates(p):
        yield word_identity(rank)
        for w in groups[p][0]:
            yield w
            yield ~w

    def accept(f, fa):
        try:
            pingpong_certify(F, accepted + [(f, fa)])
        except OverlapError as exc:
            return False, f"family overlap: {exc}"
        return True, ""

    for p, q, gamma in requests:
        gmat = evaluate_word(F, mats, gamma)
        found, reason = None, None
        for xw, yw in itertools.product(candidates(p), candidates(q)):
            try:
                res = synthesize_coset_element(F, bmat[p], bmat[q], evaluate_word(F, mats, xw),
                                               evaluate_word(F, mats, yw), gmat, l_range, accept)
            except (DegeneratePositionError, RangeExhaustedError) as exc:
                reason = str(exc)
                continue
            found = (xw, yw, res)
            break
        if found is None:
            failures.append(((p, q, str(gamma)), reason))
            continue
        xw, yw, res = found
        fw = (groups[q][1] ** res.l2) * yw * gamma * xw * (groups[p][1] ** res.l1)
        accepted.append((res.element, res.arena))
        elements.append(FamilyElement(p, q, gamma, xw, yw, fw, res.l1, res.l2, res.element))
    rk = stallings.rank(stallings.from_generators([e.word for e in elements], rank)) if elements else 0
    return FamilyResult(elements, failures, not failures and rk == len(elements), rk)
