"""Very proximal certificates and ping-pong certification.

Two arena styles are supported.  Ball arenas hold an attracting ball and a
repelling hyperplane neighbourhood for g and for g^-1, the form used for very
proximal elements.  Arc arenas live on the real projective line and hold one
open arc per generator letter with exact rational endpoints; they certify
pairs such as unipotent generators where no repelling hyperplane separates
from the attracting point.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import NoConvergenceError, NotContractingError, OverlapError, SingularError
from .geometry import (canonical_fixed_data, cartan, dist_point_hyperplane,
                       hausdorff_dist, image_point, proj_dist)


# -- ball arenas ------------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    center: object
    radius: object
    hyperplane: bool = False  # center is a functional; the set is a neighbourhood of its kernel


@dataclass(frozen=True)
class Arena:
    attract: Ball
    repel: Ball
    attract_inv: Ball
    repel_inv: Ball

    def scaled(self, factor) -> "Arena":
        return Arena(*(Ball(b.center, b.radius * factor, b.hyperplane)
                       for b in (self.attract, self.repel, self.attract_inv, self.repel_inv)))


# Over the reals the sine distance is not additive along geodesics, so every
# decision is taken on angles: asin of a sine distance, which is a metric, and
# a rotation by the angle between two functionals carries one kernel onto the
# other.  Over Q_p the distances are ultrametric and used as they are.

def _ang(x):
    return math.asin(min(1.0, max(0.0, float(x))))


def _gap_between(F, b1: Ball, b2: Ball):
    if b1.hyperplane and b2.hyperplane:
        return hausdorff_dist(F, b1.center, b2.center)
    if b1.hyperplane:
        b1, b2 = b2, b1
    if b2.hyperplane:
        return dist_point_hyperplane(F, b1.center, b2.center)
    return proj_dist(F, b1.center, b2.center)


def separation(F, b1: Ball, b2: Ball):
    """Positive value certifies the two sets are disjoint; it is the margin."""
    if b1.hyperplane and b2.hyperplane:
        raise ValueError("two hyperplane neighbourhoods always meet")
    d = _gap_between(F, b1, b2)
    if F.kind == "padic":
        # a ball meets another set only if its centre does, once d exceeds both radii
        return d - max(b1.radius, b2.radius)
    return _ang(d) - _ang(b1.radius) - _ang(b2.radius)


def containment(F, inner: Ball, outer: Ball):
    """Positive value certifies inner ⊂ outer (both balls or both hyperplane neighbourhoods)."""
    if inner.hyperplane != outer.hyperplane:
        raise ValueError("cannot compare a ball with a hyperplane neighbourhood")
    d = _gap_between(F, inner, outer)
    if F.kind == "padic":
        if inner.radius > outer.radius:
            return inner.radius - outer.radius - 1  # negative
        return outer.radius - d
    return _ang(outer.radius) - _ang(d) - _ang(inner.radius)


def bound_margin(F, g, attract: Ball, repel: Ball, cd=None):
    """Margin of the Cartan certificate for g(P \\ repel) ⊂ attract.

    A point at distance t from the Cartan hyperplane lands within
    |a_2/a_1| / t of the Cartan point; shifting to the arena centres costs
    their distance to the Cartan data.  Positive return value = certified.
    """
    cd = cartan(F, g) if cd is None else cd
    dv = proj_dist(F, attract.center, cd.top)
    dh = hausdorff_dist(F, repel.center, cd.functional)
    if F.kind == "padic":
        # beyond dh, distance to the arena hyperplane equals distance to the Cartan one
        if repel.radius <= dh:
            return -1
        return attract.radius - max(cd.gap / repel.radius, dv)
    room = _ang(repel.radius) - _ang(dh)
    if room <= 0:
        return -1.0
    t = math.sin(room)
    reach = _ang(min(1.0, float(cd.gap) / t)) + _ang(dv)
    return _ang(attract.radius) - reach - 1e-12


def sampled_contraction(F, g, attract: Ball, repel: Ball, budget=2000, seed=0):
    """Sampling falsifier for g(P \\ repel) ⊂ attract: (ok, witness)."""
    rng = random.Random(seed)
    n = F.dim(g)
    tried = accepted = 0
    while accepted < budget and tried < 50 * budget:
        tried += 1
        x = F.random_vector(n, rng)
        if dist_point_hyperplane(F, x, repel.center) < repel.radius:
            continue
        accepted += 1
        if proj_dist(F, image_point(F, g, x), attract.center) >= attract.radius:
            return False, x
    return True, None


def contraction_mode(F, g, attract, repel, budget=2000, seed=0):
    """('BOUND', margin) if the Cartan bound proves it, else ('SAMPLED', ok)."""
    m = bound_margin(F, g, attract, repel)
    if m > 0:
        return "BOUND", m
    ok, _ = sampled_contraction(F, g, attract, repel, budget, seed)
    return "SAMPLED", ok


@dataclass
class ProximalityCertificate:
    r: object
    eps: object
    v: object
    H: object
    v_inv: object
    H_inv: object
    mode: str
    both_directions: bool
    certified: bool
    margins: dict = field(default_factory=dict)
    witness: object = None
    reason: str = ""

    def arena(self) -> Arena:
        e = self.eps
        return Arena(Ball(self.v, e), Ball(self.H, e, True), Ball(self.v_inv, e), Ball(self.H_inv, e, True))


def is_very_proximal(F, g, r, eps, budget=2000, seed=0, tol=None) -> ProximalityCertificate:
    """Certify g as (r, eps)-very proximal around its canonical fixed data."""
    if not r > 2 * eps:
        raise ValueError("need r > 2 eps")
    try:
        v, H = canonical_fixed_data(F, g, tol)
        gi = F.inv(g)
        vi, Hi = canonical_fixed_data(F, gi, tol)
    except (NotContractingError, NoConvergenceError, SingularError) as exc:
        return ProximalityCertificate(r, eps, None, None, None, None, "NONE", True, False,
                                      reason=f"no canonical data: {exc}")
    cert = ProximalityCertificate(r, eps, v, H, vi, Hi, "BOUND", True, False)
    m = cert.margins
    m["dist_v_H"] = dist_point_hyperplane(F, v, H)
    m["dist_vinv_Hinv"] = dist_point_hyperplane(F, vi, Hi)
    if m["dist_v_H"] < r or m["dist_vinv_Hinv"] < r:
        cert.reason = "attracting point too close to repelling hyperplane"
        cert.mode = "EXACT"
        return cert
    A = cert.arena()
    modes = []
    for name, h, att, rep in (("g", g, A.attract, A.repel), ("g_inv", gi, A.attract_inv, A.repel_inv)):
        mode, val = contraction_mode(F, h, att, rep, budget, seed)
        modes.append(mode)
        if mode == "BOUND":
            m[f"contract_{name}"] = val
        elif not val:
            _, wit = sampled_contraction(F, h, att, rep, budget, seed)
            cert.mode, cert.witness = "SAMPLED", wit
            cert.reason = f"contraction of {name} falsified"
            return cert
    cert.mode = "BOUND" if all(x == "BOUND" for x in modes) else "SAMPLED"
    checks = {
        "A(g)∩R(g)": separation(F, A.attract, A.repel),
        "A(g)∩A(g^-1)": separation(F, A.attract, A.attract_inv),
        "A(g^-1)∩R(g^-1)": separation(F, A.attract_inv, A.repel_inv),
    }
    m.update(checks)
    bad = [k for k, x in checks.items() if x <= 0]
    if bad:
        cert.reason = "neighbourhoods overlap: " + ", ".join(bad)
        return cert
    cert.certified = True
    return cert


def canonical_arena(F, g, eps, tol=None) -> Arena:
    v, H = canonical_fixed_data(F, g, tol)
    vi, Hi = canonical_fixed_data(F, F.inv(g), tol)
    return Arena(Ball(v, eps), Ball(H, eps, True), Ball(vi, eps), Ball(Hi, eps, True))


def bound_arena(F, g, tol=None, factor=1) -> Arena:
    """Arena around canonical data with the smallest radius the Cartan bound certifies."""
    v, H = canonical_fixed_data(F, g, tol)
    gi = F.inv(g)
    vi, Hi = canonical_fixed_data(F, gi, tol)
    return Arena(*_bound_balls(F, g, v, H, factor), *_bound_balls(F, gi, vi, Hi, factor))


def _bound_balls(F, g, v, H, factor):
    """Smallest radius on a geometric grid whose arena the Cartan bound certifies.

    The margin grows with the radius, so the grid is bisected.
    """
    cd = cartan(F, g)
    if F.kind == "padic":
        # p-adic distances are powers of p; a radius strictly between two of
        # them turns the open ball into the closed ball of the lower power
        top, step = Fraction(F.p + 1, F.p ** 2), Fraction(1, F.p)
        size = F.digits
    else:
        top, step, size = 0.99, 0.8, 100  # down to about 2e-10

    def ok(k):
        rho = top * step ** k
        return bound_margin(F, g, Ball(v, rho), Ball(H, rho, True), cd) > 0

    if not ok(0):
        raise NotContractingError("no arena radius is certified by the Cartan bound")
    lo, hi = 0, size  # ok(lo) holds; find the last k that passes
    if ok(hi):
        lo = hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    rho = top * step ** lo * factor
    return Ball(v, rho), Ball(H, rho, True)


# -- ping-pong -------------------------------------------------------------------------

@dataclass
class PingPongResult:
    certified: bool
    margins: list
    modes: list
    reason: str = ""


def pingpong_certify(F, items: Sequence, budget=2000, seed=0) -> PingPongResult:
    """Ping-pong certificate for (g, Arena) pairs.

    Each element must map the complement of its repelling set into its
    attracting set (both directions); its own attracting sets must avoid its
    repelling set and each other; attracting sets of distinct elements must
    avoid all attracting and repelling sets of the others.  Overlaps raise
    OverlapError carrying the pair and the margin.
    """
    if items and isinstance(items[0][1], ArcArena):
        return arc_pingpong_certify(items)
    margins, modes = [], []
    for i, (g, A) in enumerate(items):
        for d, h, att, rep in ((1, g, A.attract, A.repel), (-1, F.inv(g), A.attract_inv, A.repel_inv)):
            mode, val = contraction_mode(F, h, att, rep, budget, seed + i)
            modes.append(mode)
            if mode == "SAMPLED" and not val:
                return PingPongResult(False, margins, modes, f"element {i} ({'+' if d > 0 else '-'}) "
                                      "does not map its complement into its attracting set")
            if mode == "BOUND":
                margins.append(("contract", i, d, val))
        for label, b1, b2 in (("A+R+", A.attract, A.repel), ("A+A-", A.attract, A.attract_inv),
                              ("A-R-", A.attract_inv, A.repel_inv)):
            s = separation(F, b1, b2)
            if s <= 0:
                raise OverlapError(f"element {i}: {label} overlap", (i, i, label), s)
            margins.append((label, i, i, s))
    for i, (_, Ai) in enumerate(items):
        for j, (_, Aj) in enumerate(items):
            if i == j:
                continue
            for a_lab, a in (("A+", Ai.attract), ("A-", Ai.attract_inv)):
                for b_lab, b in (("A+", Aj.attract), ("A-", Aj.attract_inv),
                                 ("R+", Aj.repel), ("R-", Aj.repel_inv)):
                    s = separation(F, a, b)
                    if s <= 0:
                        raise OverlapError(f"{a_lab}({i}) meets {b_lab}({j})", (i, j, a_lab, b_lab), s)
                    margins.append((a_lab + b_lab, i, j, s))
    return PingPongResult(True, margins, modes)


# -- exact arcs on the real projective line -----------------------------------------------------
# A point [x:y] has coordinate t = x/y, with None standing for infinity.  The
# open arc (P, Q) runs from P towards increasing t, through infinity if needed.

def _key(P, t):
    if P is None:
        return (-1, 0) if t is None else (0, t)
    if t is None:
        return (1, 0)
    return (0, t) if t >= P else (2, t)


def mobius(M, t):
    a, b = Fraction(M[0][0]), Fraction(M[0][1])
    c, d = Fraction(M[1][0]), Fraction(M[1][1])
    if t is None:
        return None if c == 0 else a / c
    den = c * t + d
    return None if den == 0 else (a * t + b) / den


def _det2(M):
    return Fraction(M[0][0]) * Fraction(M[1][1]) - Fraction(M[0][1]) * Fraction(M[1][0])


@dataclass(frozen=True)
class Arc:
    start: object
    end: object

    def __post_init__(self):
        if self.start == self.end:
            raise ValueError("degenerate arc")

    def contains(self, t) -> bool:
        k = _key(self.start, t)
        return _key(self.start, self.start) < k < _key(self.start, self.end)

    def within(self, other: "Arc") -> bool:
        """Closure of self inside closure of other."""
        P = other.start
        k0, k1 = _key(P, P), _key(P, other.end)
        a, b = _key(P, self.start), _key(P, self.end)
        if self.start == P:
            a = k0
        return k0 <= a < b <= k1

    def disjoint(self, other: "Arc") -> bool:
        return self.within(Arc(other.end, other.start))

    def image(self, M) -> "Arc":
        p, q = mobius(M, self.start), mobius(M, self.end)
        return Arc(p, q) if _det2(M) > 0 else Arc(q, p)


@dataclass(frozen=True)
class ArcArena:
    plus: Arc   # receives g of every other letter's arc
    minus: Arc  # receives g^-1 of every other letter's arc


def arc_pingpong_certify(items: Sequence) -> PingPongResult:
    """Exact table-tennis certificate on the projective line.

    With letters s and arcs Y_s pairwise disjoint and s(Y_t) ⊂ Y_s whenever
    t != s^-1, a reduced word w = s_1...s_k moves any point of Y_t with
    t not in {s_1, s_k^-1} into Y_{s_1}, so w is not the identity.  Needs at
    least two generators.
    """
    if len(items) < 2:
        raise ValueError("arc certificates need at least two generators")
    letters = []
    for i, (M, A) in enumerate(items):
        Minv = ((M[1][1], -Fraction(M[0][1])), (-Fraction(M[1][0]), M[0][0]))
        letters.append(((i, 1), M, A.plus))
        letters.append(((i, -1), Minv, A.minus))
    margins = []
    for x in range(len(letters)):
        for y in range(x + 1, len(letters)):
            if not letters[x][2].disjoint(letters[y][2]):
                raise OverlapError(f"arcs of {letters[x][0]} and {letters[y][0]} meet",
                                   (letters[x][0], letters[y][0]), 0)
    for (s, M, Ys) in letters:
        for (t, _, Yt) in letters:
            if t == (s[0], -s[1]):
                continue
            img = Yt.image(M)
            if not img.within(Ys):
                return PingPongResult(False, margins, ["EXACT"],
                                      f"letter {s} does not map the arc of {t} into its own")
            margins.append((s, t, "exact"))
    return PingPongResult(True, margins, ["EXACT"])


def sanov_arenas():
    """The classical |x| > |y| and |x| < |y| split by sign, for [[1,2],[0,1]], [[1,0],[2,1]]."""
    one = Fraction(1)
    return (ArcArena(Arc(one, None), Arc(None, -one)),
            ArcArena(Arc(Fraction(0), one), Arc(-one, Fraction(0))))
