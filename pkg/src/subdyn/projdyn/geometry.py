"""Metric geometry and contraction data on projective space.

Points are normalized coordinate vectors.  A hyperplane is stored as the
normalized functional whose kernel it is, so the same vector type serves
both and duality is literal.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoConvergenceError, NotContractingError, NotFoundError, FieldError

DEFAULT_C = 4
DEFAULT_C1 = 4
DEFAULT_C2 = 4


def proj_dist(F, v, w):
    """d([v],[w]) = |v ∧ w| / (|v| |w|)."""
    if len(v) != len(w):
        raise FieldError("dimension mismatch")
    return F.wedge_norm(v, w) / (F.norm(v) * F.norm(w))


def dist_point_hyperplane(F, v, f):
    """d([v], ker f) = |f(v)| for unit v and f."""
    return F.absval(F.dot(f, v)) / (F.norm(f) * F.norm(v))


def hausdorff_dist(F, f, h):
    """Hausdorff distance between ker f and ker h, i.e. |f ∧ h| in the dual."""
    return proj_dist(F, f, h)


def image_point(F, g, v):
    return F.normalize(F.apply(g, v))


def image_hyperplane(F, g, f):
    """Functional cutting out g(ker f), namely f ∘ g^-1."""
    return F.normalize(F.apply(F.transpose(F.inv(g)), f))


@dataclass(frozen=True)
class CartanData:
    values: tuple
    top: object         # image of the top Cartan direction
    functional: object  # kernel = span of the remaining input directions

    @property
    def gap(self):
        return self.values[1] / self.values[0]


def cartan(F, g) -> CartanData:
    vals, top, fn = F.cartan(g)
    return CartanData(tuple(vals), top, fn)


def lipschitz_bound(F, g):
    a = cartan(F, g).values
    return (a[0] / a[-1]) ** 2


def contraction_data(F, g, c=DEFAULT_C):
    """(eps_est, v, f) with eps_est = c * sqrt|a_2/a_1|.

    With c = 1 this is already sound for the Cartan data: a point at distance
    >= t from ker f lands within |a_2/a_1| / t of v.
    """
    cd = cartan(F, g)
    if F.is_zero(cd.values[0] - cd.values[1]) or cd.values[1] >= cd.values[0]:
        raise NotContractingError("no gap between the top two Cartan values")
    return c * F.sqrt(cd.gap), cd.top, cd.functional


def is_contracting(F, g, eps, v, f, budget=10_000, seed=0):
    """Sampling falsifier for g(P \\ (H)_eps) ⊂ (v)_eps.

    Returns (True, None) when no counterexample turns up, else (False, x).
    """
    n = F.dim(g)
    rng = random.Random(seed)
    tried = accepted = 0
    while accepted < budget and tried < 50 * budget:
        tried += 1
        x = F.random_vector(n, rng)
        if dist_point_hyperplane(F, x, f) < eps:
            continue
        accepted += 1
        if proj_dist(F, image_point(F, g, x), v) >= eps:
            return False, x
    return True, None


def canonical_fixed_data(F, g, tol=None, maxiter=10_000):
    """The attracting fixed point and repelling fixed hyperplane of g.

    The point comes from power iteration of g; the hyperplane from power
    iteration of the transpose, whose top fixed point is a functional
    vanishing on the repelling hyperplane.
    """
    tol = F.default_tol() if tol is None else tol
    cd = cartan(F, g)
    v = _power_iterate(F, g, cd.top, tol, maxiter)
    gT = F.transpose(g)
    f = _power_iterate(F, gT, cd.functional, tol, maxiter)
    if proj_dist(F, image_point(F, g, v), v) >= tol:
        raise NoConvergenceError("point residual above tolerance")
    # g fixes ker f iff the transpose fixes f; the transpose contracts towards
    # f, so its residual is not inflated by the expansion of g^-T
    if hausdorff_dist(F, image_point(F, gT, f), f) >= tol:
        raise NoConvergenceError("hyperplane residual above tolerance")
    return v, f


def _power_iterate(F, g, start, tol, maxiter):
    v = F.normalize(start)
    for _ in range(maxiter):
        w = image_point(F, g, v)
        if proj_dist(F, w, v) < tol / 4:
            return w
        v = w
    raise NoConvergenceError(f"power iteration did not settle in {maxiter} steps")


def powers_decay(F, g, n_max, c=DEFAULT_C):
    """eps_est(g^n) for n = 1..n_max."""
    out = []
    for n in range(1, n_max + 1):
        eps, _, _ = contraction_data(F, F.power(g, n), c)
        out.append(eps)
    return out


def local_lipschitz(F, g, center, radius, samples=2000, seed=0):
    """Largest observed d(gx, gy) / d(x, y) over sampled pairs near center."""
    rng = random.Random(seed)
    worst = 0
    for _ in range(samples):
        x = F.perturb(center, radius / 2, rng)
        y = F.perturb(center, radius / 2, rng)
        if proj_dist(F, x, center) > radius or proj_dist(F, y, center) > radius:
            continue
        d = proj_dist(F, x, y)
        if F.is_zero(d):
            continue
        r = proj_dist(F, image_point(F, g, x), image_point(F, g, y)) / d
        worst = max(worst, r)
    return worst


def sampled_distortion(F, g, samples=2000, seed=0):
    """Largest observed distortion ratio over random pairs of points."""
    rng = random.Random(seed)
    n = F.dim(g)
    worst = 0
    for _ in range(samples):
        x, y = F.random_vector(n, rng), F.random_vector(n, rng)
        d = proj_dist(F, x, y)
        if F.is_zero(d):
            continue
        worst = max(worst, proj_dist(F, image_point(F, g, x), image_point(F, g, y)) / d)
    return worst


def calibrate_lipschitz_constant(F, maps, samples=300, seed=0, far=0.5):
    """Fit c in local_lip <= c * eps^2 / d^2 from sampled maps.

    eps^2 is |a_2/a_1| and d the distance of the sample ball from the
    repelling hyperplane of the Cartan data.
    """
    rng = random.Random(seed)
    fitted = 0
    for g in maps:
        cd = cartan(F, g)
        n = F.dim(g)
        for _ in range(8):
            x = F.random_vector(n, rng)
            d = dist_point_hyperplane(F, x, cd.functional)
            if d < far:
                continue
            lip = local_lipschitz(F, g, x, d / 4, samples, rng.randrange(2 ** 31))
            fitted = max(fitted, lip * (d - d / 4) ** 2 / cd.gap)
    return fitted


# -- general position -----------------------------------------------------------

def _rank(F, vectors) -> int:
    if F.kind == "real":
        return int(np.linalg.matrix_rank(np.array(vectors, dtype=float), tol=1e-9))
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % F.modulus != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def general_position(F, points: Sequence) -> bool:
    """Every subset of size i <= n spans an i-dimensional space."""
    if not points:
        return True
    n = len(points[0])
    for k in range(1, min(n, len(points)) + 1):
        for sub in itertools.combinations(points, k):
            if _rank(F, sub) < k:
                return False
    return True


def projectively_trivial(F, g) -> bool:
    return F.is_scalar(g)


def orbit_general_position(F, gens: Sequence, v, budget=50):
    """Breadth-first orbit of v under gens and inverses; first n+1 points in
    general position, else NotFoundError."""
    n = len(v)
    moves = list(gens) + [F.inv(g) for g in gens]
    start = F.normalize(v)
    orbit = [start]
    frontier = [start]
    while frontier and len(orbit) < budget:
        nxt = []
        for x in frontier:
            for g in moves:
                y = image_point(F, g, x)
                if all(not F.is_zero(proj_dist(F, y, z)) for z in orbit):
                    orbit.append(y)
                    nxt.append(y)
                    found = _general_subset(F, orbit, n + 1)
                    if found is not None:
                        return found
                    if len(orbit) >= budget:
                        break
            if len(orbit) >= budget:
                break
        frontier = nxt
    raise NotFoundError(f"no {n + 1} points in general position among {len(orbit)} orbit points")


def _general_subset(F, pts, k):
    if len(pts) < k:
        return None
    last = pts[-1]
    for sub in itertools.combinations(pts[:-1], k - 1):
        cand = list(sub) + [last]
        if general_position(F, cand):
            return cand
    return None
