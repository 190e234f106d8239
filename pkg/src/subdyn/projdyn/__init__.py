"""Projective dynamics over the reals and the p-adic numbers."""

from .errors import (DegeneratePositionError, FieldError, NoConvergenceError, NotContractingError,
                     NotFoundError, OverlapError, ProjDynError, RangeExhaustedError,
                     SearchExhaustedError, SingularError)
from .field import Padic, Real, field_from_json, valuation
from .geometry import (DEFAULT_C, DEFAULT_C1, DEFAULT_C2, CartanData, calibrate_lipschitz_constant,
                       canonical_fixed_data, cartan, contraction_data, dist_point_hyperplane,
                       general_position, hausdorff_dist, image_hyperplane, image_point,
                       is_contracting, lipschitz_bound, local_lipschitz, orbit_general_position,
                       powers_decay, proj_dist, projectively_trivial, sampled_distortion)
from .pingpong import (Arc, ArcArena, Arena, Ball, ProximalityCertificate, arc_pingpong_certify,
                       bound_arena, canonical_arena, containment, is_very_proximal,
                       pingpong_certify, sanov_arenas, separation)
from .synthesis import (arrange_independent, double_coset_free_family, evaluate_word,
                        make_contracting, make_very_proximal, position_good,
                        synthesize_coset_element)


def load_matrix(doc: dict):
    """(field, matrix) from {"field": {...}, "n": n, "entries": [[...]]} with rational strings."""
    F = field_from_json(doc["field"])
    n = int(doc["n"])
    entries = doc["entries"]
    if len(entries) != n or any(len(row) != n for row in entries):
        raise FieldError(f"expected a {n}x{n} matrix")
    A = F.mat(entries)
    if F.is_singular(A):
        raise SingularError("matrix is singular at working precision")
    return F, A


def dump_matrix(F, A) -> dict:
    return {"field": F.to_json(), "n": F.dim(A), "entries": F.to_strings(A)}
