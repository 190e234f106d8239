"""Command line front end: JSON in, JSON report out.

Exit codes: 0 certified or true, 1 falsified or false, 2 inconclusive
(a bounded search ran out), 3 malformed input.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__, chabauty, irs, recurrence, stabtop, stallings
from . import projdyn as pd
from .projdyn import pingpong as pp
from .words import Word, WordError, parse_word

TRUE, FALSE, INCONCLUSIVE, INPUT_ERROR = 0, 1, 2, 3


class InputError(ValueError):
    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class Verdict(Exception):
    """Carries a finished result out of a handler."""

    def __init__(self, code, result):
        super().__init__(code)
        self.code, self.result = code, result


# -- serialization ---------------------------------------------------------------------

def jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Word):
        return str(obj)
    if isinstance(obj, stallings.CoreGraph):
        # same shape as the subgroup input format so reports can be fed back in
        return {"rank": obj.rank, "generators": [str(w) for w in stallings.basis(obj)]}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and obj == float("inf"):
        return "infinite"
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, frozenset, set)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(x) for x in items]
    return obj


# -- input parsing ---------------------------------------------------------------------------

def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", path)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}", path)


def _keys(doc, allowed, required, where):
    if not isinstance(doc, dict):
        raise InputError(f"{where}: expected a JSON object", where)
    extra = set(doc) - set(allowed)
    if extra:
        raise InputError(f"{where}: unknown keys {sorted(extra)}", where)
    missing = [k for k in required if k not in doc]
    if missing:
        raise InputError(f"{where}: missing keys {missing}", where)


def _rational(x, where):
    try:
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{where}: not a rational number: {x!r}", where)


def _word(text, rank, where):
    try:
        return parse_word(str(text), rank)
    except WordError as exc:
        raise InputError(f"{where}: {exc}", where)


def subgroup_from(doc, where):
    _keys(doc, ("rank", "generators"), ("rank", "generators"), where)
    rank = int(doc["rank"])
    gens = [_word(g, rank, f"{where}.generators[{i}]") for i, g in enumerate(doc["generators"])]
    return stallings.from_generators(gens, rank)


def load_subgroup(path):
    return subgroup_from(load_json(path), path)


def _perm_list(p, n, where):
    if sorted(p) != list(range(1, n + 1)):
        raise InputError(f"{where}: not a permutation of 1..{n}", where)
    return tuple(int(x) for x in p)


def action_from(doc, where):
    _keys(doc, ("rank", "points", "weights", "perms"), ("rank", "points", "perms"), where)
    rank, n = int(doc["rank"]), int(doc["points"])
    letters = [chr(ord("a") + i) for i in range(rank)]
    perms = doc["perms"]
    if set(perms) != set(letters):
        raise InputError(f"{where}.perms: expected keys {letters}", where)
    weights = doc.get("weights") or [Fraction(1, n)] * n
    ws = tuple(_rational(w, f"{where}.weights") for w in weights)
    try:
        return irs.FiniteAction(rank, n, ws, tuple(_perm_list(perms[c], n, f"{where}.perms.{c}") for c in letters))
    except irs.IRSError as exc:
        raise InputError(f"{where}: {exc}", where)


def irs_from(doc, where):
    if isinstance(doc, dict) and doc.get("tool") == "subdyn":
        doc = doc.get("result")
    _keys(doc, ("rank", "atoms"), ("atoms",), where)
    pairs = []
    for i, atom in enumerate(doc["atoms"]):
        _keys(atom, ("subgroup", "weight"), ("subgroup", "weight"), f"{where}.atoms[{i}]")
        pairs.append((subgroup_from(atom["subgroup"], f"{where}.atoms[{i}].subgroup"),
                      _rational(atom["weight"], f"{where}.atoms[{i}].weight")))
    if not pairs:
        raise InputError(f"{where}: no atoms", where)
    rank = int(doc.get("rank", pairs[0][0].rank))
    try:
        mu = irs.AtomicIRS.from_pairs(rank, pairs)
    except irs.IRSError as exc:
        raise InputError(f"{where}: {exc}", where)
    if not irs.is_invariant(mu):
        raise InputError(f"{where}: weights are not conjugation invariant", where)
    return mu


def system_from(doc, where):
    _keys(doc, ("rank", "points", "weights", "perms"), ("points", "perms"), where)
    n = int(doc["points"])
    perms = doc["perms"]
    if set(perms) != {"T"}:
        raise InputError(f"{where}.perms: expected the single key 'T'", where)
    T = [int(x) for x in perms["T"]]
    # 1-based like the action format unless the list mentions point 0
    if 0 not in T:
        T = [x - 1 for x in T]
    weights = doc.get("weights") or [Fraction(1, n)] * n
    try:
        return recurrence.FiniteMPSystem(n, tuple(_rational(w, f"{where}.weights") for w in weights), tuple(T))
    except recurrence.RecurrenceError as exc:
        raise InputError(f"{where}: {exc}", where)


def _field(doc, args, where):
    try:
        F = pd.field_from_json(doc)
    except (pd.FieldError, KeyError, TypeError) as exc:
        raise InputError(f"{where}.field: {exc}", where)
    if F.kind == "padic" and args.precision is not None:
        F = pd.Padic(F.p, args.precision)
    if F.kind == "real" and args.tolerance is not None:
        F = pd.Real(args.tolerance)
    return F


def _matrix(F, n, entries, where):
    if len(entries) != n or any(len(r) != n for r in entries):
        raise InputError(f"{where}: expected a {n}x{n} matrix", where)
    try:
        A = F.mat(entries)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: {exc}", where)
    if F.is_singular(A):
        raise InputError(f"{where}: singular matrix", where)
    return A


def matrix_file(path, args):
    doc = load_json(path)
    _keys(doc, ("field", "n", "entries"), ("field", "n", "entries"), path)
    F = _field(doc["field"], args, path)
    return F, _matrix(F, int(doc["n"]), doc["entries"], f"{path}.entries")


def _point(F, x):
    return None if x in ("inf", "infinity", None) else _rational(x, "arc endpoint")


def _strs(F, v):
    return F.to_strings(v) if F.kind == "padic" else jsonable(v)


def _ball(F, b):
    return {"center": _strs(F, b.center), "radius": jsonable(b.radius), "hyperplane": b.hyperplane}


def _arena(F, A):
    return {k: _ball(F, getattr(A, k)) for k in ("attract", "repel", "attract_inv", "repel_inv")}


# -- command handlers ----------------------------------------------------------------------------

def cmd_fg(args):
    G = load_subgroup(args.files[0])
    op = args.op
    if op == "contains":
        if not args.word:
            raise InputError("--word is required")
        w = _word(args.word, G.rank, "--word")
        raise Verdict(TRUE if stallings.contains(G, w) else FALSE,
                      {"subgroup": G, "word": w, "contains": stallings.contains(G, w)})
    if op == "intersect":
        if len(args.files) < 2:
            raise InputError("intersect needs two subgroup files")
        H = stallings.intersect_all([G] + [load_subgroup(p) for p in args.files[1:]])
        return {"intersection": H, "trivial": stallings.rank(H) == 0,
                "index": jsonable(stallings.index(H))}
    if op == "index":
        return {"index": jsonable(stallings.index(G))}
    if op == "rank":
        return {"rank": stallings.rank(G)}
    if op == "basis":
        return {"basis": stallings.basis(G)}
    if op == "conjugate":
        if not args.word:
            raise InputError("--word is required")
        g = _word(args.word, G.rank, "--word")
        return {"conjugate": stallings.conjugate_subgroup(G, g), "by": g}
    if op == "equal":
        if len(args.files) < 2:
            raise InputError("equal needs two subgroup files")
        ok = stallings.equal(G, load_subgroup(args.files[1]))
        raise Verdict(TRUE if ok else FALSE, {"equal": ok})
    raise InputError(f"unknown fg operation {op}")


def cmd_chabauty(args):
    G = load_subgroup(args.files[0])
    if args.op == "signature":
        sig = chabauty.ball_signature(G, args.radius)
        return {"radius": args.radius, "words": list(sig.words)}
    if len(args.files) < 2:
        raise InputError(f"{args.op} needs two subgroup files")
    H = load_subgroup(args.files[1])
    if args.op == "dist":
        return {"distance": chabauty.chabauty_dist(G, H, args.radius), "rmax": args.radius}
    if args.op == "env":
        ok = chabauty.env_contains(G, H)
        raise Verdict(TRUE if ok else FALSE, {"contains": ok})
    raise InputError(f"unknown chabauty operation {args.op}")


def _irs_out(mu):
    return {"atoms": [{"subgroup": G, "weight": w} for G, w in mu.atoms]}


def cmd_irs(args):
    op, files = args.op, args.files
    if op == "build":
        A = action_from(load_json(files[0]), files[0])
        return _irs_out(irs.stabilizer_irs(A))
    mu = irs_from(load_json(files[0]), files[0])
    try:
        if op == "restrict":
            return _irs_out(irs.restrict(mu, load_subgroup(files[1])))
        if op == "induce":
            return _irs_out(irs.induce(mu, load_subgroup(files[1])))
        if op == "intersect":
            return _irs_out(irs.intersect_irs(mu, irs_from(load_json(files[1]), files[1])))
        if op == "env":
            m = irs.env_measure(mu, load_subgroup(files[1]))
            raise Verdict(TRUE if m > 0 else FALSE, {"env_measure": m, "essential": m > 0})
        if op == "cover":
            fam = [load_subgroup(p) for p in files[1:]]
            ok, wit = irs.check_cover(mu, fam)
            raise Verdict(TRUE if ok else FALSE, {"covers": ok, "uncovered_atom": wit})
        if op == "condition":
            if args.max_index is None:
                raise InputError("--max-index is required")
            k = args.max_index
            try:
                mass, nu = irs.condition(mu, lambda G: stallings.index(G) <= k)
            except irs.NullEventError:
                raise Verdict(FALSE, {"event": f"index <= {k}", "mass": Fraction(0)})
            return {"event": f"index <= {k}", "mass": mass, **_irs_out(nu)}
    except (IndexError, stallings.InfiniteIndexError, irs.IRSError) as exc:
        if isinstance(exc, IndexError):
            raise InputError(f"irs {op}: missing input file")
        raise InputError(f"irs {op}: {exc}")
    raise InputError(f"unknown irs operation {op}")


def cmd_stabtop(args):
    groups = [load_subgroup(p) for p in args.files]
    try:
        if args.op == "intersect-element":
            v, trace = stabtop.intersection_element(groups, args.budget)
            return {"element": v, "trace": trace}
        if args.op == "independent":
            wit = stabtop.independent_tuple(groups)
            return {"witness": wit}
        if args.op == "commutator":
            if len(groups) != 2 or not args.d1 or not args.d2:
                raise InputError("commutator needs two subgroup files, --d1 and --d2")
            r = groups[0].rank
            n1, n2, v = stabtop.commutator_in_intersection(groups[0], groups[1], _word(args.d1, r, "--d1"),
                                                           _word(args.d2, r, "--d2"), args.budget)
            return {"n1": n1, "n2": n2, "element": v}
        if args.op == "subbasis-check":
            ok = stabtop.in_recurrent_subbasis(groups[0], groups[1:])
            raise Verdict(TRUE if ok else FALSE, {"in_subbasis": ok})
    except stabtop.BoundExhaustedError as exc:
        raise Verdict(INCONCLUSIVE, {"exhausted": str(exc)})
    except (stallings.InfiniteIndexError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"stabtop {args.op}: {exc}")
    raise InputError(f"unknown stabtop operation {args.op}")


def _points(text, S):
    if text is None:
        raise InputError("--A is required")
    try:
        pts = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--A: expected comma-separated integers, got {text!r}")
    if any(not 0 <= x < S.n for x in pts):
        raise InputError(f"--A: points must lie in 0..{S.n - 1}")
    return pts


def cmd_recur(args):
    S = system_from(load_json(args.files[0]), args.files[0])
    A = _points(args.A, S)
    try:
        if args.op == "tower":
            T = recurrence.build_tower(S, A)
            return {"base": T.base, "columns": {str(m): V for m, V in T.returns.items()},
                    "height": T.height, "tail_masses": T.tail_masses(S)}
        eps = _rational(args.eps, "--eps") if args.eps is not None else None
        if eps is None:
            raise InputError("--eps is required")
        if args.op == "bound":
            return {"n": recurrence.recurrence_bound(S, A, eps), "eps": eps}
        if args.op == "verify":
            if args.n is None:
                raise InputError("--n is required")
            ok = recurrence.verify_bound(S, A, args.n, range(args.N_max + 1), eps)
            raise Verdict(TRUE if ok else FALSE, {"holds": ok, "n": args.n, "N_max": args.N_max, "eps": eps})
    except recurrence.RecurrenceError as exc:
        raise InputError(f"recur {args.op}: {exc}")
    raise InputError(f"unknown recur operation {args.op}")


def cmd_projdyn(args):
    op = args.op
    if op in ("cartan", "contract", "proximal", "fixdata"):
        F, g = matrix_file(args.files[0], args)
        if op == "cartan":
            cd = pd.cartan(F, g)
            return {"values": [jsonable(x) for x in cd.values], "top": _strs(F, cd.top),
                    "functional": _strs(F, cd.functional)}
        if op == "contract":
            try:
                eps, v, f = pd.contraction_data(F, g, args.c)
            except pd.NotContractingError as exc:
                raise Verdict(FALSE, {"not_contracting": str(exc)})
            e = _rational(args.eps, "--eps") if args.eps is not None else eps
            e = float(e) if F.kind == "real" else e
            ok, wit = pd.is_contracting(F, g, e, v, f, args.budget, args.seed)
            raise Verdict(TRUE if ok else FALSE, {"eps_est": eps, "eps_checked": e, "v": _strs(F, v),
                                                   "H": _strs(F, f), "mode": "SAMPLED",
                                                   "witness": None if wit is None else _strs(F, wit)})
        if op == "proximal":
            r = _num(F, args.r, "--r")
            e = _num(F, args.eps, "--eps")
            try:
                cert = pd.is_very_proximal(F, g, r, e, args.budget, args.seed)
            except ValueError as exc:
                raise InputError(str(exc))
            out = {"certified": cert.certified, "mode": cert.mode, "r": cert.r, "eps": cert.eps,
                   "both_directions": cert.both_directions, "margins": cert.margins, "reason": cert.reason,
                   "v": None if cert.v is None else _strs(F, cert.v),
                   "H": None if cert.H is None else _strs(F, cert.H),
                   "witness": None if cert.witness is None else _strs(F, cert.witness)}
            raise Verdict(TRUE if cert.certified else FALSE, out)
        try:
            v, H = pd.canonical_fixed_data(F, g, args.tolerance)
        except pd.NoConvergenceError as exc:
            raise Verdict(INCONCLUSIVE, {"no_convergence": str(exc)})
        except pd.NotContractingError as exc:
            raise Verdict(FALSE, {"not_contracting": str(exc)})
        return {"v": _strs(F, v), "H": _strs(F, H)}
    if op == "pingpong":
        return _pingpong(args)
    if op == "synthesize":
        return _synthesize(args)
    if op == "family":
        return _family(args)
    raise InputError(f"unknown projdyn operation {op}")


def _num(F, x, where):
    if x is None:
        raise InputError(f"{where} is required")
    q = _rational(x, where)
    return float(q) if F.kind == "real" else q


def _pingpong(args):
    path = args.files[0]
    doc = load_json(path)
    _keys(doc, ("field", "n", "matrices", "arenas"), ("field", "n", "matrices"), path)
    F = _field(doc["field"], args, path)
    n = int(doc["n"])
    mats = [_matrix(F, n, m, f"{path}.matrices[{i}]") for i, m in enumerate(doc["matrices"])]
    arenas = doc.get("arenas")
    if arenas and any("arcs" in a for a in arenas):
        if n != 2 or F.kind != "real":
            raise InputError(f"{path}: arc arenas need a real 2x2 input")
        items = []
        for i, (m, a) in enumerate(zip(doc["matrices"], arenas)):
            arcs = a["arcs"]
            try:
                arena = pp.ArcArena(pp.Arc(*(_point(F, x) for x in arcs["plus"])),
                                    pp.Arc(*(_point(F, x) for x in arcs["minus"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"{path}.arenas[{i}]: {exc}")
            items.append((tuple(tuple(_rational(x, path) for x in row) for row in m), arena))
        try:
            res = pd.pingpong_certify(F, items)
        except pd.OverlapError as exc:
            raise Verdict(FALSE, {"overlap": str(exc), "where": exc.where, "margin": exc.margin})
        raise Verdict(TRUE if res.certified else FALSE,
                      {"certified": res.certified, "mode": "EXACT", "reason": res.reason,
                       "checks": len(res.margins)})
    try:
        items = [(g, pd.bound_arena(F, g, args.tolerance)) for g in mats]
    except (pd.NotContractingError, pd.NoConvergenceError) as exc:
        raise Verdict(INCONCLUSIVE, {"no_arena": str(exc)})
    try:
        res = pd.pingpong_certify(F, items, args.budget, args.seed)
    except pd.OverlapError as exc:
        raise Verdict(FALSE, {"overlap": str(exc), "where": exc.where, "margin": exc.margin})
    raise Verdict(TRUE if res.certified else FALSE,
                  {"certified": res.certified, "modes": res.modes, "margins": res.margins,
                   "arenas": [_arena(F, A) for _, A in items], "reason": res.reason})


def _synthesize(args):
    path = args.files[0]
    doc = load_json(path)
    names = ("b_p", "b_q", "x", "y", "gamma")
    _keys(doc, ("field", "n", "l_max") + names, ("field", "n", "b_p", "b_q", "gamma"), path)
    F = _field(doc["field"], args, path)
    n = int(doc["n"])
    M = {k: _matrix(F, n, doc[k], f"{path}.{k}") if k in doc else F.identity(n) for k in names}
    l_max = int(doc.get("l_max", 8))
    try:
        res = pd.synthesize_coset_element(F, M["b_p"], M["b_q"], M["x"], M["y"], M["gamma"], range(0, l_max + 1))
    except pd.DegeneratePositionError as exc:
        raise Verdict(FALSE, {"degenerate_position": str(exc)})
    except pd.RangeExhaustedError as exc:
        raise Verdict(INCONCLUSIVE, {"range_exhausted": str(exc)})
    return {"l1": res.l1, "l2": res.l2, "f": _strs(F, res.element), "margins": res.margins,
            "arena": _arena(F, res.arena), "rejected": [[list(p), why] for p, why in res.skipped]}


def _family(args):
    path = args.files[0]
    doc = load_json(path)
    _keys(doc, ("field", "n", "generators", "groups", "requests"),
          ("field", "n", "generators", "groups", "requests"), path)
    F = _field(doc["field"], args, path)
    n = int(doc["n"])
    mats = [_matrix(F, n, m, f"{path}.generators[{i}]") for i, m in enumerate(doc["generators"])]
    r = len(mats)
    groups, requests = [], []
    for i, g in enumerate(doc["groups"]):
        _keys(g, ("generators", "b"), ("generators", "b"), f"{path}.groups[{i}]")
        groups.append(([_word(w, r, f"{path}.groups[{i}]") for w in g["generators"]], _word(g["b"], r, f"{path}.groups[{i}].b")))
    for i, q in enumerate(doc["requests"]):
        _keys(q, ("p", "q", "gamma"), ("p", "q", "gamma"), f"{path}.requests[{i}]")
        if not (0 <= int(q["p"]) < len(groups) and 0 <= int(q["q"]) < len(groups)):
            raise InputError(f"{path}.requests[{i}]: group index out of range")
        requests.append((int(q["p"]), int(q["q"]), _word(q["gamma"], r, f"{path}.requests[{i}].gamma")))
    fam = pd.double_coset_free_family(F, mats, groups, requests, budget=args.budget if args.budget is not None else 4)
    out = {"certified": fam.certified, "stallings_rank": fam.stallings_rank,
           "elements": [{"p": e.p, "q": e.q, "gamma": e.gamma, "x": e.x, "y": e.y, "word": e.word,
                         "l1": e.l1, "l2": e.l2} for e in fam.elements],
           "failures": [{"request": list(req), "reason": why} for req, why in fam.failures]}
    raise Verdict(TRUE if fam.certified else INCONCLUSIVE, out)


HANDLERS = {"fg": cmd_fg, "chabauty": cmd_chabauty, "irs": cmd_irs, "stabtop": cmd_stabtop,
            "recur": cmd_recur, "projdyn": cmd_projdyn}

OPS = {
    "fg": ["contains", "intersect", "index", "rank", "basis", "conjugate", "equal"],
    "chabauty": ["dist", "signature", "env"],
    "irs": ["build", "restrict", "induce", "intersect", "env", "cover", "condition"],
    "stabtop": ["intersect-element", "independent", "commutator", "subbasis-check"],
    "recur": ["tower", "bound", "verify"],
    "projdyn": ["cartan", "contract", "proximal", "fixdata", "pingpong", "synthesize", "family"],
}


def _global_flags(parser, defaults=True):
    # subcommands repeat the flags with suppressed defaults so that values
    # given before the subcommand are not reset by it
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--precision", type=int, default=d(None), help="p-adic digits")
    parser.add_argument("--tolerance", type=float, default=d(None), help="real comparison tolerance")
    parser.add_argument("--budget", type=int, default=d(None), help="sampling budget or search bound")
    parser.add_argument("--out", default=d(None), help="write the report here instead of stdout")
    parser.add_argument("--no-timestamp", action="store_true", default=d(False))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, defaults=False)
    parser = argparse.ArgumentParser(prog="subdyn")
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, ops in OPS.items():
        p = sub.add_parser(cmd, parents=[common])
        p.add_argument("op", choices=ops)
        p.add_argument("files", nargs="+")
        if cmd in ("fg",):
            p.add_argument("--word")
        if cmd == "chabauty":
            p.add_argument("--radius", type=int, default=6)
        if cmd == "irs":
            p.add_argument("--max-index", dest="max_index", type=int)
        if cmd == "stabtop":
            p.add_argument("--d1")
            p.add_argument("--d2")
        if cmd == "recur":
            p.add_argument("--A")
            p.add_argument("--eps")
            p.add_argument("--n", type=int)
            p.add_argument("--N-max", dest="N_max", type=int, default=50)
        if cmd == "projdyn":
            p.add_argument("--c", type=float, default=pd.DEFAULT_C)
            p.add_argument("--r")
            p.add_argument("--eps")
    return parser


def _constants(args):
    return {"c": pd.DEFAULT_C, "c1": pd.DEFAULT_C1, "c2": pd.DEFAULT_C2,
            "c_used": getattr(args, "c", None), "precision": args.precision,
            "tolerance": args.tolerance, "budget": args.budget}


VERDICT_NAMES = {TRUE: "true", FALSE: "false", INCONCLUSIVE: "inconclusive", INPUT_ERROR: "input_error"}


def run(argv=None):
    """Parse, dispatch and return (exit code, report dict)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else INPUT_ERROR
        return (INPUT_ERROR if code else 0), None
    if args.budget is None and args.command == "projdyn" and args.op in ("contract", "proximal", "pingpong"):
        args.budget = 2000
    report = {"tool": "subdyn", "version": __version__, "command": [args.command, args.op] + args.files,
              "seed": args.seed, "constants": _constants(args)}
    try:
        result = HANDLERS[args.command](args)
        code = TRUE
    except Verdict as v:
        code, result = v.code, v.result
    except InputError as exc:
        code, result = INPUT_ERROR, {"error": str(exc), "where": exc.where}
    report["verdict"] = VERDICT_NAMES[code]
    report["result"] = jsonable(result)
    if not args.no_timestamp:
        report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return code, report, args


def main(argv=None):
    out = run(argv)
    if out[1] is None:
        return out[0]
    code, report, args = out
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
