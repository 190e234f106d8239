"""Finitely generated subgroups of F_r as folded core graphs (Stallings automata).

A ``CoreGraph`` is stored in canonical form: vertices are numbered by a
breadth-first walk from the base vertex 0, visiting labels in the order
``1, -1, 2, -2, ...``.  Two core graphs describe the same subgroup exactly
when their canonical forms coincide, which makes ``key()`` usable for
hashing; ``equal`` still decides equality by mutual basis membership.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .words import Word, WordError, identity, invert, multiply, conjugate

INFINITE = float("inf")


class InfiniteIndexError(ValueError):
    """Raised when a finite-index subgroup was required."""


def _label_order(rank: int) -> list[int]:
    return [x for i in range(1, rank + 1) for x in (i, -i)]


def _fold(n: int, edges: Iterable[tuple[int, int, int]]) -> tuple[list[int], list[dict[int, int]]]:
    parent = list(range(n))
    adj: list[dict[int, int]] = [dict() for _ in range(n)]

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending: list[tuple[int, int]] = []

    def attach(u: int, lab: int, v: int) -> None:
        # u is a root; v any vertex
        t = adj[u].get(lab)
        if t is None:
            adj[u][lab] = v
        elif find(t) != find(v):
            pending.append((t, v))

    def drain() -> None:
        while pending:
            x, y = pending.pop()
            x, y = find(x), find(y)
            if x == y:
                continue
            if y < x:
                x, y = y, x
            parent[y] = x
            moved, adj[y] = adj[y], {}
            for lab, t in moved.items():
                attach(x, lab, t)

    for u, lab, v in edges:
        u, v = find(u), find(v)
        attach(u, lab, v)
        attach(v, -lab, u)
        drain()
    roots = [v for v in range(n) if find(v) == v]
    clean = [dict() for _ in range(n)]
    for v in roots:
        clean[v] = {lab: find(t) for lab, t in adj[v].items()}
    return roots, clean


def _prune_and_canonize(rank: int, roots: Sequence[int], adj: Sequence[dict[int, int]],
                        base: int) -> tuple[tuple[tuple[tuple[int, int], ...], ...]]:
    alive = set(roots)
    deg = {v: len(adj[v]) for v in alive}
    stack = [v for v in alive if v != base and deg[v] <= 1]
    while stack:
        v = stack.pop()
        if v not in alive or v == base or deg[v] > 1:
            continue
        alive.discard(v)
        for lab, t in adj[v].items():
            if t in alive:
                deg[t] -= 1
                if t != base and deg[t] <= 1:
                    stack.append(t)
    order = _label_order(rank)
    number = {base: 0}
    queue = deque([base])
    seq = [base]
    while queue:
        v = queue.popleft()
        for lab in order:
            t = adj[v].get(lab)
            if t is not None and t in alive and t not in number:
                number[t] = len(number)
                seq.append(t)
                queue.append(t)
    table = tuple(
        tuple(sorted((lab, number[t]) for lab, t in adj[v].items() if t in number))
        for v in seq
    )
    return table


@dataclass(frozen=True)
class CoreGraph:
    """Folded, base-pointed core graph; base vertex is 0."""

    rank: int
    table: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def num_vertices(self) -> int:
        return len(self.table)

    @cached_property
    def rows(self) -> tuple[dict[int, int], ...]:
        return tuple(dict(r) for r in self.table)

    def out(self, v: int) -> dict[int, int]:
        return dict(self.rows[v])

    def edges(self) -> list[tuple[int, int, int]]:
        """Positively labelled edges (u, label, v)."""
        return [(u, lab, v) for u, row in enumerate(self.table) for lab, v in row if lab > 0]

    @property
    def is_folded(self) -> bool:
        return True

    @property
    def is_core(self) -> bool:
        return all(len(row) >= 2 for row in self.table[1:])

    def key(self):
        return (self.rank, self.table)

    def __repr__(self) -> str:
        gens = ", ".join(str(w) for w in basis(self))
        return f"<{gens}>" if gens else "<e>"


def from_edges(rank: int, n: int, edges: Iterable[tuple[int, int, int]]) -> CoreGraph:
    """Fold an arbitrary labelled graph and return its core at vertex 0."""
    edges = list(edges)
    for _, lab, _ in edges:
        if lab <= 0 or lab > rank:
            raise WordError(f"label {lab} out of range for rank {rank}")
    roots, adj = _fold(n, edges)
    # merges keep the smaller index as root, so vertex 0 stays the base
    return CoreGraph(rank, _prune_and_canonize(rank, roots, adj, 0))


def from_generators(gens: Sequence[Word], rank: int | None = None) -> CoreGraph:
    if rank is None:
        if not gens:
            raise WordError("rank required for an empty generator list")
        rank = gens[0].rank
    edges = []
    n = 1
    for w in gens:
        if w.rank != rank:
            raise WordError(f"rank mismatch: {w.rank} vs {rank}")
        if not w:
            continue
        prev = 0
        for k, x in enumerate(w.letters):
            nxt = 0 if k == len(w) - 1 else n
            if nxt:
                n += 1
            edges.append((prev, x, nxt) if x > 0 else (nxt, -x, prev))
            prev = nxt
    return from_edges(rank, n, edges)


def trivial(rank: int) -> CoreGraph:
    return CoreGraph(rank, ((),))


def whole(rank: int) -> CoreGraph:
    return CoreGraph(rank, (tuple(sorted((x, 0) for x in _label_order(rank))),))


def _check(G: CoreGraph, rank: int) -> None:
    if G.rank != rank:
        raise WordError(f"rank mismatch: {G.rank} vs {rank}")


def read(G: CoreGraph, w: Word, start: int = 0) -> int | None:
    """Endpoint of the path reading ``w`` from ``start``, or None if it falls off."""
    rows = G.rows
    v = start
    for x in w.letters:
        v = rows[v].get(x)
        if v is None:
            return None
    return v


def contains(G: CoreGraph, w: Word) -> bool:
    _check(G, w.rank)
    return read(G, w) == 0


def is_subgroup(H: CoreGraph, G: CoreGraph) -> bool:
    """True iff H <= G."""
    _check(G, H.rank)
    return all(contains(G, b) for b in basis(H))


def equal(G1: CoreGraph, G2: CoreGraph) -> bool:
    return is_subgroup(G1, G2) and is_subgroup(G2, G1)


def intersect(G1: CoreGraph, G2: CoreGraph) -> CoreGraph:
    _check(G2, G1.rank)
    a, b = [dict(r) for r in G1.table], [dict(r) for r in G2.table]
    index = {(0, 0): 0}
    queue = deque([(0, 0)])
    edges = []
    while queue:
        p = queue.popleft()
        u, v = p
        for lab, t1 in a[u].items():
            t2 = b[v].get(lab)
            if t2 is None:
                continue
            q = (t1, t2)
            if q not in index:
                index[q] = len(index)
                queue.append(q)
            if lab > 0:
                edges.append((index[p], lab, index[q]))
    return from_edges(G1.rank, len(index), edges)


def intersect_all(graphs: Sequence[CoreGraph]) -> CoreGraph:
    out = graphs[0]
    for G in graphs[1:]:
        out = intersect(out, G)
    return out


def _tree_paths(G: CoreGraph) -> list[Word]:
    paths: list[Word | None] = [None] * G.num_vertices
    paths[0] = identity(G.rank)
    queue = deque([0])
    order = _label_order(G.rank)
    while queue:
        v = queue.popleft()
        row = dict(G.table[v])
        for lab in order:
            t = row.get(lab)
            if t is not None and paths[t] is None:
                paths[t] = multiply(paths[v], Word(G.rank, (lab,)))
                queue.append(t)
    return paths  # type: ignore[return-value]


def basis(G: CoreGraph) -> list[Word]:
    """Free basis read off a BFS spanning tree."""
    paths = _tree_paths(G)
    tree = set()
    seen = {0}
    queue = deque([0])
    order = _label_order(G.rank)
    while queue:
        v = queue.popleft()
        row = dict(G.table[v])
        for lab in order:
            t = row.get(lab)
            if t is not None and t not in seen:
                seen.add(t)
                tree.add((v, lab, t) if lab > 0 else (t, -lab, v))
                queue.append(t)
    out = []
    for u, lab, v in G.edges():
        if (u, lab, v) in tree:
            continue
        out.append(multiply(multiply(paths[u], Word(G.rank, (lab,))), invert(paths[v])))
    return out


def rank(G: CoreGraph) -> int:
    return len(G.edges()) - G.num_vertices + 1


def is_complete(G: CoreGraph) -> bool:
    return all(len(row) == 2 * G.rank for row in G.table)


def index(G: CoreGraph) -> int | float:
    """Number of cosets, or ``INFINITE``."""
    return G.num_vertices if is_complete(G) else INFINITE


def conjugate_subgroup(G: CoreGraph, g: Word) -> CoreGraph:
    """The subgroup g G g^-1."""
    _check(G, g.rank)
    if not g:
        return G
    return from_generators([conjugate(b, g) for b in basis(G)], G.rank)


def is_normal(G: CoreGraph) -> bool:
    from .words import generators
    return all(equal(conjugate_subgroup(G, s), G) for s in generators(G.rank))


@dataclass(frozen=True)
class CosetAction:
    """Right action of the generators on the cosets H\\F_r.

    ``perms[i][k]`` is the image of point ``k+1`` under generator ``i+1``
    (so points are 1-indexed in ``perms`` values); ``reps[k]`` is a word
    ``w`` with ``H w`` the coset numbered ``k+1``.
    """

    n: int
    perms: tuple[tuple[int, ...], ...]
    reps: tuple[Word, ...]


def coset_action(G: CoreGraph) -> CosetAction:
    if not is_complete(G):
        raise InfiniteIndexError("subgroup has infinite index")
    perms = tuple(
        tuple(dict(G.table[v])[i] + 1 for v in range(G.num_vertices))
        for i in range(1, G.rank + 1)
    )
    return CosetAction(G.num_vertices, perms, tuple(_tree_paths(G)))


def coset_representatives(G: CoreGraph) -> list[Word]:
    """Words g_i with F_r = union of g_i G (left cosets), for finite index G."""
    return [invert(w) for w in coset_action(G).reps]


def from_permutations(rank: int, perms: Sequence[Sequence[int]], point: int) -> CoreGraph:
    """Stabilizer of ``point`` (1-indexed) for a left action by permutations.

    ``perms[i][k-1]`` is the image of point ``k`` under generator ``i+1``.
    A word ``g = s_1...s_m`` acts as ``s_1(s_2(...s_m(x)))``, so reading it in
    the graph walks backwards along the permutations.
    """
    if len(perms) != rank:
        raise WordError(f"expected {rank} permutations, got {len(perms)}")
    n = len(perms[0])
    edges = []
    for i, p in enumerate(perms, start=1):
        inv = [0] * n
        for k, img in enumerate(p):
            inv[img - 1] = k
        for k in range(n):
            edges.append((k, i, inv[k]))
    # restrict to the orbit of point so folding never merges unrelated vertices
    orbit = {point - 1}
    queue = deque([point - 1])
    adj: dict[int, list[int]] = {}
    for u, _, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    while queue:
        v = queue.popleft()
        for t in adj.get(v, ()):
            if t not in orbit:
                orbit.add(t)
                queue.append(t)
    relabel = {v: k for k, v in enumerate(sorted(orbit, key=lambda x: (x != point - 1, x)))}
    sub = [(relabel[u], lab, relabel[v]) for u, lab, v in edges if u in orbit]
    return from_edges(rank, len(orbit), sub)
