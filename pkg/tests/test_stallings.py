import random

import pytest

from subdyn import stallings as S
from subdyn.randomgen import random_finite_index, random_subgroup
from subdyn.words import commutator, enumerate_ball, identity, parse_word, random_word


def W(s, r=2):
    return parse_word(s, r)


def sub(*gens, r=2):
    return S.from_generators([W(g, r) for g in gens], r)


def products_up_to(gens, k):
    """Brute force: every reduced product of <= k generators or inverses."""
    letters = list(gens) + [~g for g in gens]
    seen = {identity(gens[0].rank)}
    frontier = set(seen)
    for _ in range(k):
        frontier = {w * g for w in frontier for g in letters} - seen
        seen |= frontier
    return seen


def test_from_generators_examples():
    G = sub("a")
    assert G.num_vertices == 1 and G.edges() == [(0, 1, 0)]
    T = S.from_generators([], 2)
    assert T.num_vertices == 1 and T.edges() == []
    N = sub("aa", "b", "abA")
    assert N.num_vertices == 2 and S.index(N) == 2
    for g in ("aa", "b", "abA"):
        assert S.contains(N, W(g))


def test_contains_examples():
    assert S.contains(sub("a"), W("aaaaa"))
    assert not S.contains(sub("a"), W("b"))
    G = sub("aa", "b")
    assert not S.contains(G, W("abA"))
    assert W("abA") not in products_up_to([W("aa"), W("b")], 6)
    assert S.contains(G, identity(2))


def test_intersect_examples():
    assert S.rank(S.intersect(sub("a"), sub("b"))) == 0
    G = sub("ab", "baaB")
    assert S.equal(S.intersect(G, G), G)
    I = S.intersect(sub("aa", "b"), sub("aaa", "b"))
    assert S.contains(I, W("aaaaaa")) and S.contains(I, W("b"))
    assert not S.contains(I, W("aa"))
    # a^2 never shows up as a short product in <a^3, b>
    assert W("aa") not in products_up_to([W("aaa"), W("b")], 5)


def test_conjugate_examples():
    assert S.equal(S.conjugate_subgroup(sub("a"), identity(2)), sub("a"))
    assert S.equal(S.conjugate_subgroup(sub("b"), W("a")), sub("abA"))
    N = sub("aa", "b", "abA")
    assert S.equal(S.conjugate_subgroup(N, W("a")), N)
    assert S.is_normal(N)
    assert not S.is_normal(sub("a"))


def test_index_examples():
    assert S.index(sub("a", "b")) == 1
    assert S.index(sub("a")) == S.INFINITE
    assert S.index(sub("aa", "b", "abA")) == 2


def test_rank_basis_examples():
    T = S.trivial(2)
    assert S.rank(T) == 0 and S.basis(T) == []
    assert S.rank(sub("aa", "b", "abA")) == 3
    assert S.rank(sub("a", "baB")) == 2


def test_coset_action_examples():
    act = S.coset_action(S.whole(2))
    assert act.n == 1 and act.perms == ((1,), (1,))
    act = S.coset_action(sub("aa", "b", "abA"))
    assert act.perms == ((2, 1), (1, 2))
    act = S.coset_action(sub("aaa", "b", "abA", "aabAA"))
    a, b = act.perms
    assert b == (1, 2, 3)
    assert sorted(a) == [1, 2, 3] and all(a[i] != i + 1 for i in range(3))
    with pytest.raises(S.InfiniteIndexError):
        S.coset_action(sub("a"))


def test_coset_action_stabilizer_is_subgroup():
    rng = random.Random(3)
    for _ in range(30):
        G = random_finite_index(2, rng, 8)
        act = S.coset_action(G)
        for w in enumerate_ball(2, 5):
            x = 1
            for l in w.letters:
                p = act.perms[abs(l) - 1]
                x = p[x - 1] if l > 0 else p.index(x) + 1
            assert (x == 1) == S.contains(G, w)


def test_equal_examples():
    assert S.equal(sub("a"), sub("A"))
    assert not S.equal(sub("a"), sub("aa"))
    G = S.conjugate_subgroup(S.conjugate_subgroup(sub("b"), W("a")), W("A"))
    assert S.equal(G, sub("b"))


def test_canonical_key_agrees_with_equal():
    rng = random.Random(5)
    graphs = [random_subgroup(2, rng, 2, 3) for _ in range(60)]
    for G in graphs:
        for H in graphs[:20]:
            assert (G.key() == H.key()) == S.equal(G, H)


def test_intersection_oracle():
    rng = random.Random(7)
    ball = enumerate_ball(2, 8)
    for _ in range(20):
        G1, G2 = random_subgroup(2, rng), random_subgroup(2, rng)
        I = S.intersect(G1, G2)
        for w in ball:
            assert S.contains(I, w) == (S.contains(G1, w) and S.contains(G2, w))


def test_nielsen_schreier():
    rng = random.Random(11)
    for r in (2, 3):
        for _ in range(20):
            G = random_finite_index(r, rng, 10)
            assert S.rank(G) == S.index(G) * (r - 1) + 1


def test_conjugation_round_trip_and_basis():
    rng = random.Random(13)
    for _ in range(50):
        G = random_subgroup(2, rng)
        g = random_word(2, rng.randint(0, 5), rng)
        assert S.equal(S.conjugate_subgroup(S.conjugate_subgroup(G, g), ~g), G)
        B = S.basis(G)
        assert len(B) == S.rank(G)
        assert S.equal(S.from_generators(B, 2), G)
        assert G.is_core


def test_index_multiplicativity():
    rng = random.Random(17)
    checked = 0
    while checked < 20:
        K = random_finite_index(2, rng, 4)
        H = S.intersect(K, random_finite_index(2, rng, 4))
        assert S.is_subgroup(H, K)
        # relative index = number of H-cosets inside K, counted on the coset graph of H
        reps = S.coset_action(H).reps
        inside = sum(1 for w in reps if S.contains(K, w))
        assert S.index(H) == inside * S.index(K)
        checked += 1


def test_commutator_vs_cyclic():
    rng = random.Random(19)
    for _ in range(300):
        u = random_word(2, rng.randint(0, 4), rng)
        v = random_word(2, rng.randint(0, 4), rng)
        if rng.random() < 0.3:
            v = u ** rng.randint(-3, 3)
        cyclic = S.rank(S.from_generators([u, v], 2)) <= 1
        assert (not commutator(u, v)) == cyclic
