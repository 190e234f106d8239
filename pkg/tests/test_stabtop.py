import itertools
import math
import random

import pytest

from subdyn import stabtop as T
from subdyn import stallings as S
from subdyn.irs import conjugation_period
from subdyn.randomgen import random_element, random_finite_index
from subdyn.words import Word, commutator, identity, parse_word, power


def W(s, r=2):
    return parse_word(s, r)


def sub(*gens, r=2):
    return S.from_generators([W(g, r) for g in gens], r)


N_A = sub("aa", "b", "abA")
N_B = sub("bb", "a", "baB")
# index 3, not normal: stabilizer of a point under a -> (12), b -> (13)
K3 = S.from_permutations(2, [[2, 1, 3], [3, 2, 1]], 1)


def evaluate(formal, elems):
    out = identity(elems[0].rank)
    for lab in formal:
        d = elems[abs(lab) - 1]
        out = out * (d if lab > 0 else ~d)
    return out


def reduced_words(J, max_len):
    """Nonempty reduced words over J free letters, up to max_len."""
    letters = [x for i in range(1, J + 1) for x in (i, -i)]
    stack = [(x,) for x in letters]
    while stack:
        w = stack.pop()
        yield w
        if len(w) < max_len:
            stack.extend(w + (x,) for x in letters if x != -w[-1])


def test_commutator_example_normal_pair():
    n1, n2, v = T.commutator_in_intersection(N_A, N_B, W("b"), W("a"))
    assert (n1, n2) == (1, 1)
    assert v == commutator(W("b"), W("a"))
    assert S.contains(N_A, v) and S.contains(N_B, v)


def test_commutator_rejects_nonmember():
    with pytest.raises(ValueError):
        T.commutator_in_intersection(N_A, N_B, W("a"), W("a"))


def test_commutator_bound_exhausted_raises():
    with pytest.raises(T.BoundExhaustedError):
        T.commutator_in_intersection(N_A, N_A, W("b"), W("aa"), bound=0)


def test_commutator_random_periodic_and_guaranteed():
    rng = random.Random(7)
    for _ in range(25):
        D1 = random_finite_index(2, rng, max_index=6)
        D2 = random_finite_index(2, rng, max_index=6)
        d1 = random_element(D1, rng)
        d2 = random_element(D2, rng)
        if not d1 or not d2:
            continue
        P1, P2 = T.element_periods(D1, D2, d1, d2)
        n1, n2, v = T.commutator_in_intersection(D1, D2, d1, d2)
        assert n1 <= P1 and n2 <= P2
        assert S.contains(D1, v) and S.contains(D2, v)
        hits = set(T.commutator_hits(D1, D2, d1, d2, 2 * max(P1, P2)))
        assert (n1, n2) == min(hits)
        assert (P1, 1) in hits and (1, P2) in hits
        for a, b in hits:
            if a + P1 <= 2 * max(P1, P2):
                assert (a + P1, b) in hits
            if b + P2 <= 2 * max(P1, P2):
                assert (a, b + P2) in hits


def test_element_periods_multiple_of_conjugation_period():
    rng = random.Random(3)
    for _ in range(20):
        D1 = random_finite_index(2, rng, max_index=6)
        D2 = random_finite_index(2, rng, max_index=6)
        d1, d2 = random_element(D1, rng), random_element(D2, rng)
        if not d1 or not d2:
            continue
        P1, P2 = T.element_periods(D1, D2, d1, d2)
        assert P1 % conjugation_period(D2, d1) == 0
        assert P2 % conjugation_period(D1, d2) == 0


def test_independent_tuple_index_two():
    wit = T.independent_tuple([N_A, N_A, N_A])
    assert wit.rank_check == 3 == S.rank(wit.generated)
    for d in wit.elements:
        assert S.contains(N_A, d)


def test_independent_tuple_rejects_cyclic():
    with pytest.raises(ValueError):
        T.independent_tuple([sub("a"), N_A])


@pytest.mark.parametrize("family", [(N_A, N_B), (N_A, N_B, K3), (K3, K3, N_A, N_B)])
def test_independence_sound_short_words(family):
    wit = T.independent_tuple(list(family))
    J = len(family)
    for G, d in zip(family, wit.elements):
        assert S.contains(G, d)
    limit = 8 if J == 2 else 5
    for f in reduced_words(J, limit):
        assert evaluate(f, wit.elements)


def test_intersection_element_normal_pair():
    v, trace = T.intersection_element([N_A, N_B])
    assert v and S.contains(N_A, v) and S.contains(N_B, v)
    assert trace["form_ok"] and trace["J"] == 2


def test_intersection_element_random_families():
    rng = random.Random(11)
    for trial in range(12):
        J = 2 + trial % 3
        fam = []
        while len(fam) < J:
            G = random_finite_index(2, rng, max_index=5, min_index=2)
            fam.append(G)
        v, trace = T.intersection_element(fam)
        assert v
        assert all(S.contains(G, v) for G in fam)
        assert trace["form_ok"]
        inter = S.intersect_all(fam)
        assert S.rank(inter) >= 1 and S.contains(inter, v)


def test_intersection_element_infinite_index_rejected():
    with pytest.raises(S.InfiniteIndexError):
        T.intersection_element([N_A, sub("a", "bab")])


def test_filter_base_examples():
    ok, pair = T.filter_base_check([sub("a"), sub("b")])
    assert not ok and pair is not None
    assert T.filter_base_check([N_A])[0]
    conj = [S.conjugate_subgroup(K3, g) for g in S.coset_representatives(K3)]
    assert not T.filter_base_check(conj)[0]
    closed = conj + [S.intersect_all(c) for r in (2, 3) for c in itertools.combinations(conj, r)]
    assert T.filter_base_check(closed)[0]


def test_subbasis_examples():
    assert not T.in_recurrent_subbasis(K3, [])
    assert T.in_recurrent_subbasis(N_A, [N_A])
    core = S.intersect_all([S.conjugate_subgroup(K3, g) for g in S.coset_representatives(K3)])
    assert T.in_recurrent_subbasis(K3, [core])
    assert not T.in_recurrent_subbasis(K3, [K3])


def test_subbasis_conjugation_equivariant():
    rng = random.Random(5)
    for _ in range(15):
        D = random_finite_index(2, rng, max_index=5)
        H = [random_finite_index(2, rng, max_index=8) for _ in range(2)]
        g = random_element(S.whole(2), rng)
        Dg = S.conjugate_subgroup(D, g)
        Hg = [S.conjugate_subgroup(X, g) for X in H]
        assert T.in_recurrent_subbasis(D, H) == T.in_recurrent_subbasis(Dg, Hg)


def test_recurrence_certificate_hits_within_period():
    rng = random.Random(9)
    for _ in range(20):
        D = random_finite_index(2, rng, max_index=6)
        Sig = S.from_generators([random_element(D, rng)], 2)
        g = random_element(S.whole(2), rng)
        if not g:
            continue
        cert = T.recurrence_certificate(D, Sig, g)
        assert 1 <= cert.witness <= cert.period
        conj = S.conjugate_subgroup(Sig, power(~g, cert.witness))
        assert S.is_subgroup(conj, D)
