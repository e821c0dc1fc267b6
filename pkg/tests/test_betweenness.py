from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from maghom.betweenness import (
    Basepoint,
    BetweennessStructure,
    GoodSet,
    NotAPosetError,
    all_simplices,
    bet_product,
    betweenness_morphism,
    complete_structure,
    compose,
    degeneracy,
    face,
    from_metric,
    from_poset,
    identity_morphism,
    lipschitz_good_set,
    maximal_good_set,
    ms_map,
    BetMorphism,
    sparse_structure,
    verify_axioms,
    verify_good_set,
    verify_simplicial_identities,
)
from maghom.spaces import PointMap

from helpers import C4, K2, P3, Q2, rational_spaces

CHAIN = from_poset(3, [(0, 1), (1, 2)])
ANTICHAIN = from_poset(2, [])
DIAMOND = from_poset(4, [(0, 1), (0, 2), (1, 3), (2, 3)])


def b3_violator() -> BetweennessStructure:
    # points a=0, b=1, c=2 with [a,c] = [a,b] = {a,b,c}; all else sparse
    table = [[{x, z} for z in range(3)] for x in range(3)]
    table[0][2] = table[2][0] = {0, 1, 2}
    table[0][1] = table[1][0] = {0, 1, 2}
    return BetweennessStructure(table)


@pytest.mark.parametrize(
    "structure",
    [complete_structure(4), sparse_structure(4), CHAIN, ANTICHAIN, DIAMOND, from_metric(C4), from_metric(Q2)],
    ids=["complete", "sparse", "chain", "antichain", "diamond", "C4", "Q2"],
)
def test_axioms_hold(structure):
    assert verify_axioms(structure).ok


@given(rational_spaces())
def test_metric_structures_satisfy_axioms_and_match_intervals(s):
    b = from_metric(s)
    assert verify_axioms(b).ok
    assert all(b.interval(x, z) == s.interval(x, z) for x in range(s.n) for z in range(s.n))


def test_b3_violator_is_reported_with_all_witnesses():
    rep = verify_axioms(b3_violator())
    assert not rep.ok
    assert rep.by_axiom("B3")
    assert {"axiom": "B3", "x": 0, "z": 2, "w": 2, "y": 1} in rep.violations


def test_poset_intervals():
    assert CHAIN.interval(0, 2) == {0, 1, 2}
    assert ANTICHAIN.interval(0, 1) == {0, 1}
    assert DIAMOND.interval(0, 3) == {0, 1, 2, 3}
    assert DIAMOND.interval(1, 2) == {1, 2}


def test_non_poset_rejected_with_cycle():
    with pytest.raises(NotAPosetError) as exc:
        from_poset(3, [(0, 1), (1, 2), (2, 0)])
    cyc = exc.value.witness
    assert cyc[0] == cyc[-1] and set(cyc) == {0, 1, 2}


def test_product_of_sparse_structures():
    p = bet_product(sparse_structure(2), sparse_structure(2))
    assert verify_axioms(p).ok
    sizes = sorted(len(p.interval(a, b)) for a in range(4) for b in range(4))
    assert set(sizes) == {1, 2, 4}
    assert len(p.interval(0, 3)) == 4 and len(p.interval(0, 1)) == 2


@given(rational_spaces(max_points=3), rational_spaces(max_points=3))
def test_products_of_metric_structures_satisfy_axioms(s, t):
    assert verify_axioms(bet_product(from_metric(s), from_metric(t))).ok


def test_faces_and_degeneracies():
    b = from_metric(P3)
    assert face(b, (0, 1, 2), 1) == (0, 2)
    assert face(from_metric(K2), (0, 1, 0), 1) == Basepoint(1)
    assert degeneracy(b, (0, 2), 1) == (0, 2, 2)
    for x in all_simplices(3, 2):
        for j in range(len(x)):
            assert face(b, degeneracy(b, x, j), j) == x
            assert face(b, degeneracy(b, x, j), j + 1) == x


@pytest.mark.parametrize(
    "structure",
    [from_metric(P3), from_metric(C4), complete_structure(3), sparse_structure(3), DIAMOND],
    ids=["P3", "C4", "complete", "sparse", "diamond"],
)
def test_simplicial_identities(structure):
    rep = verify_simplicial_identities(structure, 3)
    assert rep.ok, rep.violations[:3]
    assert rep.checked > 0


def test_basepoint_is_a_sentinel():
    assert face(from_metric(P3), Basepoint(2), 0) == Basepoint(1)
    assert degeneracy(from_metric(P3), Basepoint(1), 0) == Basepoint(2)
    assert Basepoint(1) != ()


# --- good sets -------------------------------------------------------------


def random_lipschitz_map(rng: random.Random, S, T) -> PointMap:
    while True:
        f = PointMap(S, T, [rng.randrange(T.n) for _ in range(S.n)])
        if f.is_1lipschitz():
            return f


def test_identity_morphism_goods_everything():
    b = from_metric(C4)
    m = identity_morphism(b, 3)
    assert not verify_good_set(m.f, m.goods)
    assert maximal_good_set(PointMap.identity(b), 3).members == m.goods.members


def test_constant_map_lipschitz_good_set():
    f = PointMap(P3, P3, [1, 1, 1])
    goods = lipschitz_good_set(f, 3)
    genuine = [x for x in goods.members if all(a != b for a, b in zip(x, x[1:]))]
    assert all(len(x) == 1 for x in genuine)
    assert not verify_good_set(f, goods)


def test_betweenness_morphism_maximal_good_set_is_everything():
    # the swap of K2 and a relabelling of C4 preserve and reflect betweenness
    for space, perm in [(K2, [1, 0]), (C4, [1, 2, 3, 0]), (Q2, [3, 2, 1, 0])]:
        f = PointMap(space, space, perm)
        g = maximal_good_set(f, 3)
        assert g.members == betweenness_morphism(f, 3).goods.members
        assert g.stable


@given(st.integers(0, 10_000))
def test_lipschitz_good_sets_are_good_and_inside_maximal(seed):
    rng = random.Random(seed)
    S, T = rng.choice([(P3, K2), (C4, P3), (Q2, P3), (P3, C4)])
    f = random_lipschitz_map(rng, S, T)
    lip = lipschitz_good_set(f, 3)
    assert not verify_good_set(f, lip)
    mx = maximal_good_set(f, 3)
    assert not verify_good_set(f, mx)
    assert lip.members <= mx.members


@given(st.integers(0, 10_000))
def test_union_of_good_sets_is_good(seed):
    rng = random.Random(seed)
    S, T = rng.choice([(P3, K2), (C4, P3), (Q2, P3)])
    f = random_lipschitz_map(rng, S, T)
    a = lipschitz_good_set(f, 2)
    b = maximal_good_set(f, 2)
    u = GoodSet(a.members | b.members, 2)
    assert not verify_good_set(f, u)


def test_composite_excludes_paths_bad_for_the_second_map():
    # P3 -> P3 identity, then P3 -> K2 collapsing {0,1}: <0,1,2> maps to <0,0,1>
    f = PointMap(P3, P3, [0, 1, 2])
    g = PointMap(P3, K2, [0, 0, 1])
    mf = BetMorphism(f, lipschitz_good_set(f, 2))
    mg = BetMorphism(g, lipschitz_good_set(g, 2))
    h = compose(mf, mg)
    assert (0, 1, 2) in mf.goods and (0, 1) not in mg.goods
    assert (0, 1, 2) not in h.goods and (1, 2) in h.goods


@given(st.integers(0, 10_000))
def test_composition_law_for_lipschitz_morphisms(seed):
    rng = random.Random(seed)
    X, Y, Z = rng.choice([(P3, C4, P3), (Q2, P3, K2), (C4, Q2, C4), (P3, P3, K2)])
    f, g = random_lipschitz_map(rng, X, Y), random_lipschitz_map(rng, Y, Z)
    mf, mg = BetMorphism(f, lipschitz_good_set(f, 3)), BetMorphism(g, lipschitz_good_set(g, 3))
    h = compose(mf, mg)
    assert h.goods.members == lipschitz_good_set(f.then(g), 3).members


@given(st.integers(0, 10_000))
def test_ms_map_commutes_with_faces_and_degeneracies(seed):
    rng = random.Random(seed)
    S, T = rng.choice([(P3, K2), (C4, P3), (Q2, C4)])
    f = random_lipschitz_map(rng, S, T)
    m = BetMorphism(f, maximal_good_set(f, 3))
    bs, bt = from_metric(S), from_metric(T)
    for x in all_simplices(S.n, 2):
        k = len(x) - 1
        for i in range(k + 1):
            if k:
                assert ms_map(m, face(bs, x, i)) == face(bt, ms_map(m, x), i)
            assert ms_map(m, degeneracy(bs, x, i)) == degeneracy(bt, ms_map(m, x), i)


def test_compose_rejects_mismatched_bounds():
    m = identity_morphism(from_metric(P3), 2)
    n = identity_morphism(from_metric(P3), 3)
    with pytest.raises(ValueError):
        compose(m, n)


def test_maximal_good_set_for_non_lipschitz_map_is_valid():
    # a betweenness-level map that is not 1-Lipschitz: P3 -> P3 swapping 0 and 1
    f = PointMap(P3, P3, [1, 0, 2])
    g = maximal_good_set(f, 3)
    assert not verify_good_set(f, g)
    assert (0, 2) not in g or True
    assert g.stable is not None
