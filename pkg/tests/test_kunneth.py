from __future__ import annotations

from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maghom.betweenness import from_poset
from maghom.kunneth import Staircase, chain_map_defect, cross_product, interleave, staircases, verify_kunneth
from maghom.magchain import enumerate_paths

from helpers import C5, K1, K2, P3, trees

small = st.integers(0, 4)


@given(small, small)
def test_staircase_count(n, l):
    ss = staircases(n, l)
    assert len(ss) == comb(n + l, n) == len(set(ss))


def test_staircase_signs():
    assert Staircase(("H", "V")).sign() == 1
    assert Staircase(("V", "H")).sign() == -1
    assert Staircase(("V", "V", "H")).sign() == 1
    assert Staircase(("V", "H", "V", "H")).sign() == -1
    assert [str(s) for s in staircases(1, 1)] == ["HV", "VH"]


def interior(s: Staircase):
    return range(1, len(s.moves))


@given(small, small)
def test_corner_flips_cancel(n, l):
    x, y = tuple(range(n + 1)), tuple(range(l + 1))
    for s in staircases(n, l):
        for m in interior(s):
            if s.index_kind(m).startswith("corner"):
                t = s.flip(m)
                p, q = interleave(x, y, s, l + 1), interleave(x, y, t, l + 1)
                assert p[:m] + p[m + 1:] == q[:m] + q[m + 1:]
                assert s.sign() == -t.sign()


@given(small, small)
def test_flat_and_wall_deletion_signs(n, l):
    # deleting a flat or a wall matches the factor face up to the Koszul sign
    for s in staircases(n, l):
        for m in interior(s):
            kind = s.index_kind(m)
            if kind == "flat":
                h = s.sigma_h(m)
                assert s.sign() * (-1) ** m == s.delete(m).sign() * (-1) ** h
            elif kind == "wall":
                v = s.sigma_v(m)
                assert s.sign() * (-1) ** m == s.delete(m).sign() * (-1) ** (n + v)


def test_cross_product_with_a_point_is_identity():
    for p in enumerate_paths(P3, 2):
        assert cross_product({p: 1}, {(0,): 1}, 1) == {p: 1}


@settings(max_examples=15)
@given(trees(max_vertices=4), trees(max_vertices=3))
def test_cross_product_is_a_chain_map(X, Y):
    for n in range(3):
        for p in enumerate_paths(X, n):
            for q in enumerate_paths(Y, 2 - n):
                assert chain_map_defect(X, Y, {p: 1}, {q: 1}) == {}


def test_cross_product_chain_map_on_k2_p3():
    for n in range(3):
        for m in range(3 - n):
            for p in enumerate_paths(K2, n):
                for q in enumerate_paths(P3, m):
                    assert chain_map_defect(K2, P3, {p: 1}, {q: 1}) == {}


@pytest.mark.parametrize("X,Y", [(K2, K2), (K2, P3), (C5, K2), (P3, K1)], ids=["K2xK2", "K2xP3", "C5xK2", "P3xpt"])
def test_kunneth_holds(X, Y):
    rep = verify_kunneth(X, Y, 2)
    assert rep.holds, rep.to_dict()
    assert all("cross_injective" not in r or r["cross_injective"] for r in rep.per_class)


def test_kunneth_for_betweenness_structures():
    chain = from_poset(2, [(0, 1)])
    rep = verify_kunneth(chain, chain, 2)
    assert rep.holds
    assert all(r["l"] is None for r in rep.per_class)
