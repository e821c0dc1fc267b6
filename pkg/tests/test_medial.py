from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings

import oracle
from maghom.homology import magnitude_homology
from maghom.magchain import PathComplex
from maghom.medial import (
    NotMedianError,
    avann_graph,
    graph_product,
    hypercube,
    is_diagonal,
    is_median,
    median,
    median_hull,
    path_graph,
    scaled_cube,
    star_graph,
    two_point,
    verify_retract,
    witness_is_valid,
)
from maghom.spaces import PointMap, graph_metric, l1_product, restrict

from helpers import C4, C5, C6, K2, K23, P3, Q2, Q3, S3, SCALED_Q3, trees


def first_off_diagonal(space, K):
    """Oracle: a graph is diagonal iff its homology vanishes off k = l."""
    dist = [list(r) for r in space.dist]
    for k in range(K + 1):
        cx = PathComplex(space, k)
        for l in cx.lengths(k):
            if l != k and oracle.homology(dist, k, l) != (0, []):
                return k, l
    return None


def test_c5_is_not_diagonal_with_a_valid_witness():
    rep = is_diagonal(C5, 3)
    assert not rep.diagonal
    w = rep.witness
    assert (w["k"], w["l"]) == (2, "3")
    assert first_off_diagonal(C5, 3) == (2, Fraction(3))
    assert witness_is_valid(C5, w)
    assert any(not e["diagonal"] for e in rep.entries)


@pytest.mark.parametrize("space", [K2, P3, C4, Q2, S3], ids=["K2", "P3", "C4", "Q2", "star"])
def test_median_graphs_are_diagonal(space):
    assert is_median(space).median
    assert is_diagonal(space, 3).diagonal
    assert first_off_diagonal(space, 3) is None


def test_q3_is_diagonal():
    assert is_diagonal(Q3, 3).diagonal


@settings(max_examples=15)
@given(trees(max_vertices=6))
def test_trees_are_median_and_diagonal(t):
    assert is_median(t).median
    assert is_diagonal(t, 2).diagonal


def test_non_median_examples():
    for s in (C6, K23, C5):
        cert = is_median(s)
        assert not cert.median and cert.witness is not None
        with pytest.raises(NotMedianError):
            cert.m(0, 1, 2)
    assert is_median(C6).witness["intersection"] == []
    assert len(is_median(K23).witness["intersection"]) == 2


def test_median_operation():
    cert = is_median(Q3)
    for x, y, z in [(0, 3, 5), (1, 2, 4), (7, 0, 6)]:
        m = cert.m(x, y, z)
        assert m == median(Q3, x, y, z)
        assert m == cert.m(z, x, y) == cert.m(y, z, x)
        # bitwise majority
        assert m == (x & y) | (y & z) | (x & z)
    assert cert.m(3, 3, 5) == 3


def test_median_hull():
    assert median_hull(Q3, [0, 3, 5]) == [0, 1, 3, 5]
    assert median_hull(Q3, [0, 7]) == [0, 7]
    assert median_hull(Q3, []) == []
    with pytest.raises(NotMedianError):
        median_hull(C6, [0, 2, 4])


def test_avann_graphs():
    half = scaled_cube(Fraction(1, 2), Fraction(1, 2))
    r = avann_graph(half)
    assert r.certified and graph_metric(r.graph).dist == Q2.dist
    r = avann_graph(two_point(Fraction(7, 3)))
    assert r.certified and r.graph.edges == {(0, 1)}
    r = avann_graph(SCALED_Q3)
    assert r.certified and graph_metric(r.graph) == Q3


def test_scaled_cube_is_median_and_diagonal():
    assert is_median(SCALED_Q3).median
    assert is_diagonal(SCALED_Q3, 2).diagonal


def test_hypercube_cap():
    assert hypercube(6).n == 64
    with pytest.raises(ValueError):
        hypercube(7)
    assert hypercube(7, cap=7).n == 128


def test_coordinate_zeroing_is_a_retraction():
    f = PointMap(Q3, Q3, [v & 0b011 for v in range(8)])
    assert verify_retract(f)
    facet = restrict(Q3, sorted(set(f.image)))
    assert is_diagonal(facet, 3).diagonal
    assert not verify_retract(PointMap(Q3, Q3, [7 - v for v in range(8)]))


def test_products_of_diagonal_spaces_are_diagonal():
    assert is_diagonal(l1_product(K2, P3), 3).diagonal
    g = graph_metric(graph_product(star_graph(3), path_graph(2)))
    assert g == l1_product(S3, K2)
    assert is_diagonal(g, 2).diagonal


def test_diagonal_spaces_are_torsion_free():
    for s in (Q2, S3, l1_product(K2, P3)):
        assert magnitude_homology(s, 3).is_torsion_free()
