"""Shared fixtures and hypothesis strategies."""
from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from maghom.medial import cycle_graph, hypercube, path_graph, random_tree, scaled_cube, star_graph
from maghom.spaces import FiniteGraph, FiniteSpace, graph_metric, l1_product

WEIGHTS = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(2, 3)]


def graph(g: FiniteGraph) -> FiniteSpace:
    return graph_metric(g)


K1 = graph(path_graph(1))
K2 = graph(path_graph(2))
P3 = graph(path_graph(3))
C4 = graph(cycle_graph(4))
C5 = graph(cycle_graph(5))
C6 = graph(cycle_graph(6))
Q2 = graph(hypercube(2))
Q3 = graph(hypercube(3))
S3 = graph(star_graph(3))
K23 = graph(FiniteGraph(5, [(a, b) for a in (0, 1) for b in (2, 3, 4)]))
SCALED_Q3 = scaled_cube(Fraction(1, 2), Fraction(2, 3), Fraction(5, 3))


def shortest_path_closure(n: int, w: dict) -> list[list[Fraction]]:
    d = [[Fraction(0) if i == j else w.get((min(i, j), max(i, j))) for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] is not None and d[k][j] is not None:
                    if d[i][j] is None or d[i][k] + d[k][j] < d[i][j]:
                        d[i][j] = d[i][k] + d[k][j]
    return d


@st.composite
def rational_spaces(draw, min_points: int = 1, max_points: int = 6) -> FiniteSpace:
    """Shortest-path metrics of random complete graphs with small rational weights.

    Small weight sets make ties, so many triples are collinear.
    """
    n = draw(st.integers(min_points, max_points))
    w = {(i, j): draw(st.sampled_from(WEIGHTS)) for i in range(n) for j in range(i + 1, n)}
    return FiniteSpace(shortest_path_closure(n, w))


@st.composite
def trees(draw, max_vertices: int = 7) -> FiniteSpace:
    n = draw(st.integers(1, max_vertices))
    return graph_metric(random_tree(n, draw(st.integers(0, 10_000))))
