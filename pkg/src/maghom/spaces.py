"""Finite metric spaces with exact rational distances.

Points are the integers ``0..n-1``.  Products index their points row-major:
point ``(i, j)`` of ``S x T`` has index ``i * T.n + j``; serialized paths
depend on this.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence


class InvalidSpaceError(ValueError):
    """The distance data does not describe a metric space."""


class DisconnectedGraphError(ValueError):
    def __init__(self, component: Sequence[int]):
        self.component = sorted(component)
        super().__init__(f"graph is disconnected; component {self.component} is unreachable from 0")


def to_rational(value) -> Fraction:
    """Exact rational from an int, a Fraction or a ``"p/q"`` string.

    Floats are rejected rather than rounded.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not distances")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(c in text for c in ".eE"):
            raise TypeError(f"decimal string {value!r} is not an exact rational")
        return Fraction(text)
    raise TypeError(f"distances must be exact rationals, got {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


class FiniteSpace:
    """A finite metric space; invalid distance matrices cannot be constructed."""

    graded = True

    def __init__(self, dist: Sequence[Sequence], labels: Sequence[str] | None = None):
        n = len(dist)
        rows = []
        for r in dist:
            if len(r) != n:
                raise InvalidSpaceError("distance matrix is not square")
            rows.append(tuple(to_rational(v) for v in r))
        self.dist: tuple[tuple[Fraction, ...], ...] = tuple(rows)
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise InvalidSpaceError("one label per point is required")
        self.labels = labels
        self._validate()

    def _validate(self) -> None:
        d, n = self.dist, self.n
        if n == 0:
            raise InvalidSpaceError("a space needs at least one point")
        for x in range(n):
            if d[x][x] != 0:
                raise InvalidSpaceError(f"d({x},{x}) = {d[x][x]} is not zero")
            for y in range(n):
                if d[x][y] != d[y][x]:
                    raise InvalidSpaceError(f"d({x},{y}) != d({y},{x})")
                if x != y and d[x][y] <= 0:
                    raise InvalidSpaceError(f"d({x},{y}) = {d[x][y]} is not positive")
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    if d[x][z] > d[x][y] + d[y][z]:
                        raise InvalidSpaceError(f"triangle inequality fails for ({x},{y},{z})")

    @property
    def n(self) -> int:
        return len(self.dist)

    def __len__(self) -> int:
        return self.n

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    @cached_property
    def _intervals(self) -> tuple[tuple[frozenset[int], ...], ...]:
        d, n = self.dist, self.n
        return tuple(
            tuple(frozenset(y for y in range(n) if d[x][y] + d[y][z] == d[x][z]) for z in range(n))
            for x in range(n)
        )

    def interval(self, x: int, z: int, strict: bool = False) -> frozenset[int]:
        iv = self._intervals[x][z]
        return iv - {x, z} if strict else iv

    def is_between(self, y: int, x: int, z: int) -> bool:
        """``y`` lies in ``[x, z]``."""
        return y in self._intervals[x][z]

    def path_length(self, path: Sequence[int]) -> Fraction:
        d = self.dist
        return sum((d[a][b] for a, b in zip(path, path[1:])), Fraction(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSpace):
            return NotImplemented
        return self.dist == other.dist

    def __hash__(self) -> int:
        return hash(self.dist)

    def __repr__(self) -> str:
        return f"FiniteSpace(n={self.n})"


@dataclass(frozen=True)
class FiniteGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        norm = set()
        for e in edges:
            a, b = e
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidSpaceError(f"edge {tuple(e)} out of range for {n} vertices")
            if a == b:
                raise InvalidSpaceError(f"self-loop at {a}")
            norm.add((min(a, b), max(a, b)))
        if n < 1:
            raise InvalidSpaceError("a graph needs at least one vertex")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(norm))

    def neighbours(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in sorted(self.edges):
            adj[a].append(b)
            adj[b].append(a)
        return adj


def graph_metric(g: FiniteGraph) -> FiniteSpace:
    """Shortest-path metric with unit edge weights."""
    adj = g.neighbours()
    rows = []
    for s in range(g.n):
        dist = [-1] * g.n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        if s == 0 and min(dist) < 0:
            raise DisconnectedGraphError([v for v in range(g.n) if dist[v] < 0])
        rows.append(dist)
    return FiniteSpace(rows)


def interval(s: FiniteSpace, x: int, z: int, strict: bool = False) -> frozenset[int]:
    return s.interval(x, z, strict)


def l1_product(s: FiniteSpace, t: FiniteSpace) -> FiniteSpace:
    """The l1 product, points indexed row-major."""
    pts = [(i, j) for i in range(s.n) for j in range(t.n)]
    dist = [[s.dist[a][c] + t.dist[b][e] for (c, e) in pts] for (a, b) in pts]
    labels = [f"({s.label(a)},{t.label(b)})" for (a, b) in pts]
    return FiniteSpace(dist, labels)


def product_index(i: int, j: int, second_size: int) -> int:
    return i * second_size + j


def restrict(s: FiniteSpace, subset: Iterable[int]) -> FiniteSpace:
    """Subspace with the ambient distance (not a re-derived graph distance).

    Points of the result are the elements of ``subset`` in increasing order.
    """
    pts = sorted(set(subset))
    if not pts:
        raise InvalidSpaceError("cannot restrict to an empty subset")
    for p in pts:
        if not 0 <= p < s.n:
            raise InvalidSpaceError(f"point {p} not in the space")
    return FiniteSpace([[s.dist[a][b] for b in pts] for a in pts], [s.label(p) for p in pts])


def one_point() -> FiniteSpace:
    return FiniteSpace([[0]])


def is_convex(s: FiniteSpace, subset: Iterable[int]) -> bool:
    """Every point between two points of ``subset`` lies in ``subset``."""
    A = set(subset)
    return all(s.interval(a, b) <= A for a in A for b in A)


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


class PointMap:
    """A total function between the points of two spaces."""

    def __init__(self, source, target, image: Sequence[int]):
        if len(image) != source.n:
            raise ValueError(f"map needs {source.n} images, got {len(image)}")
        for v in image:
            if not 0 <= v < target.n:
                raise ValueError(f"image point {v} not in target")
        self.source = source
        self.target = target
        self.image = tuple(image)

    def __call__(self, x: int) -> int:
        return self.image[x]

    def apply_path(self, path: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.image[x] for x in path)

    def then(self, other: PointMap) -> PointMap:
        """``other`` after ``self``."""
        if other.source is not self.target and other.source != self.target:
            raise ValueError("maps are not composable")
        return PointMap(self.source, other.target, [other.image[v] for v in self.image])

    def is_injective(self) -> bool:
        return len(set(self.image)) == len(self.image)

    def is_1lipschitz(self) -> bool:
        ds, dt, f = self.source.dist, self.target.dist, self.image
        n = self.source.n
        return all(dt[f[x]][f[y]] <= ds[x][y] for x in range(n) for y in range(x + 1, n))

    @classmethod
    def identity(cls, s) -> PointMap:
        return cls(s, s, range(s.n))


@dataclass(frozen=True)
class MapProperties:
    is_1lipschitz: bool | None
    preserves_betweenness: bool | None
    reflects_betweenness: bool | None
    is_retraction: bool | None = None

    def to_dict(self) -> dict:
        return {
            "is_1lipschitz": self.is_1lipschitz,
            "preserves_betweenness": self.preserves_betweenness,
            "reflects_betweenness": self.reflects_betweenness,
            "is_retraction": self.is_retraction,
        }


def _preserves(f: PointMap) -> bool:
    S, T, im = f.source, f.target, f.image
    n = S.n
    return all(
        T.is_between(im[y], im[x], im[z])
        for x in range(n)
        for z in range(n)
        for y in S.interval(x, z)
    )


def _reflects(f: PointMap) -> bool:
    S, T, im = f.source, f.target, f.image
    n = S.n
    return all(
        S.is_between(y, x, z)
        for x in range(n)
        for y in range(n)
        for z in range(n)
        if T.is_between(im[y], im[x], im[z])
    )


def is_retraction_onto(f: PointMap, subset: Iterable[int]) -> bool:
    """``f: X -> X`` is 1-Lipschitz, lands in ``subset`` and fixes it pointwise."""
    if f.source != f.target:
        return False
    A = set(subset)
    return (
        all(v in A for v in f.image)
        and all(f.image[a] == a for a in A)
        and (not isinstance(f.source, FiniteSpace) or f.is_1lipschitz())
    )


def map_properties(f: PointMap, subset: Iterable[int] | None = None) -> MapProperties:
    """Exhaustive checks over all pairs and triples.

    Betweenness preservation and reflection are only defined for injective
    maps and are reported as ``None`` otherwise.  ``is_retraction`` is only
    filled in when ``subset`` is given.
    """
    lip = f.is_1lipschitz() if isinstance(f.source, FiniteSpace) and isinstance(f.target, FiniteSpace) else None
    if f.is_injective():
        pres, refl = _preserves(f), _reflects(f)
    else:
        pres = refl = None
    retr = is_retraction_onto(f, subset) if subset is not None else None
    return MapProperties(lip, pres, refl, retr)


def relabel(s: FiniteSpace, perm: Sequence[int]) -> FiniteSpace:
    """The space whose point ``perm[x]`` is the old point ``x``."""
    n = s.n
    inv = [0] * n
    for x, p in enumerate(perm):
        inv[p] = x
    return FiniteSpace([[s.dist[inv[a]][inv[b]] for b in range(n)] for a in range(n)])
