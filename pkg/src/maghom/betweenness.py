"""Axiomatic betweenness structures, the magnitude simplicial set and good sets.

A structure assigns to every ordered pair ``(x, z)`` an interval ``[x, z]``.
Metric spaces (:class:`maghom.spaces.FiniteSpace`) expose the same
``n`` / ``interval`` / ``is_between`` surface, so every function here accepts
either.

Simplices of the magnitude simplicial set are tuples of points (consecutive
repeats allowed); the basepoint in degree ``k`` is ``Basepoint(k)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

from .spaces import FiniteSpace, PointMap

Simplex = tuple[int, ...]


class NotAPosetError(ValueError):
    def __init__(self, witness: Sequence[int]):
        self.witness = list(witness)
        super().__init__(f"relation is not antisymmetric; cycle {self.witness}")


class BetweennessStructure:
    """A finite set with an interval for every ordered pair of points."""

    graded = False

    def __init__(self, intervals: Sequence[Sequence[Iterable[int]]], labels: Sequence[str] | None = None):
        n = len(intervals)
        table = []
        for x, row in enumerate(intervals):
            if len(row) != n:
                raise ValueError("interval table is not square")
            out = []
            for z, iv in enumerate(row):
                s = frozenset(iv)
                if any(not 0 <= p < n for p in s):
                    raise ValueError(f"interval [{x},{z}] contains an unknown point")
                out.append(s)
            table.append(tuple(out))
        self._table: tuple[tuple[frozenset[int], ...], ...] = tuple(table)
        self.labels = tuple(labels) if labels is not None else None

    @property
    def n(self) -> int:
        return len(self._table)

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def interval(self, x: int, z: int, strict: bool = False) -> frozenset[int]:
        iv = self._table[x][z]
        return iv - {x, z} if strict else iv

    def is_between(self, y: int, x: int, z: int) -> bool:
        return y in self._table[x][z]

    def table(self) -> list[list[list[int]]]:
        return [[sorted(iv) for iv in row] for row in self._table]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BetweennessStructure):
            return NotImplemented
        return self._table == other._table

    def __hash__(self) -> int:
        return hash(self._table)

    def __repr__(self) -> str:
        return f"BetweennessStructure(n={self.n})"


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


def from_metric(s: FiniteSpace) -> BetweennessStructure:
    return BetweennessStructure([[s.interval(x, z) for z in range(s.n)] for x in range(s.n)], s.labels)


def complete_structure(n: int) -> BetweennessStructure:
    everything = frozenset(range(n))
    return BetweennessStructure([[everything] * n for _ in range(n)])


def sparse_structure(n: int) -> BetweennessStructure:
    return BetweennessStructure([[{x, z} for z in range(n)] for x in range(n)])


def _order_closure(n: int, le: Iterable[Sequence[int]]) -> list[list[bool]]:
    rel = [[x == y for y in range(n)] for x in range(n)]
    for a, b in le:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"pair {(a, b)} out of range")
        rel[a][b] = True
    for k in range(n):
        for i in range(n):
            if rel[i][k]:
                for j in range(n):
                    if rel[k][j]:
                        rel[i][j] = True
    return rel


def _find_cycle(n: int, le: Iterable[Sequence[int]], a: int, b: int) -> list[int]:
    adj: dict[int, list[int]] = {}
    for x, y in le:
        if x != y:
            adj.setdefault(x, []).append(y)

    def walk(src: int, dst: int) -> list[int]:
        prev = {src: None}
        stack = [src]
        while stack:
            u = stack.pop()
            if u == dst:
                break
            for v in adj.get(u, []):
                if v not in prev:
                    prev[v] = u
                    stack.append(v)
        out = [dst]
        while prev[out[-1]] is not None:
            out.append(prev[out[-1]])
        return out[::-1]

    return walk(a, b) + walk(b, a)[1:]


def from_poset(n: int, le: Iterable[Sequence[int]]) -> BetweennessStructure:
    """Intervals ``{y : x <= y <= z} | {x, z}`` of the order generated by ``le``.

    ``le`` may list cover relations only; the reflexive-transitive closure is
    taken.  A relation whose closure is not antisymmetric is rejected with a
    cycle witness.
    """
    le = [tuple(p) for p in le]
    rel = _order_closure(n, le)
    for a in range(n):
        for b in range(a + 1, n):
            if rel[a][b] and rel[b][a]:
                raise NotAPosetError(_find_cycle(n, le, a, b))
    return BetweennessStructure(
        [[{y for y in range(n) if rel[x][y] and rel[y][z]} | {x, z} for z in range(n)] for x in range(n)]
    )


def bet_product(b1, b2) -> BetweennessStructure:
    """Product structure, ``[(x1,y1),(x2,y2)] = [x1,x2] x [y1,y2]``, row-major."""
    m = b2.n
    pts = [(i, j) for i in range(b1.n) for j in range(m)]
    table = [
        [{p * m + q for p in b1.interval(a, c) for q in b2.interval(b, e)} for (c, e) in pts]
        for (a, b) in pts
    ]
    return BetweennessStructure(table, [f"({b1.label(a)},{b2.label(b)})" for a, b in pts])


def restrict_structure(b, subset: Iterable[int]) -> BetweennessStructure:
    pts = sorted(set(subset))
    pos = {p: i for i, p in enumerate(pts)}
    return BetweennessStructure(
        [[{pos[y] for y in b.interval(x, z) if y in pos} for z in pts] for x in pts],
        [b.label(p) for p in pts],
    )


# ---------------------------------------------------------------------------
# Axioms
# ---------------------------------------------------------------------------


@dataclass
class AxiomReport:
    n: int
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_axiom(self, axiom: str) -> list[dict]:
        return [v for v in self.violations if v["axiom"] == axiom]

    def to_dict(self) -> dict:
        return {"n": self.n, "ok": self.ok, "violations": self.violations}


def verify_axioms(b) -> AxiomReport:
    """Check B1-B3 exhaustively and list every violation."""
    n = b.n
    report = AxiomReport(n)
    bad = report.violations
    for x in range(n):
        for z in range(n):
            iv = b.interval(x, z)
            if x not in iv or z not in iv:
                bad.append({"axiom": "B1", "x": x, "z": z})
            for y in sorted(iv):
                if not b.interval(x, y) <= iv:
                    bad.append({"axiom": "B2", "x": x, "y": y, "z": z, "side": "left"})
                if not b.interval(y, z) <= iv:
                    bad.append({"axiom": "B2", "x": x, "y": y, "z": z, "side": "right"})
            for w in sorted(iv):
                for y in sorted(iv):
                    if b.is_between(w, x, y) != b.is_between(y, w, z):
                        bad.append({"axiom": "B3", "x": x, "z": z, "w": w, "y": y})
    return report


# ---------------------------------------------------------------------------
# The magnitude simplicial set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Basepoint:
    degree: int

    def __repr__(self) -> str:
        return f"pt_{self.degree}"


def simplices(n: int, k: int) -> Iterator[Simplex]:
    """All ``(k+1)``-tuples of points, lexicographically."""
    return product(range(n), repeat=k + 1)


def face_keeps(b, x: Sequence[int], i: int) -> bool:
    """Whether the ``i``-th face of the tuple ``x`` is a genuine simplex.

    Inner faces test ``x_i in [x_{i-1}, x_{i+1}]``.  An outer face uses its
    only neighbour on both sides: ``x_0 in [x_1, x_1]``, which for metric
    structures means ``x_0 == x_1``.
    """
    k = len(x) - 1
    if i == 0:
        return b.is_between(x[0], x[1], x[1])
    if i == k:
        return b.is_between(x[k], x[k - 1], x[k - 1])
    return b.is_between(x[i], x[i - 1], x[i + 1])


def face(b, x, i: int):
    if isinstance(x, Basepoint):
        if not 0 <= i <= x.degree or x.degree == 0:
            raise IndexError(f"face index {i} out of range for degree {x.degree}")
        return Basepoint(x.degree - 1)
    k = len(x) - 1
    if k == 0 or not 0 <= i <= k:
        raise IndexError(f"face index {i} out of range for degree {k}")
    if face_keeps(b, x, i):
        return tuple(x[:i]) + tuple(x[i + 1:])
    return Basepoint(k - 1)


def degeneracy(b, x, i: int):
    if isinstance(x, Basepoint):
        if not 0 <= i <= x.degree:
            raise IndexError(f"degeneracy index {i} out of range for degree {x.degree}")
        return Basepoint(x.degree + 1)
    k = len(x) - 1
    if not 0 <= i <= k:
        raise IndexError(f"degeneracy index {i} out of range for degree {k}")
    return tuple(x[: i + 1]) + tuple(x[i:])


@dataclass
class SimplicialReport:
    bound: int
    checked: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def inner_face_violations(self) -> list[dict]:
        return [v for v in self.violations if v["identity"] == "dd" and v.get("inner")]

    def to_dict(self) -> dict:
        return {"bound": self.bound, "checked": self.checked, "ok": self.ok, "violations": self.violations}


def verify_simplicial_identities(b, K: int) -> SimplicialReport:
    """Check all simplicial identities on every simplex of degree <= K."""
    rep = SimplicialReport(K)

    def note(identity: str, x, i: int, j: int, **extra) -> None:
        rep.violations.append({"identity": identity, "simplex": list(x) if not isinstance(x, Basepoint) else str(x), "i": i, "j": j, **extra})

    for k in range(K + 1):
        items = list(simplices(b.n, k)) + [Basepoint(k)]
        for x in items:
            for j in range(k + 1):
                for i in range(k + 1):
                    if i <= j:
                        rep.checked += 1
                        if degeneracy(b, degeneracy(b, x, j), i) != degeneracy(b, degeneracy(b, x, i), j + 1):
                            note("ss", x, i, j)
                sj = degeneracy(b, x, j)
                for i in range(k + 2):
                    rep.checked += 1
                    lhs = face(b, sj, i)
                    if i < j:
                        rhs = degeneracy(b, face(b, x, i), j - 1) if k else None
                    elif i in (j, j + 1):
                        rhs = x
                    else:
                        rhs = degeneracy(b, face(b, x, i - 1), j) if k else None
                    if rhs is not None and lhs != rhs:
                        note("ds", x, i, j)
            if k >= 2:
                for j in range(k + 1):
                    for i in range(j):
                        rep.checked += 1
                        if face(b, face(b, x, j), i) != face(b, face(b, x, i), j - 1):
                            note("dd", x, i, j, inner=(i > 0 and j < k))
    return rep


# ---------------------------------------------------------------------------
# Good sets and the Bet_- calculus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GoodSet:
    """Good simplices of degree ``<= bound`` (a set of tuples).

    ``stable`` is filled by :func:`maximal_good_set`: whether recomputing with
    one more degree leaves the result unchanged below ``bound``.
    """

    members: frozenset[Simplex]
    bound: int
    stable: bool | None = None

    def __contains__(self, x) -> bool:
        return not isinstance(x, Basepoint) and tuple(x) in self.members

    def by_degree(self) -> dict[int, list[Simplex]]:
        out: dict[int, list[Simplex]] = {k: [] for k in range(self.bound + 1)}
        for x in sorted(self.members):
            out[len(x) - 1].append(x)
        return out

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class BetMorphism:
    f: PointMap
    goods: GoodSet

    @property
    def bound(self) -> int:
        return self.goods.bound


def all_simplices(n: int, K: int) -> Iterator[Simplex]:
    for k in range(K + 1):
        yield from simplices(n, k)


def verify_good_set(f: PointMap, goods: GoodSet) -> list[dict]:
    """Every violation of G1/G2 for ``goods`` as an ``f``-good set."""
    S, T, im = f.source, f.target, f.image
    bad = []
    for x in all_simplices(S.n, goods.bound):
        k = len(x) - 1
        if k == 0:
            continue
        fx = tuple(im[p] for p in x)
        good = x in goods.members
        for i in range(k + 1):
            src = face_keeps(S, x, i)
            face_good = (x[:i] + x[i + 1:]) in goods.members
            if good:
                if face_keeps(T, fx, i) != (src and face_good):
                    bad.append({"rule": "G1", "simplex": list(x), "i": i})
            elif src and face_good:
                bad.append({"rule": "G2", "simplex": list(x), "i": i})
    return bad


def identity_morphism(b, K: int) -> BetMorphism:
    return BetMorphism(PointMap.identity(b), GoodSet(frozenset(all_simplices(b.n, K)), K))


def betweenness_morphism(f: PointMap, K: int) -> BetMorphism:
    """All simplices good; valid when ``f`` preserves and reflects betweenness."""
    return BetMorphism(f, GoodSet(frozenset(all_simplices(f.source.n, K)), K))


class NotLipschitzError(ValueError):
    pass


def lipschitz_good_set(f: PointMap, K: int) -> GoodSet:
    """The length-preserving simplices of a 1-Lipschitz map."""
    if not (isinstance(f.source, FiniteSpace) and isinstance(f.target, FiniteSpace)):
        raise TypeError("length-preserving good sets need metric source and target")
    if not f.is_1lipschitz():
        raise NotLipschitzError("map is not 1-Lipschitz")
    S, T = f.source, f.target
    members = frozenset(
        x for x in all_simplices(S.n, K) if T.path_length(f.apply_path(x)) == S.path_length(x)
    )
    return GoodSet(members, K)


def _maximal_members(f: PointMap, K: int) -> set[Simplex]:
    S, T, im = f.source, f.target, f.image
    good = set(all_simplices(S.n, K))
    # cofaces[y] = simplices x (and index i) with d_i x == y and x_i between
    cofaces: dict[Simplex, list[tuple[Simplex, bool]]] = {}
    faces: dict[Simplex, list[Simplex]] = {}
    remove: list[Simplex] = []
    for x in list(good):
        k = len(x) - 1
        if k == 0:
            continue
        fx = tuple(im[p] for p in x)
        for i in range(k + 1):
            tgt = face_keeps(T, fx, i)
            if not face_keeps(S, x, i):
                if tgt:
                    remove.append(x)
                continue
            y = x[:i] + x[i + 1:]
            faces.setdefault(x, []).append(y)
            cofaces.setdefault(y, []).append((x, tgt))
            if not tgt:
                remove.append(y)
    while remove:
        y = remove.pop()
        if y not in good:
            continue
        good.discard(y)
        # a bad simplex makes its between-faces bad
        remove.extend(faces.get(y, ()))
        # a good coface whose image keeps this face needs it good
        remove.extend(x for x, tgt in cofaces.get(y, ()) if tgt and x in good)
    return good


def maximal_good_set(f: PointMap, K: int) -> GoodSet:
    """The largest ``f``-good set among simplices of degree ``<= K``.

    Computed as a greatest fixpoint: badness is seeded by intrinsic G1
    failures, pushed down to faces (G2) and pulled up from faces (G1).  Since
    badness above ``K`` is invisible, the result is exact only relative to
    ``K``; ``stable`` records whether degree ``K + 1`` changes it.
    """
    members = _maximal_members(f, K)
    above = _maximal_members(f, K + 1)
    below = {x for x in above if len(x) - 1 <= K}
    return GoodSet(frozenset(members), K, stable=(below == members))


def compose(m1: BetMorphism, m2: BetMorphism, check: bool = True) -> BetMorphism:
    """``m2`` after ``m1`` with good set ``G_f & f^-1[G_g]``."""
    if m1.bound != m2.bound:
        raise ValueError(f"degree bounds differ: {m1.bound} vs {m2.bound}")
    f, g = m1.f, m2.f
    if f.target is not g.source and f.target != g.source:
        raise ValueError("morphisms are not composable")
    members = frozenset(x for x in m1.goods.members if f.apply_path(x) in m2.goods.members)
    out = BetMorphism(f.then(g), GoodSet(members, m1.bound))
    if check:
        bad = verify_good_set(out.f, out.goods)
        if bad:
            raise AssertionError(f"composite good set violates the axioms: {bad[:3]}")
    return out


def ms_map(m: BetMorphism, x):
    """Image of a simplex under the simplicial map of a morphism."""
    if isinstance(x, Basepoint):
        return x
    x = tuple(x)
    if len(x) - 1 > m.bound:
        raise ValueError(f"simplex degree {len(x) - 1} above bound {m.bound}")
    if x in m.goods.members:
        return m.f.apply_path(x)
    return Basepoint(len(x) - 1)
