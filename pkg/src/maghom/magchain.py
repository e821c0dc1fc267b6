"""Path enumeration and the magnitude chain complex.

The boundary of a path keeps its first point, last point and length, so every
complex here splits into independent blocks keyed by ``(length, start, end)``
(``length`` is ``None`` for betweenness structures without a metric).  Each
block is enumerated and reduced on its own; tables are assembled per length
class afterwards.  Structures where some ``[x, x]`` holds more than ``x`` also
have outer faces; their complexes form a single block per degree.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .intlinalg import IntMatrix
from .spaces import FiniteSpace, PointMap

Path = tuple[int, ...]
Chain = dict[Path, int]
BlockKey = tuple[object, int, int]

DEFAULT_CAP = 2_000_000


class PathCapExceeded(RuntimeError):
    def __init__(self, k: int, length, cap: int):
        self.k, self.length, self.cap = k, length, cap
        super().__init__(f"more than {cap} paths in degree {k} (length class {length})")


class NotSubcomplexError(ValueError):
    """A boundary term left the span of the chosen paths."""


def is_graded(space) -> bool:
    return isinstance(space, FiniteSpace)


def path_length(space, path: Sequence[int]):
    return space.path_length(path) if is_graded(space) else None


def _length_set(lengths) -> frozenset[Fraction] | None:
    if lengths is None:
        return None
    if isinstance(lengths, (int, Fraction, str)):
        lengths = [lengths]
    from .spaces import to_rational

    return frozenset(to_rational(v) for v in lengths)


def enumerate_paths(space, k: int, length=None, *, cap: int = DEFAULT_CAP) -> list[Path]:
    """All ``k``-paths in lexicographic order, optionally of the given length(s)."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    wanted = _length_set(length)
    graded = is_graded(space)
    if wanted is not None and not graded:
        raise ValueError("length filters need a metric space")
    top = max(wanted) if wanted else None
    n = space.n
    d = space.dist if graded else None
    out: list[Path] = []
    path = [0] * (k + 1)

    def rec(pos: int, acc) -> None:
        if pos == k + 1:
            if wanted is None or acc in wanted:
                if len(out) >= cap:
                    raise PathCapExceeded(k, acc, cap)
                out.append(tuple(path))
            return
        prev = path[pos - 1]
        for y in range(n):
            if y == prev:
                continue
            nxt = acc + d[prev][y] if graded else None
            if top is not None and nxt > top:
                continue
            path[pos] = y
            rec(pos + 1, nxt)

    for x in range(n):
        path[0] = x
        rec(1, Fraction(0) if graded else None)
    return out


def has_outer_faces(space) -> bool:
    """Whether some ``[x, x]`` is bigger than ``{x}``.

    Then outer faces of non-degenerate tuples can survive and the boundary
    no longer fixes the end points.  Metric spaces never have them.
    """
    if is_graded(space):
        return False
    return any(len(space.interval(x, x)) > 1 for x in range(space.n))


def face_terms(space, path: Path) -> list[tuple[int, Path]]:
    """Signed faces of ``path`` that are neither the basepoint nor degenerate."""
    out = []
    k = len(path) - 1
    outer = k >= 1 and has_outer_faces(space)
    if outer:
        if space.is_between(path[0], path[1], path[1]):
            out.append((1, path[1:]))
    for i in range(1, k):
        a, x, b = path[i - 1], path[i], path[i + 1]
        if a != b and space.is_between(x, a, b):
            out.append((-1 if i % 2 else 1, path[:i] + path[i + 1:]))
    if outer:
        if space.is_between(path[k], path[k - 1], path[k - 1]):
            out.append((-1 if k % 2 else 1, path[:k]))
    return out


def boundary(space, chain: Chain) -> Chain:
    """Boundary in the full complex of ``space``."""
    out: Chain = defaultdict(int)
    for p, c in chain.items():
        for s, q in face_terms(space, p):
            out[q] += s * c
    return {p: c for p, c in out.items() if c}


def is_saturated(space, path: Sequence[int]) -> bool:
    return all(not space.interval(a, b, strict=True) for a, b in zip(path, path[1:]))


class PathComplex:
    """A subquotient of the magnitude chain complex, truncated at ``max_degree``.

    ``member`` selects the spanning paths of a subcomplex and ``quotient`` the
    paths of a smaller subcomplex to divide out.  ``lengths`` restricts to the
    given length classes.  Boundary terms that leave ``member`` raise
    :class:`NotSubcomplexError`.
    """

    def __init__(
        self,
        space,
        max_degree: int,
        *,
        member: Callable[[Path], bool] | None = None,
        quotient: Callable[[Path], bool] | None = None,
        lengths=None,
        cap: int = DEFAULT_CAP,
    ):
        if max_degree < 0:
            raise ValueError("degree bound must be non-negative")
        self.space = space
        self.max_degree = max_degree
        self.member = member
        self.quotient = quotient
        self.graded = is_graded(space)
        self.blocked = not has_outer_faces(space)
        self.length_filter = _length_set(lengths)
        self.basis: list[dict[BlockKey, list[Path]]] = []
        self._index: list[dict[Path, int]] = []
        self._boundaries: dict[tuple[int, BlockKey], IntMatrix] = {}
        for k in range(max_degree + 1):
            blocks: dict[BlockKey, list[Path]] = defaultdict(list)
            for p in enumerate_paths(space, k, self.length_filter, cap=cap):
                if self._keeps(p):
                    blocks[self.key(p)].append(p)
            ordered = {key: blocks[key] for key in sorted(blocks, key=_key_order)}
            self.basis.append(ordered)
            self._index.append({p: i for ps in ordered.values() for i, p in enumerate(ps)})

    def _keeps(self, p: Path) -> bool:
        if self.member is not None and not self.member(p):
            return False
        return self.quotient is None or not self.quotient(p)

    def key(self, p: Path) -> BlockKey:
        if not self.blocked:
            return (None, -1, -1)
        return (path_length(self.space, p), p[0], p[-1])

    def __contains__(self, p) -> bool:
        p = tuple(p)
        k = len(p) - 1
        return 0 <= k <= self.max_degree and p in self._index[k]

    def keys(self, k: int) -> list[BlockKey]:
        return list(self.basis[k]) if 0 <= k <= self.max_degree else []

    def block(self, k: int, key: BlockKey) -> list[Path]:
        if not 0 <= k <= self.max_degree:
            return []
        return self.basis[k].get(key, [])

    def lengths(self, k: int | None = None) -> list:
        ks = range(self.max_degree + 1) if k is None else [k]
        found = {key[0] for j in ks for key in self.keys(j)}
        return sorted(found, key=_len_order)

    def paths(self, k: int, length=None) -> list[Path]:
        """Basis of degree ``k`` (one length class if given), lexicographic."""
        out = [p for key, ps in self.basis[k].items() if length is None or key[0] == length for p in ps]
        return sorted(out)

    def size(self, k: int) -> int:
        return len(self._index[k]) if 0 <= k <= self.max_degree else 0

    def boundary_terms(self, p: Path) -> list[tuple[int, Path]]:
        out = []
        for s, q in face_terms(self.space, p):
            if self.quotient is not None and self.quotient(q):
                continue
            if self.member is not None and not self.member(q):
                raise NotSubcomplexError(f"boundary of {p} leaves the complex at {q}")
            out.append((s, q))
        return out

    def boundary(self, chain: Chain) -> Chain:
        out: Chain = defaultdict(int)
        for p, c in chain.items():
            for s, q in self.boundary_terms(p):
                out[q] += s * c
        return {p: c for p, c in out.items() if c}

    def block_boundary(self, k: int, key: BlockKey) -> IntMatrix:
        """``d_k`` restricted to one block: rows are degree ``k-1`` paths."""
        cached = self._boundaries.get((k, key))
        if cached is not None:
            return cached
        cols = self.block(k, key)
        rows = self.block(k - 1, key) if k >= 1 else []
        if k == 0:
            m = IntMatrix.zeros(len(rows), len(cols))
        else:
            index = self._index[k - 1]
            entries: dict[tuple[int, int], int] = {}
            for j, p in enumerate(cols):
                for s, q in self.boundary_terms(p):
                    i = index[q]
                    entries[(i, j)] = entries.get((i, j), 0) + s
            m = IntMatrix.from_sparse(len(rows), len(cols), entries)
        self._boundaries[(k, key)] = m
        return m

    def boundary_matrix(self, k: int, length=None) -> IntMatrix:
        """``d_k`` on one length class (or everything), lexicographic bases."""
        cols = self.paths(k, length)
        rows = self.paths(k - 1, length) if k >= 1 else []
        rindex = {p: i for i, p in enumerate(rows)}
        entries: dict[tuple[int, int], int] = {}
        if k >= 1:
            for j, p in enumerate(cols):
                for s, q in self.boundary_terms(p):
                    i = rindex[q]
                    entries[(i, j)] = entries.get((i, j), 0) + s
        return IntMatrix.from_sparse(len(rows), len(cols), entries)

    def vector(self, k: int, key: BlockKey, chain: Chain) -> list[int]:
        """Coordinates of a chain supported in one block."""
        ps = self.block(k, key)
        index = self._index[k]
        v = [0] * len(ps)
        for p, c in chain.items():
            if self.key(p) != key or p not in index:
                raise ValueError(f"path {p} is not in block {key}")
            v[index[p]] += c
        return v

    def chain(self, k: int, key: BlockKey, vector: Sequence[int]) -> Chain:
        return {p: c for p, c in zip(self.block(k, key), vector) if c}

    def reduce(self, chain: Chain) -> Chain:
        """Drop paths divided out by the quotient; reject paths outside."""
        out = {}
        for p, c in chain.items():
            if not c:
                continue
            if self.quotient is not None and self.quotient(p):
                continue
            if p not in self:
                raise NotSubcomplexError(f"path {p} is not in the complex")
            out[p] = c
        return out

    def saturated_indices(self, k: int, length=None) -> list[int]:
        return [i for i, p in enumerate(self.paths(k, length)) if is_saturated(self.space, p)]


def _len_order(v):
    return (0, Fraction(0)) if v is None else (1, v)


def _key_order(key: BlockKey):
    return (_len_order(key[0]), key[1], key[2])


def split_by_block(cx: PathComplex, chain: Chain) -> dict[BlockKey, Chain]:
    out: dict[BlockKey, Chain] = defaultdict(dict)
    for p, c in chain.items():
        if c:
            out[cx.key(p)][p] = c
    return dict(out)


# ---------------------------------------------------------------------------
# Chain maps
# ---------------------------------------------------------------------------


class NotLipschitzError(ValueError):
    pass


class ChainMap:
    """A degree-preserving map between path complexes, given on basis paths."""

    def __init__(self, source: PathComplex, target: PathComplex, on_path: Callable[[Path], Chain]):
        self.source = source
        self.target = target
        self.on_path = on_path

    def apply(self, chain: Chain) -> Chain:
        out: Chain = defaultdict(int)
        for p, c in chain.items():
            for q, e in self.on_path(p).items():
                out[q] += c * e
        return self.target.reduce({q: c for q, c in out.items() if c})

    def matrix(self, k: int, length=None) -> IntMatrix:
        cols = self.source.paths(k, length)
        rows = self.target.paths(k, length)
        rindex = {p: i for i, p in enumerate(rows)}
        entries = {}
        for j, p in enumerate(cols):
            for q, c in self.apply({p: 1}).items():
                if q not in rindex:
                    raise ValueError(f"image path {q} changes the length class")
                entries[(rindex[q], j)] = c
        return IntMatrix.from_sparse(len(rows), len(cols), entries)

    def commutes_with_boundary(self, k: int | None = None) -> list[Path]:
        """Basis paths on which ``d f != f d``; empty when ``f`` is a chain map."""
        bad = []
        ks = range(self.source.max_degree + 1) if k is None else [k]
        for j in ks:
            for ps in self.source.basis[j].values():
                for p in ps:
                    lhs = self.target.boundary(self.apply({p: 1}))
                    rhs = self.apply(self.source.boundary({p: 1}))
                    if lhs != rhs:
                        bad.append(p)
        return bad

    def then(self, other: ChainMap) -> ChainMap:
        """``other`` after ``self``."""
        return ChainMap(self.source, other.target, lambda p: other.apply(self.apply({p: 1})))


def inclusion(source: PathComplex, target: PathComplex) -> ChainMap:
    return ChainMap(source, target, lambda p: {p: 1})


def induced_chain_map(f: PointMap, source: PathComplex, target: PathComplex) -> ChainMap:
    """Chain map of a 1-Lipschitz map: length-preserving paths go to their image."""
    if not (is_graded(f.source) and is_graded(f.target)):
        raise TypeError("induced chain maps need metric spaces; use morphism_chain_map")
    if not f.is_1lipschitz():
        raise NotLipschitzError("map is not 1-Lipschitz")
    S, T = f.source, f.target

    def on_path(p: Path) -> Chain:
        q = f.apply_path(p)
        return {q: 1} if T.path_length(q) == S.path_length(p) else {}

    return ChainMap(source, target, on_path)


def morphism_chain_map(m, source: PathComplex, target: PathComplex) -> ChainMap:
    """Chain map of a betweenness morphism: good paths go to their image."""

    def on_path(p: Path) -> Chain:
        if p in m.goods:
            q = m.f.apply_path(p)
            if any(a == b for a, b in zip(q, q[1:])):
                return {}
            return {q: 1}
        return {}

    return ChainMap(source, target, on_path)


def induced_matrices(f: PointMap, K: int, *, cap: int = DEFAULT_CAP) -> dict[tuple[int, object], IntMatrix]:
    """Per ``(k, length)`` matrices of the induced chain map on full complexes."""
    src = PathComplex(f.source, K, cap=cap)
    tgt = PathComplex(f.target, K, cap=cap)
    m = induced_chain_map(f, src, tgt)
    return {(k, l): m.matrix(k, l) for k in range(K + 1) for l in src.lengths(k)}
