"""Magnitude homology tables and induced maps on homology."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .intlinalg import (
    FGAbelianGroup,
    IntMatrix,
    PairHomology,
    homology_of_pair,
    hom_is_injective,
    hom_is_isomorphism,
    hom_is_surjective,
)
from .magchain import DEFAULT_CAP, BlockKey, Chain, ChainMap, PathComplex, split_by_block
from .spaces import format_rational


@dataclass
class HomologyEntry:
    """``H_k`` of one length class, assembled from its blocks.

    Generators are chains (path -> coefficient); ``orders[i]`` is the order
    of ``generators[i]`` (0 for infinite order).
    """

    k: int
    length: object
    blocks: list[tuple[BlockKey, PairHomology]]
    complex: PathComplex = field(repr=False)

    @property
    def orders(self) -> list[int]:
        return [o for _, h in self.blocks for o in h.orders]

    @property
    def group(self) -> FGAbelianGroup:
        return FGAbelianGroup.from_orders(self.orders)

    @property
    def generators(self) -> list[Chain]:
        cx = self.complex
        return [cx.chain(self.k, key, g) for key, h in self.blocks for g in h.generators]

    def coordinates(self, chain: Chain) -> list[int]:
        """Coordinates of a cycle of this class in the generator basis."""
        parts = split_by_block(self.complex, chain)
        out = []
        for key, h in self.blocks:
            part = parts.pop(key, {})
            out.extend(h.coordinates(self.complex.vector(self.k, key, part)))
        if parts:
            # support outside every homology block: must still be a cycle there
            for key, part in parts.items():
                if key not in self.complex.basis[self.k]:
                    raise ValueError(f"chain has support outside the complex: {key}")
                d = self.complex.block_boundary(self.k, key).apply(self.complex.vector(self.k, key, part))
                if any(d):
                    raise ValueError("chain is not a cycle")
        return out


class HomologyTable:
    """Magnitude homology ``H_k^l`` for ``k <= K``; zero entries are omitted."""

    def __init__(self, complex: PathComplex, K: int, entries: dict[tuple[int, object], HomologyEntry]):
        self.complex = complex
        self.K = K
        self._all = entries
        self.entries = {kl: e for kl, e in entries.items() if e.orders}

    def entry(self, k: int, length=None) -> HomologyEntry | None:
        return self._all.get((k, length))

    def group(self, k: int, length=None) -> FGAbelianGroup:
        e = self._all.get((k, length))
        return e.group if e is not None else FGAbelianGroup.trivial()

    def total(self, k: int) -> FGAbelianGroup:
        out = FGAbelianGroup.trivial()
        for (j, _), e in self.entries.items():
            if j == k:
                out = out + e.group
        return out

    def keys(self) -> list[tuple[int, object]]:
        return sorted(self.entries, key=lambda kl: (kl[0], _len_key(kl[1])))

    def rows(self) -> list[dict]:
        out = []
        for k, l in self.keys():
            g = self.entries[(k, l)].group
            out.append(
                {"k": k, "l": format_rational(l) if l is not None else None, "rank": g.free_rank, "torsion": list(g.torsion)}
            )
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "l", "rank", "torsion"])
        for r in self.rows():
            w.writerow([r["k"], "" if r["l"] is None else r["l"], r["rank"], " ".join(map(str, r["torsion"]))])
        return buf.getvalue()

    def is_torsion_free(self) -> bool:
        return all(e.group.is_torsion_free() for e in self.entries.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomologyTable):
            return NotImplemented
        return self.rows() == other.rows()


def _len_key(v):
    return (0, Fraction(0)) if v is None else (1, v)


def _pair(args):
    return homology_of_pair(*args)


def complex_homology(cx: PathComplex, K: int | None = None, *, jobs: int = 1) -> HomologyTable:
    """Homology of a path complex in degrees ``<= K``.

    The complex must reach degree ``K + 1`` so that the top degree is exact.
    """
    if K is None:
        K = cx.max_degree - 1
    if K + 1 > cx.max_degree:
        raise ValueError(f"degree {K} needs the complex up to degree {K + 1}")
    tasks: list[tuple[int, BlockKey]] = []
    args = []
    for k in range(K + 1):
        for key in cx.keys(k):
            tasks.append((k, key))
            args.append((cx.block_boundary(k, key), cx.block_boundary(k + 1, key)))
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_pair, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        results = [homology_of_pair(*a) for a in args]
    entries: dict[tuple[int, object], HomologyEntry] = {}
    for (k, key), h in zip(tasks, results):
        e = entries.get((k, key[0]))
        if e is None:
            e = entries[(k, key[0])] = HomologyEntry(k, key[0], [], cx)
        if h.orders:
            e.blocks.append((key, h))
    return HomologyTable(cx, K, entries)


def magnitude_homology(space, K: int, lengths=None, *, cap: int = DEFAULT_CAP, jobs: int = 1) -> HomologyTable:
    if K < 0:
        raise ValueError("degree bound must be non-negative")
    cx = PathComplex(space, K + 1, lengths=lengths, cap=cap)
    return complex_homology(cx, K, jobs=jobs)


# ---------------------------------------------------------------------------
# Induced maps
# ---------------------------------------------------------------------------


@dataclass
class HomologyMap:
    """Per ``(k, l)`` matrices in generator coordinates of the two tables."""

    source: HomologyTable
    target: HomologyTable
    matrices: dict[tuple[int, object], IntMatrix]

    def orders(self, k: int, length) -> tuple[list[int], list[int]]:
        s = self.source.entry(k, length)
        t = self.target.entry(k, length)
        return (s.orders if s else []), (t.orders if t else [])

    def keys(self) -> list[tuple[int, object]]:
        return sorted(self.matrices, key=lambda kl: (kl[0], _len_key(kl[1])))

    def is_injective(self, k: int, length) -> bool:
        return hom_is_injective(self.matrices[(k, length)], *self.orders(k, length))

    def is_surjective(self, k: int, length) -> bool:
        return hom_is_surjective(self.matrices[(k, length)], *self.orders(k, length))


class NotACycleError(ValueError):
    pass


def _image_coordinates(m: ChainMap, target: HomologyTable, k: int, length, chain: Chain) -> list[int]:
    img = m.apply(chain)
    e = target.entry(k, length)
    if e is None:
        e = HomologyEntry(k, length, [], target.complex)
    try:
        return e.coordinates(img)
    except ValueError as exc:
        raise NotACycleError(f"image of a cycle in degree {k} is not a cycle: {exc}") from exc


def induced_homology_map(m: ChainMap, source: HomologyTable, target: HomologyTable, *, check: bool = True) -> HomologyMap:
    """Matrices of ``m_*`` on every computed ``(k, l)``.

    With ``check``, each generator is also shifted by a boundary and the two
    images are required to have the same class.
    """
    K = min(source.K, target.K)
    keys = set(k_l for k_l in source._all if k_l[0] <= K) | set(k_l for k_l in target._all if k_l[0] <= K)
    mats = {}
    for k, length in sorted(keys, key=lambda kl: (kl[0], _len_key(kl[1]))):
        s = source.entry(k, length)
        t = target.entry(k, length)
        rows = len(t.orders) if t else 0
        cols = []
        if s is not None:
            for (key, h), gens in zip(s.blocks, _block_generators(s)):
                for g in gens:
                    c = _image_coordinates(m, target, k, length, g)
                    if check:
                        shift = _boundary_shift(source.complex, k, key)
                        if shift:
                            moved = dict(g)
                            for p, v in shift.items():
                                moved[p] = moved.get(p, 0) + v
                            moved = {p: v for p, v in moved.items() if v}
                            c2 = _image_coordinates(m, target, k, length, moved)
                            if not _same_class(c, c2, t.orders if t else []):
                                raise ArithmeticError(f"induced map is not well defined at degree {k}")
                    cols.append(c)
        mats[(k, length)] = IntMatrix.from_columns(cols, rows)
    return HomologyMap(source, target, mats)


def _block_generators(e: HomologyEntry) -> list[list[Chain]]:
    cx = e.complex
    return [[cx.chain(e.k, key, g) for g in h.generators] for key, h in e.blocks]


def _boundary_shift(cx: PathComplex, k: int, key: BlockKey) -> Chain:
    up = cx.block(k + 1, key)
    return cx.boundary({up[0]: 1}) if up else {}


def _same_class(a: Sequence[int], b: Sequence[int], orders: Sequence[int]) -> bool:
    return all((x - y) % o == 0 if o else x == y for x, y, o in zip(a, b, orders))


def is_isomorphism(m: HomologyMap) -> dict[tuple[int, object], bool]:
    return {kl: hom_is_isomorphism(m.matrices[kl], *m.orders(*kl)) for kl in m.keys()}


def identity_map(table: HomologyTable) -> HomologyMap:
    from .magchain import inclusion

    return induced_homology_map(inclusion(table.complex, table.complex), table, table)
