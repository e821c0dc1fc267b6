"""Diagonality, median spaces, median hulls and graph generators."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .intlinalg import image_lattice, kernel_lattice, member
from .magchain import DEFAULT_CAP, PathComplex, is_saturated
from .spaces import FiniteGraph, FiniteSpace, PointMap, format_rational, graph_metric, l1_product

HYPERCUBE_CAP = 6


# ---------------------------------------------------------------------------
# Diagonality
# ---------------------------------------------------------------------------


@dataclass
class DiagonalityReport:
    """Per ``(k, l)`` verdicts; ``witness`` holds the first failure, if any."""

    K: int
    entries: list[dict] = field(default_factory=list)
    witness: dict | None = None

    @property
    def diagonal(self) -> bool:
        return self.witness is None

    def failures(self) -> list[dict]:
        return [e for e in self.entries if not e["diagonal"]]

    def to_dict(self) -> dict:
        return {"K": self.K, "diagonal": self.diagonal, "entries": self.entries, "witness": self.witness}


def _fmt(v):
    return None if v is None else format_rational(v)


def is_diagonal(space, K: int, *, cap: int = DEFAULT_CAP) -> DiagonalityReport:
    """Whether every cycle in degree ``<= K`` is a saturated chain plus a boundary.

    Each block's cycle lattice is tested on a basis: the non-saturated part
    of every basis cycle must lie in the image of the next boundary.
    """
    cx = PathComplex(space, K + 1, cap=cap)
    report = DiagonalityReport(K)
    per_class: dict[tuple[int, object], dict] = {}
    for k in range(K + 1):
        for key in cx.keys(k):
            paths = cx.block(k, key)
            row = per_class.setdefault((k, key[0]), {"k": k, "l": _fmt(key[0]), "diagonal": True, "saturated": 0})
            sat = [is_saturated(space, p) for p in paths]
            row["saturated"] += sum(sat)
            if all(sat):
                continue
            image = image_lattice(cx.block_boundary(k + 1, key))
            for z in kernel_lattice(cx.block_boundary(k, key)):
                rest = [0 if s else v for v, s in zip(z, sat)]
                if any(rest) and not member(rest, image):
                    if row["diagonal"]:
                        row["diagonal"] = False
                        if report.witness is None:
                            report.witness = {
                                "k": k,
                                "l": _fmt(key[0]),
                                "cycle": _chain_json(paths, z),
                                "non_saturated_part": _chain_json(paths, rest),
                            }
                    break
    report.entries = [per_class[kl] for kl in sorted(per_class, key=lambda kl: (kl[0], (0, 0) if kl[1] is None else (1, kl[1])))]
    return report


def _chain_json(paths, vec) -> list[dict]:
    return [{"path": list(p), "coefficient": c} for p, c in zip(paths, vec) if c]


def witness_is_valid(space, witness: dict) -> bool:
    """Re-check a failure witness: a cycle whose non-saturated part is no boundary."""
    from .magchain import boundary

    k = witness["k"]
    cycle = {tuple(t["path"]): t["coefficient"] for t in witness["cycle"]}
    rest = {tuple(t["path"]): t["coefficient"] for t in witness["non_saturated_part"]}
    if boundary(space, cycle):
        return False
    if any(is_saturated(space, p) for p in rest) or any(
        cycle.get(p) != c for p, c in rest.items()
    ):
        return False
    first = next(iter(rest))
    cx = PathComplex(space, k + 1)
    key = cx.key(first)
    paths = cx.block(k, key)
    vec = cx.vector(k, key, rest)
    return not member(vec, image_lattice(cx.block_boundary(k + 1, key)))


# ---------------------------------------------------------------------------
# Medians
# ---------------------------------------------------------------------------


class NotMedianError(ValueError):
    pass


def median(space, x: int, y: int, z: int) -> int | None:
    common = space.interval(x, y) & space.interval(y, z) & space.interval(x, z)
    return next(iter(common)) if len(common) == 1 else None


@dataclass
class MedianCertificate:
    median: bool
    table: list[list[list[int]]] | None = None
    witness: dict | None = None

    def m(self, x: int, y: int, z: int) -> int:
        if self.table is None:
            raise NotMedianError("space is not median")
        return self.table[x][y][z]

    def to_dict(self) -> dict:
        return {"median": self.median, "witness": self.witness}


def is_median(space) -> MedianCertificate:
    n = space.n
    table = [[[0] * n for _ in range(n)] for _ in range(n)]
    for x in range(n):
        for y in range(n):
            ixy = space.interval(x, y)
            for z in range(n):
                common = ixy & space.interval(y, z) & space.interval(x, z)
                if len(common) != 1:
                    return MedianCertificate(False, None, {"triple": [x, y, z], "intersection": sorted(common)})
                table[x][y][z] = next(iter(common))
    return MedianCertificate(True, table)


def median_hull(ambient, seed) -> list[int]:
    """Closure of ``seed`` under the median operation of a median space."""
    cert = is_median(ambient)
    if not cert.median:
        raise NotMedianError(f"ambient space is not median: {cert.witness}")
    hull = set(seed)
    if not hull:
        return []
    changed = True
    while changed:
        changed = False
        pts = sorted(hull)
        for i, x in enumerate(pts):
            for j in range(i + 1, len(pts)):
                for z in pts[j + 1:]:
                    m = cert.m(x, pts[j], z)
                    if m not in hull:
                        hull.add(m)
                        changed = True
    return sorted(hull)


@dataclass
class AvannResult:
    graph: FiniteGraph
    certified: bool
    witness: dict | None = None


def avann_graph(space: FiniteSpace) -> AvannResult:
    """Graph with an edge wherever the strict interval is empty.

    The certificate compares graph-geodesic betweenness with the space's
    betweenness on every triple.
    """
    cert = is_median(space)
    if not cert.median:
        raise NotMedianError(f"space is not median: {cert.witness}")
    n = space.n
    edges = [(x, y) for x in range(n) for y in range(x + 1, n) if not space.interval(x, y, strict=True)]
    g = FiniteGraph(n, edges)
    gm = graph_metric(g)
    for x in range(n):
        for z in range(n):
            if gm.interval(x, z) != space.interval(x, z):
                return AvannResult(g, False, {"x": x, "z": z, "graph": sorted(gm.interval(x, z)), "space": sorted(space.interval(x, z))})
    return AvannResult(g, True)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def hypercube(n: int, cap: int = HYPERCUBE_CAP) -> FiniteGraph:
    """``Q_n``; vertex bits read most significant first match row-major products."""
    if n < 0:
        raise ValueError("dimension must be non-negative")
    if n > cap:
        raise ValueError(f"hypercube dimension {n} exceeds the cap {cap}")
    return FiniteGraph(1 << n, [(v, v ^ (1 << j)) for v in range(1 << n) for j in range(n) if v < v ^ (1 << j)])


def path_graph(n: int) -> FiniteGraph:
    return FiniteGraph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> FiniteGraph:
    if n < 3:
        raise ValueError("cycles need at least 3 vertices")
    return FiniteGraph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> FiniteGraph:
    return FiniteGraph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> FiniteGraph:
    return FiniteGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def graph_product(g: FiniteGraph, h: FiniteGraph) -> FiniteGraph:
    """Cartesian product, vertices row-major (its metric is the l1 product)."""
    m = h.n
    edges = [(a * m + b, a * m + c) for a in range(g.n) for b, c in h.edges]
    edges += [(a * m + b, c * m + b) for a, c in g.edges for b in range(m)]
    return FiniteGraph(g.n * m, edges)


def random_tree(n: int, seed: int) -> FiniteGraph:
    """Uniform labelled tree from a seeded Prüfer sequence."""
    if n <= 2:
        return path_graph(n)
    rng = random.Random(seed)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = min(u for u in range(n) if degree[u] == 1)
        edges.append((leaf, v))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = [x for x in range(n) if degree[x] == 1]
    edges.append((u, w))
    return FiniteGraph(n, edges)


def two_point(d) -> FiniteSpace:
    return FiniteSpace([[0, d], [d, 0]])


def scaled_cube(*sides) -> FiniteSpace:
    """l1 product of two-point spaces with the given (rational) side lengths."""
    out = two_point(sides[0])
    for s in sides[1:]:
        out = l1_product(out, two_point(s))
    return out


def verify_retract(f: PointMap) -> bool:
    """``f: X -> X`` is 1-Lipschitz and fixes its image pointwise."""
    if f.source != f.target:
        return False
    return f.is_1lipschitz() and all(f.image[v] == v for v in set(f.image))
