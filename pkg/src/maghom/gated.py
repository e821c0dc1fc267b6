"""Gated sets, gated decompositions, excision and Mayer-Vietoris checks.

All complexes here are subcomplexes (or subquotients) of the full path
complex of the ambient space, so paths always carry ambient point indices.
A subspace keeps the ambient betweenness, so the subcomplex spanned by paths
inside ``S`` is the path complex of ``S`` itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .betweenness import GoodSet, maximal_good_set, restrict_structure, simplices
from .homology import HomologyTable, complex_homology, induced_homology_map, is_isomorphism
from .intlinalg import IntMatrix, hom_is_injective, hom_is_surjective, is_exact_at
from .magchain import DEFAULT_CAP, Chain, ChainMap, Path, PathComplex, inclusion
from .spaces import FiniteSpace, PointMap, format_rational, is_convex, restrict


class NotGatedError(ValueError):
    def __init__(self, message: str, witness: dict):
        self.witness = witness
        super().__init__(f"{message}: {witness}")


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------


def gate_candidates(space, A: Iterable[int], x: int) -> list[int]:
    A = sorted(set(A))
    return [g for g in A if all(space.is_between(g, x, a) for a in A)]


def find_gates(space, A: Iterable[int], points: Iterable[int] | None = None) -> dict[int, int | None]:
    """Gate of every point (``None`` when there is none or it is not unique)."""
    A = sorted(set(A))
    if not A:
        raise ValueError("gates need a non-empty subset")
    pts = range(space.n) if points is None else sorted(set(points))
    out = {}
    for x in pts:
        c = gate_candidates(space, A, x)
        out[x] = c[0] if len(c) == 1 else None
    return out


def is_gated(space, A: Iterable[int], points: Iterable[int] | None = None) -> bool:
    """Whether every point of ``points`` (default: all) has a unique gate in ``A``."""
    A = sorted(set(A))
    gated = all(g is not None for g in find_gates(space, A, points).values())
    if gated and points is None and isinstance(space, FiniteSpace):
        assert is_convex(space, A), "gated subset is not convex"
    return gated


# ---------------------------------------------------------------------------
# Decompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GatedDecomposition:
    """``X = Y | Z`` with ``W = Y & Z`` and a projection ``pi: Z -> W``."""

    space: object
    Y: tuple[int, ...]
    Z: tuple[int, ...]
    W: tuple[int, ...]
    gate: dict[int, int] = field(hash=False)

    def pi(self, z: int) -> int:
        return self.gate[z]

    @property
    def graded(self) -> bool:
        return isinstance(self.space, FiniteSpace)

    def projection_violations(self) -> list[dict]:
        """Pairs with ``pi(z)`` outside ``[z, y]`` for ``z in Z``, ``y in Y``."""
        X = self.space
        return [
            {"z": z, "y": y, "pi": self.gate[z]}
            for z in self.Z
            for y in self.Y
            if not X.is_between(self.gate[z], z, y)
        ]

    def to_dict(self) -> dict:
        return {"Y": list(self.Y), "Z": list(self.Z), "W": list(self.W), "gate": {str(z): g for z, g in sorted(self.gate.items())}}


def _split(X, Y, Z) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    Y, Z = sorted(set(Y)), sorted(set(Z))
    for p in Y + Z:
        if not 0 <= p < X.n:
            raise ValueError(f"point {p} is not in the space")
    missing = sorted(set(range(X.n)) - set(Y) - set(Z))
    if missing:
        raise NotGatedError("Y and Z do not cover the space", {"uncovered": missing})
    W = sorted(set(Y) & set(Z))
    if not W:
        raise NotGatedError("Y and Z do not meet", {"W": []})
    return tuple(Y), tuple(Z), tuple(W)


def validate_decomposition(
    X: FiniteSpace, Y: Iterable[int], Z: Iterable[int], *, require_projection: bool = True
) -> GatedDecomposition:
    """Metric gated decomposition: ``W`` must be gated inside the subspace ``Z``.

    With ``require_projection`` (the default) every gate must also lie
    between its point and every point of ``Y``.  Without it, a split such as
    ``C4 = {0,1} | {0,2,3}`` is accepted although the edge from 1 to 2 makes
    excision fail.

    Raises :class:`NotGatedError` with the offending point and its gate
    candidates.
    """
    Y, Z, W = _split(X, Y, Z)
    gate = {}
    for z in Z:
        c = gate_candidates(X, W, z)
        if len(c) != 1:
            raise NotGatedError("W is not gated in Z", {"point": z, "candidates": c, "W": list(W)})
        gate[z] = c[0]
    sub = restrict(X, Z)
    pos = {p: i for i, p in enumerate(Z)}
    f = PointMap(sub, sub, [pos[gate[z]] for z in Z])
    assert f.is_1lipschitz() and all(gate[w] == w for w in W)
    d = GatedDecomposition(X, Y, Z, W, gate)
    if require_projection:
        bad = d.projection_violations()
        if bad:
            raise NotGatedError("gate is not between its point and Y", bad[0])
    return d


def validate_bet_decomposition(
    b,
    Y: Iterable[int],
    Z: Iterable[int],
    pi: dict[int, int] | None = None,
    K: int = 2,
    *,
    require_reverse: bool = True,
) -> GatedDecomposition:
    """Gated decomposition of a betweenness structure.

    ``pi`` must send ``Z`` into ``W``, fix ``W``, satisfy ``pi(z) in [z, y]``
    for every ``y in Y``, and its maximal good set (computed up to degree
    ``K``) must contain every simplex of ``W``.  When ``pi`` is omitted the
    lowest admissible choice is taken for each point.

    Intervals need not be symmetric, so by default ``pi(z) in [y, z]`` is
    required too: on the chain ``0 < 1 < 2 < 3`` with ``Y = {1,2,3}`` and
    ``Z = {0,1}`` the path from 2 down to 0 is a cycle outside ``MC(Y,Z)``
    and excision fails.  ``require_reverse=False`` drops this condition.
    """
    Y, Z, W = _split(b, Y, Z)
    Wset = set(W)

    def between(w, z, y):
        return b.is_between(w, z, y) and (not require_reverse or b.is_between(w, y, z))

    if pi is None:
        pi = {}
        for z in Z:
            if z in Wset:
                pi[z] = z
                continue
            c = [w for w in W if all(between(w, z, y) for y in Y)]
            if not c:
                raise NotGatedError("no admissible projection", {"point": z})
            pi[z] = c[0]
    else:
        pi = {int(k): int(v) for k, v in pi.items()}
        if sorted(pi) != list(Z) or any(v not in Wset for v in pi.values()):
            raise NotGatedError("projection must map Z into W", {"pi": pi})
    for w in W:
        if pi[w] != w:
            raise NotGatedError("projection does not fix W", {"point": w, "image": pi[w]})
    for z in Z:
        for y in Y:
            if not between(pi[z], z, y):
                raise NotGatedError("projection is not between", {"z": z, "y": y, "pi": pi[z]})
    goods = projection_good_set(b, Z, W, pi, K)
    posZ = {p: i for i, p in enumerate(Z)}
    for k in range(K + 1):
        for x in simplices(len(W), k):
            local = tuple(posZ[W[i]] for i in x)
            if local not in goods.members:
                raise NotGatedError("good set misses a simplex of W", {"simplex": [W[i] for i in x]})
    return GatedDecomposition(b, Y, Z, W, pi)


def projection_good_set(b, Z, W, pi: dict[int, int], K: int) -> GoodSet:
    """Maximal good set of ``pi: Z -> W`` in local indices of ``Z``."""
    Z, W = list(Z), list(W)
    sz, sw = restrict_structure(b, Z), restrict_structure(b, W)
    posW = {p: i for i, p in enumerate(W)}
    return maximal_good_set(PointMap(sz, sw, [posW[pi[z]] for z in Z]), K)


# ---------------------------------------------------------------------------
# Subcomplexes
# ---------------------------------------------------------------------------


def inside(S: Iterable[int]):
    S = frozenset(S)
    return lambda p: all(x in S for x in p)


def mc_yz(d: GatedDecomposition, max_degree: int, cap: int = DEFAULT_CAP) -> PathComplex:
    """Paths entirely in ``Y`` or entirely in ``Z``."""
    inY, inZ = inside(d.Y), inside(d.Z)
    return PathComplex(d.space, max_degree, member=lambda p: inY(p) or inZ(p), cap=cap)


@dataclass
class ExcisionReport:
    K: int
    entries: list[dict]

    @property
    def holds(self) -> bool:
        return all(e["isomorphism"] for e in self.entries)

    def failures(self) -> list[dict]:
        return [e for e in self.entries if not e["isomorphism"]]

    def to_dict(self) -> dict:
        return {"K": self.K, "verified_up_to": self.K, "holds": self.holds, "entries": self.entries}


def _fmt(v):
    return None if v is None else format_rational(v)


def excision_check(d: GatedDecomposition, K: int, *, cap: int = DEFAULT_CAP, jobs: int = 1) -> ExcisionReport:
    """Whether ``MC(Y,Z) -> MC(X)`` is an isomorphism on homology for ``k <= K``."""
    full = PathComplex(d.space, K + 1, cap=cap)
    sub = mc_yz(d, K + 1, cap)
    hs = complex_homology(sub, K, jobs=jobs)
    hx = complex_homology(full, K, jobs=jobs)
    m = induced_homology_map(inclusion(sub, full), hs, hx)
    iso = is_isomorphism(m)
    entries = [
        {"k": k, "l": _fmt(l), "source": str(hs.group(k, l)), "target": str(hx.group(k, l)), "isomorphism": ok}
        for (k, l), ok in iso.items()
    ]
    return ExcisionReport(K, entries)


# ---------------------------------------------------------------------------
# Mayer-Vietoris
# ---------------------------------------------------------------------------


@dataclass
class MayerVietorisReport:
    K: int
    entries: list[dict]

    @property
    def holds(self) -> bool:
        keys = ("injective", "exact", "surjective", "left_inverse")
        return all(all(e[k] for k in keys) for e in self.entries)

    def to_dict(self) -> dict:
        return {"K": self.K, "verified_up_to": self.K, "holds": self.holds, "entries": self.entries}


def projection_chain_map(d: GatedDecomposition, cz: PathComplex, cw: PathComplex, K: int) -> ChainMap:
    """Chain map of ``pi: Z -> W`` on ambient-indexed paths."""
    X = d.space
    if d.graded:

        def on_path(p: Path) -> Chain:
            q = tuple(d.gate[x] for x in p)
            return {q: 1} if X.path_length(q) == X.path_length(p) else {}

    else:
        goods = projection_good_set(X, d.Z, d.W, d.gate, max(K, cz.max_degree))
        posZ = {p: i for i, p in enumerate(d.Z)}

        def on_path(p: Path) -> Chain:
            if tuple(posZ[x] for x in p) not in goods.members:
                return {}
            q = tuple(d.gate[x] for x in p)
            if any(a == b for a, b in zip(q, q[1:])):
                return {}
            return {q: 1}

    return ChainMap(cz, cw, on_path)


def mayer_vietoris_check(d: GatedDecomposition, K: int, *, cap: int = DEFAULT_CAP, jobs: int = 1) -> MayerVietorisReport:
    """Check ``0 -> H(W) -> H(Y) + H(Z) -> H(X) -> 0`` for every ``(k, l)``, ``k <= K``.

    Exactness is decided over the integers with torsion taken into account.
    The splitting ``pi_* . prj_2 . <j_Y, -j_Z> = -Id`` is also verified.
    """
    X = d.space
    top = K + 1
    cw = PathComplex(X, top, member=inside(d.W), cap=cap)
    cy = PathComplex(X, top, member=inside(d.Y), cap=cap)
    cz = PathComplex(X, top, member=inside(d.Z), cap=cap)
    cx = PathComplex(X, top, cap=cap)
    hw, hy, hz, hx = (complex_homology(c, K, jobs=jobs) for c in (cw, cy, cz, cx))
    jy = induced_homology_map(inclusion(cw, cy), hw, hy)
    jz = induced_homology_map(inclusion(cw, cz), hw, hz)
    iy = induced_homology_map(inclusion(cy, cx), hy, hx)
    iz = induced_homology_map(inclusion(cz, cx), hz, hx)
    pz = induced_homology_map(projection_chain_map(d, cz, cw, K), hz, hw)
    keys = set(jy.matrices) | set(iy.matrices) | set(iz.matrices)
    entries = []
    for kl in sorted(keys, key=lambda kl: (kl[0], (0, 0) if kl[1] is None else (1, kl[1]))):
        ow = _orders(hw, kl)
        oy, oz, ox = _orders(hy, kl), _orders(hz, kl), _orders(hx, kl)
        A = _mat(jy, kl, len(oy), len(ow))
        B = _mat(jz, kl, len(oz), len(ow))
        f = IntMatrix.from_rows(A.data + [[-v for v in row] for row in B.data], len(ow))
        g = IntMatrix.from_rows(
            [ra + rb for ra, rb in zip(_mat(iy, kl, len(ox), len(oy)).data, _mat(iz, kl, len(ox), len(oz)).data)],
            len(oy) + len(oz),
        )
        mid = oy + oz
        P = _mat(pz, kl, len(ow), len(oz))
        # pi_* after the Z component of <j_Y, -j_Z> must be -Id
        left = P @ B
        left_ok = all(
            (left.data[i][j] - (i == j)) % o == 0 if o else left.data[i][j] == (i == j)
            for i, o in enumerate(ow)
            for j in range(len(ow))
        )
        entries.append(
            {
                "k": kl[0],
                "l": _fmt(kl[1]),
                "W": str(hw.group(*kl)),
                "YZ": str(hy.group(*kl) + hz.group(*kl)),
                "X": str(hx.group(*kl)),
                "injective": hom_is_injective(f, ow, mid),
                "exact": is_exact_at(f, g, ow, mid, ox),
                "surjective": hom_is_surjective(g, mid, ox),
                "left_inverse": left_ok,
            }
        )
    return MayerVietorisReport(K, entries)


def _orders(t: HomologyTable, kl) -> list[int]:
    e = t.entry(*kl)
    return e.orders if e else []


def _mat(m, kl, rows: int, cols: int) -> IntMatrix:
    M = m.matrices.get(kl)
    if M is None:
        return IntMatrix.zeros(rows, cols)
    return M


# ---------------------------------------------------------------------------
# Diagnostic complexes
# ---------------------------------------------------------------------------

KINDS = ("A", "B", "Btilde", "F", "G", "B/Btilde", "F/F", "G/G")


@dataclass
class DiagnosticComplex:
    kind: str
    params: dict
    complex: PathComplex
    decomposition: GatedDecomposition = field(repr=False)


def _sides(d: GatedDecomposition, b: int) -> tuple[frozenset, frozenset]:
    """``(near, far)``: the side not containing ``b`` first."""
    Y, Z = frozenset(d.Y), frozenset(d.Z)
    if b in Z and b not in Y:
        return Y, Z
    if b in Y and b not in Z:
        return Z, Y
    raise ValueError(f"point {b} must lie in exactly one of Y and Z")


def _f_member(d: GatedDecomposition, b: int, level: int):
    near, far = _sides(d, b)

    def member(p: Path) -> bool:
        k = len(p) - 1
        return p[-1] == b and all(x in near for x in p[:-1]) and all(x in far for x in p[level:k])

    return member


def _g_member(d: GatedDecomposition, level: int):
    Y, Z = frozenset(d.Y), frozenset(d.Z)

    def member(p: Path) -> bool:
        head = p[: max(0, len(p) - level)]
        return all(x in Y for x in head) or all(x in Z for x in head)

    return member


def build_diagnostic(d: GatedDecomposition, kind: str, max_degree: int, *, cap: int = DEFAULT_CAP, **params) -> DiagnosticComplex:
    """One of the auxiliary complexes used to prove excision.

    Kinds and parameters: ``A`` (a, b); ``B``, ``Btilde``, ``B/Btilde`` (b);
    ``F`` (b, level); ``F/F`` (b, level) for ``F(level+1)/F(level)``;
    ``G`` (level); ``G/G`` (level) for ``G(level+1)/G(level)``.  ``level``
    is the filtration index.
    """
    W = frozenset(d.W)
    X = d.space
    member = quotient = None
    if kind == "A":
        a, b = params["a"], params["b"]
        Y, Z = set(d.Y), set(d.Z)
        if not ((a in Y - Z and b in Z - Y) or (a in Z - Y and b in Y - Z)):
            raise ValueError("A(a, b) needs a and b on opposite sides outside W")
        member = lambda p: p[0] == a and p[-1] == b and all(x in W for x in p[1:-1])
    elif kind in ("B", "Btilde", "B/Btilde"):
        b = params["b"]
        near, _ = _sides(d, b)
        big = lambda p: p[-1] == b and all(x in near for x in p[:-1])
        small = lambda p: p[-1] == b and all(x in W for x in p[:-1])
        member = {"B": big, "Btilde": small, "B/Btilde": big}[kind]
        quotient = small if kind == "B/Btilde" else None
    elif kind in ("F", "F/F"):
        b, level = params["b"], params["level"]
        if kind == "F":
            member = _f_member(d, b, level)
        else:
            member, quotient = _f_member(d, b, level + 1), _f_member(d, b, level)
    elif kind in ("G", "G/G"):
        level = params["level"]
        if kind == "G":
            member = _g_member(d, level)
        else:
            member, quotient = _g_member(d, level + 1), _g_member(d, level)
    else:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    cx = PathComplex(X, max_degree, member=member, quotient=quotient, cap=cap)
    return DiagnosticComplex(kind, dict(params), cx, d)


def check_acyclic(c: DiagnosticComplex, K: int) -> bool:
    """Zero homology in every degree ``<= K`` (the complex must reach ``K + 1``)."""
    return not complex_homology(c.complex, K).entries


def homotopy(c: DiagnosticComplex):
    """The contracting homotopy of ``A(a, b)``, as a map path -> chain.

    For ``b`` outside ``Y`` the gate of ``b`` is inserted before ``b`` with
    sign ``(-1)^k``; for ``a`` outside ``Y`` the gate of ``a`` is inserted
    after ``a`` with sign ``-1``.  Either is zero when the inserted point
    would repeat its neighbour.
    """
    if c.kind != "A":
        raise ValueError("the homotopy is defined on A(a, b) only")
    d = c.decomposition
    a, b = c.params["a"], c.params["b"]
    Y = set(d.Y)
    if b not in Y:
        g = d.gate[b]

        def s(p: Path) -> Chain:
            k = len(p) - 1
            if p[-2] == g:
                return {}
            return {p[:-1] + (g, b): -1 if k % 2 else 1}

    else:
        g = d.gate[a]

        def s(p: Path) -> Chain:
            if p[1] == g:
                return {}
            return {(a, g) + p[1:]: -1}

    return s


def homotopy_defect(c: DiagnosticComplex, K: int, sign: int = 1) -> list[Path]:
    """Basis paths of degree ``<= K`` where ``d s + sign * s d != Id``."""
    s = homotopy(c)
    cx = c.complex
    bad = []

    def apply(chain: Chain) -> Chain:
        out: Chain = {}
        for p, v in chain.items():
            for q, e in s(p).items():
                out[q] = out.get(q, 0) + v * e
        return {q: v for q, v in out.items() if v}

    for k in range(min(K, cx.max_degree - 1) + 1):
        for ps in cx.basis[k].values():
            for p in ps:
                lhs: Chain = dict(cx.boundary(apply({p: 1})))
                for q, v in apply(cx.boundary({p: 1})).items():
                    lhs[q] = lhs.get(q, 0) + sign * v
                lhs = {q: v for q, v in lhs.items() if v}
                if lhs != {p: 1}:
                    bad.append(p)
    return bad


def homotopy_check(c: DiagnosticComplex, K: int) -> bool:
    """``d s + s d = Id`` on every basis path of degree ``<= K``."""
    return not homotopy_defect(c, K)


def filtration_inclusions(d: GatedDecomposition, K: int, *, cap: int = DEFAULT_CAP) -> dict:
    """Literal basis checks on the ``G`` filtration up to degree ``K``."""
    base = set(p for ps in mc_yz(d, K, cap).basis for blk in ps.values() for p in blk)
    full = PathComplex(d.space, K, cap=cap)
    levels = [build_diagnostic(d, "G", K, level=i, cap=cap).complex for i in range(K + 2)]
    sets = [set(p for ps in c.basis for blk in ps.values() for p in blk) for c in levels]
    return {
        "G0_is_MC_YZ": sets[0] == base,
        "increasing": all(sets[i] <= sets[i + 1] for i in range(len(sets) - 1)),
        "full_below_level": all(
            set(full.paths(k)) == set(levels[i].paths(k)) for i in range(len(levels)) for k in range(min(i, K) + 1)
        ),
    }
