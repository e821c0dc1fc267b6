"""Exact integer linear algebra.

Everything here works over Python's arbitrary-precision ``int``; no floating
point is ever involved.  Matrices are small and dense (the magnitude complexes
split into many tiny blocks), so a list-of-rows representation is used, with
sparse constructors for convenience.

Conventions
-----------
* A lattice basis is a list of integer row vectors in Hermite normal form:
  pivots strictly increase, every pivot is positive and the entries above a
  pivot are reduced into ``[0, pivot)``.  A lattice has exactly one such basis,
  so equal lattices compare equal as lists.
* Finitely generated abelian groups are described by a list of generator
  orders, ``0`` meaning infinite cyclic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

Vector = list[int]


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class NonZeroCompositionError(ArithmeticError):
    """``d_k @ d_{k+1}`` is not the zero matrix."""


class IntMatrix:
    """A dense integer matrix that remembers its shape even when empty."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence[int]] | None = None):
        if rows < 0 or cols < 0:
            raise DimensionError("negative dimension")
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = [[0] * cols for _ in range(rows)]
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise DimensionError(f"data does not have shape {rows}x{cols}")
            for r in data:
                for v in r:
                    if not isinstance(v, int) or isinstance(v, bool):
                        raise TypeError(f"entries must be int, got {type(v).__name__}")
            self.data = [list(r) for r in data]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        if cols is None:
            if not rows:
                raise DimensionError("cannot infer column count of an empty row list")
            cols = len(rows[0])
        return cls(len(rows), cols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        m = cls(rows, len(columns))
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise DimensionError("column of wrong length")
            for i, v in enumerate(col):
                m.data[i][j] = v
        return m

    @classmethod
    def from_sparse(cls, rows: int, cols: int, entries: dict[tuple[int, int], int]) -> IntMatrix:
        m = cls(rows, cols)
        for (i, j), v in entries.items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionError(f"entry {(i, j)} outside {rows}x{cols}")
            m.data[i][j] = v
        return m

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        m = cls(n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_sparse(self) -> dict[tuple[int, int], int]:
        return {(i, j): v for i, r in enumerate(self.data) for j, v in enumerate(r) if v}

    def column(self, j: int) -> Vector:
        return [r[j] for r in self.data]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_columns(self.data, self.cols) if self.rows else IntMatrix(self.cols, 0)

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.data for v in r)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        out = IntMatrix(self.rows, other.cols)
        for i, row in enumerate(self.data):
            acc = out.data[i]
            for t, a in enumerate(row):
                if a:
                    for j, b in enumerate(other.data[t]):
                        if b:
                            acc[j] += a * b
        return out

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.cols:
            raise DimensionError("vector length does not match column count")
        return [sum(a * b for a, b in zip(r, v) if a) for r in self.data]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}, {self.cols}, {self.data})"


def determinant(A: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = A.rows
    if n != A.cols:
        raise DimensionError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [r[:] for r in A.data]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == S`` with ``U``, ``V`` unimodular and ``S`` diagonal.

    ``U_inv`` is the inverse of ``U``; it is what turns Smith coordinates back
    into original coordinates and comes for free while reducing.
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.S.data[i][i] for i in range(min(self.S.rows, self.S.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    @property
    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d]


def _find_pivot(S: list[list[int]], t: int, m: int, n: int) -> tuple[int, int] | None:
    # smallest nonzero |entry| in the trailing block, ties by (row, col)
    best = None
    best_abs = 0
    for i in range(t, m):
        row = S[i]
        for j in range(t, n):
            v = row[j]
            if v and (best is None or abs(v) < best_abs):
                best, best_abs = (i, j), abs(v)
                if best_abs == 1:
                    return best
    return best


def smith_normal_form(A: IntMatrix, *, transforms: bool = True) -> SmithDecomposition:
    """Smith normal form with deterministic pivoting.

    Pivots are the smallest nonzero absolute value in the remaining block,
    ties broken by lowest row then lowest column index.  With
    ``transforms=False`` the unimodular matrices are not tracked (identity
    placeholders are returned) which is much cheaper when only the invariant
    factors are needed.
    """
    m, n = A.rows, A.cols
    S = [r[:] for r in A.data]
    U = IntMatrix.identity(m).data if transforms else None
    Ui = IntMatrix.identity(m).data if transforms else None
    V = IntMatrix.identity(n).data if transforms else None

    def swap_rows(i: int, j: int) -> None:
        S[i], S[j] = S[j], S[i]
        if transforms:
            U[i], U[j] = U[j], U[i]
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def swap_cols(i: int, j: int) -> None:
        for r in S:
            r[i], r[j] = r[j], r[i]
        if transforms:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst += q * row_src
        rs, rd = S[src], S[dst]
        for j in range(n):
            if rs[j]:
                rd[j] += q * rs[j]
        if transforms:
            us, ud = U[src], U[dst]
            for j in range(m):
                if us[j]:
                    ud[j] += q * us[j]
            for r in Ui:
                if r[dst]:
                    r[src] -= q * r[dst]

    def add_col(dst: int, src: int, q: int) -> None:
        for r in S:
            if r[src]:
                r[dst] += q * r[src]
        if transforms:
            for r in V:
                if r[src]:
                    r[dst] += q * r[src]

    def negate_row(i: int) -> None:
        S[i] = [-v for v in S[i]]
        if transforms:
            U[i] = [-v for v in U[i]]
            for r in Ui:
                r[i] = -r[i]

    for t in range(min(m, n)):
        piv = _find_pivot(S, t, m, n)
        if piv is None:
            break
        if piv[0] != t:
            swap_rows(t, piv[0])
        if piv[1] != t:
            swap_cols(t, piv[1])
        while True:
            p = S[t][t]
            dirty = False
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // p))
                    if S[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // p))
                    if S[t][j]:
                        dirty = True
            if dirty:
                # a remainder smaller than the pivot survived: promote it
                best = None
                for i in range(t + 1, m):
                    if S[i][t] and (best is None or abs(S[i][t]) < abs(S[best[0]][best[1]])):
                        best = (i, t)
                for j in range(t + 1, n):
                    if S[t][j] and (best is None or abs(S[t][j]) < abs(S[best[0]][best[1]])):
                        best = (t, j)
                if best[0] != t:
                    swap_rows(t, best[0])
                else:
                    swap_cols(t, best[1])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if S[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            negate_row(t)

    if transforms:
        return SmithDecomposition(
            IntMatrix(m, m, U), IntMatrix(m, n, S), IntMatrix(n, n, V), IntMatrix(m, m, Ui)
        )
    eye_m, eye_n = IntMatrix.identity(m), IntMatrix.identity(n)
    return SmithDecomposition(eye_m, IntMatrix(m, n, S), eye_n, eye_m)


def invariant_factors(A: IntMatrix) -> list[int]:
    return smith_normal_form(A, transforms=False).invariant_factors


# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------


def hermite_basis(vectors: Iterable[Sequence[int]], dim: int) -> list[Vector]:
    """Hermite normal form basis of the lattice spanned by ``vectors``."""
    rows = [list(v) for v in vectors if any(v)]
    for v in rows:
        if len(v) != dim:
            raise DimensionError(f"vector of length {len(v)} in dimension {dim}")
    basis: list[Vector] = []
    col = 0
    while rows and col < dim:
        active = [r for r in rows if r[col]]
        if not active:
            col += 1
            continue
        rest = [r for r in rows if not r[col]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            p = active[0]
            nxt = [p]
            for r in active[1:]:
                q = r[col] // p[col]
                r = [a - q * b for a, b in zip(r, p)]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        p = active[0]
        if p[col] < 0:
            p = [-a for a in p]
        for b in basis:
            if b[col]:
                q = b[col] // p[col]
                if q:
                    b[:] = [a - q * c for a, c in zip(b, p)]
        basis.append(p)
        rows = rest
        col += 1
    return basis


def _pivot(v: Sequence[int]) -> int:
    for i, a in enumerate(v):
        if a:
            return i
    return -1


def solve_in_lattice(v: Sequence[int], basis: Sequence[Sequence[int]]) -> list[int] | None:
    """Coefficients ``c`` with ``sum(c[i] * basis[i]) == v`` or ``None``.

    ``basis`` must be in echelon form (as returned by :func:`hermite_basis`).
    """
    r = list(v)
    coeffs = []
    for b in basis:
        p = _pivot(b)
        if r[p] % b[p]:
            return None
        q = r[p] // b[p]
        coeffs.append(q)
        if q:
            r = [a - q * c for a, c in zip(r, b)]
    if any(r):
        return None
    return coeffs


def member(v: Sequence[int], basis: Sequence[Sequence[int]]) -> bool:
    """Whether ``v`` is an integer combination of the echelon ``basis``."""
    return solve_in_lattice(v, basis) is not None


def kernel_lattice(A: IntMatrix) -> list[Vector]:
    """Hermite basis of ``{x in Z^cols : A x = 0}``.

    The basis comes from the unimodular column transform of the Smith form, so
    it spans the whole integer kernel, not just a finite-index sublattice.
    """
    if A.rows == 0:
        return IntMatrix.identity(A.cols).data
    dec = smith_normal_form(A)
    r = dec.rank
    V = dec.V
    return hermite_basis((V.column(j) for j in range(r, A.cols)), A.cols)


def image_lattice(A: IntMatrix) -> list[Vector]:
    """Hermite basis of the column span of ``A``."""
    return hermite_basis(A.columns(), A.rows)


# ---------------------------------------------------------------------------
# Finitely generated abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class FGAbelianGroup:
    """``Z^free_rank + Z/t_1 + ... + Z/t_r`` with ``t_1 | t_2 | ... | t_r``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "torsion", tuple(self.torsion))
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} do not form a divisibility chain")
        if any(t <= 1 for t in self.torsion):
            raise ValueError("invariant factors must exceed 1")

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> FGAbelianGroup:
        """Canonical form of a direct sum of cyclic groups (0 = infinite)."""
        orders = [abs(o) for o in orders]
        free = sum(1 for o in orders if o == 0)
        finite = [o for o in orders if o > 1]
        if not finite:
            return cls(free, ())
        n = len(finite)
        diag = IntMatrix(n, n)
        for i, o in enumerate(finite):
            diag.data[i][i] = o
        factors = [d for d in invariant_factors(diag) if d > 1]
        return cls(free, tuple(factors))

    @classmethod
    def trivial(cls) -> FGAbelianGroup:
        return cls(0, ())

    @property
    def orders(self) -> list[int]:
        """Generator orders, torsion first (0 = infinite)."""
        return list(self.torsion) + [0] * self.free_rank

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def is_torsion_free(self) -> bool:
        return not self.torsion

    def __add__(self, other: FGAbelianGroup) -> FGAbelianGroup:
        if not isinstance(other, FGAbelianGroup):
            return NotImplemented
        return FGAbelianGroup.from_orders(self.orders + other.orders)

    def __mul__(self, k: int) -> FGAbelianGroup:
        return FGAbelianGroup.from_orders(self.orders * k)

    __rmul__ = __mul__

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.torsion)}


def direct_sum(groups: Iterable[FGAbelianGroup]) -> FGAbelianGroup:
    orders: list[int] = []
    for g in groups:
        orders.extend(g.orders)
    return FGAbelianGroup.from_orders(orders)


def _cyclic_tensor(a: int, b: int) -> int:
    # Z/a (x) Z/b with 0 meaning Z; gcd(0, b) == b covers Z (x) Z/b
    return gcd(a, b)


def group_tensor(G: FGAbelianGroup, H: FGAbelianGroup) -> FGAbelianGroup:
    return FGAbelianGroup.from_orders(_cyclic_tensor(a, b) for a in G.orders for b in H.orders)


def group_tor(G: FGAbelianGroup, H: FGAbelianGroup) -> FGAbelianGroup:
    # free summands are flat
    return FGAbelianGroup.from_orders(gcd(a, b) for a in G.torsion for b in H.torsion)


# ---------------------------------------------------------------------------
# Homology of a pair of composable maps
# ---------------------------------------------------------------------------


@dataclass
class PairHomology:
    """``ker(d_k) / im(d_{k+1})`` with explicit generators and coordinates.

    ``generators[i]`` is a cycle whose class has order ``orders[i]`` (0 for
    infinite order).  :meth:`coordinates` expresses any cycle in that basis,
    torsion coordinates reduced into ``[0, order)``.
    """

    group: FGAbelianGroup
    generators: list[Vector]
    orders: list[int]
    ambient: int
    _kernel: list[Vector] = field(repr=False)
    _U: IntMatrix = field(repr=False)
    _keep: list[int] = field(repr=False)

    def kernel_coordinates(self, z: Sequence[int]) -> list[int] | None:
        return solve_in_lattice(z, self._kernel)

    def coordinates(self, z: Sequence[int]) -> list[int]:
        if len(z) != self.ambient:
            raise DimensionError("chain vector has the wrong length")
        c = solve_in_lattice(z, self._kernel)
        if c is None:
            raise ValueError("vector is not a cycle")
        w = self._U.apply(c) if self._U.cols else []
        out = []
        for idx, order in zip(self._keep, self.orders):
            out.append(w[idx] % order if order else w[idx])
        return out

    def is_boundary(self, z: Sequence[int]) -> bool:
        return self.kernel_coordinates(z) is not None and not any(self.coordinates(z))


def homology_of_pair(d_k: IntMatrix, d_k1: IntMatrix) -> PairHomology:
    """Homology at the middle of ``C_{k+1} --d_k1--> C_k --d_k--> C_{k-1}``.

    Raises :class:`NonZeroCompositionError` if ``d_k @ d_k1`` is nonzero.
    """
    n = d_k.cols
    if d_k1.rows != n:
        raise DimensionError(f"d_k has {n} columns but d_(k+1) has {d_k1.rows} rows")
    if d_k.rows and d_k1.cols and not (d_k @ d_k1).is_zero():
        raise NonZeroCompositionError("boundary squared is not zero")
    kernel = kernel_lattice(d_k)
    m = len(kernel)
    coords = []
    for b in d_k1.columns():
        c = solve_in_lattice(b, kernel)
        if c is None:  # pragma: no cover - guarded by the composition check
            raise NonZeroCompositionError("boundary column is not a cycle")
        coords.append(c)
    Bc = IntMatrix.from_columns(coords, m)
    dec = smith_normal_form(Bc)
    diag = dec.diagonal + [0] * (m - min(m, Bc.cols))
    keep = [i for i, s in enumerate(diag) if s != 1]
    orders = [diag[i] for i in keep]
    Ui = dec.U_inv
    generators = []
    for i in keep:
        g = [0] * n
        for j, kv in enumerate(kernel):
            a = Ui.data[j][i]
            if a:
                for t, x in enumerate(kv):
                    if x:
                        g[t] += a * x
        generators.append(g)
    group = FGAbelianGroup.from_orders(orders)
    return PairHomology(group, generators, orders, n, kernel, dec.U, keep)


# ---------------------------------------------------------------------------
# Homomorphisms between presented groups
# ---------------------------------------------------------------------------


def _relation_columns(orders: Sequence[int]) -> list[Vector]:
    cols = []
    for i, o in enumerate(orders):
        if o:
            v = [0] * len(orders)
            v[i] = o
            cols.append(v)
    return cols


def _check_hom(matrix: IntMatrix, source_orders: Sequence[int], target_orders: Sequence[int]) -> None:
    if matrix.shape != (len(target_orders), len(source_orders)):
        raise DimensionError(
            f"homomorphism matrix {matrix.shape} does not match "
            f"{len(target_orders)}x{len(source_orders)}"
        )


def relation_lattice(orders: Sequence[int]) -> list[Vector]:
    return hermite_basis(_relation_columns(orders), len(orders))


def hom_is_well_defined(matrix: IntMatrix, source_orders: Sequence[int], target_orders: Sequence[int]) -> bool:
    """Each source relation must map into the target relations."""
    _check_hom(matrix, source_orders, target_orders)
    rel = relation_lattice(target_orders)
    for j, o in enumerate(source_orders):
        if o:
            if not member([o * v for v in matrix.column(j)], rel):
                return False
    return True


def hom_kernel(matrix: IntMatrix, source_orders: Sequence[int], target_orders: Sequence[int]) -> list[Vector]:
    """Hermite basis of the preimage of the target relations, in source coordinates.

    The kernel of the induced homomorphism is this lattice modulo the source
    relations.
    """
    _check_hom(matrix, source_orders, target_orders)
    s = len(source_orders)
    rel = _relation_columns(target_orders)
    big = IntMatrix.from_columns(matrix.columns() + rel, len(target_orders))
    if big.rows == 0:
        return IntMatrix.identity(s).data
    ker = kernel_lattice(big)
    return hermite_basis((v[:s] for v in ker), s)


def hom_is_injective(matrix: IntMatrix, source_orders: Sequence[int], target_orders: Sequence[int]) -> bool:
    rel = relation_lattice(source_orders)
    return all(member(v, rel) for v in hom_kernel(matrix, source_orders, target_orders))


def hom_image(matrix: IntMatrix, source_orders: Sequence[int], target_orders: Sequence[int]) -> list[Vector]:
    """Hermite basis of image + target relations, in target coordinates."""
    _check_hom(matrix, source_orders, target_orders)
    return hermite_basis(matrix.columns() + _relation_columns(target_orders), len(target_orders))


def hom_is_surjective(matrix: IntMatrix, source_orders: Sequence[int], target_orders: Sequence[int]) -> bool:
    t = len(target_orders)
    return hom_image(matrix, source_orders, target_orders) == IntMatrix.identity(t).data


def hom_is_isomorphism(matrix: IntMatrix, source_orders: Sequence[int], target_orders: Sequence[int]) -> bool:
    return hom_is_injective(matrix, source_orders, target_orders) and hom_is_surjective(
        matrix, source_orders, target_orders
    )


def is_exact_at(
    f: IntMatrix, g: IntMatrix, a_orders: Sequence[int], b_orders: Sequence[int], c_orders: Sequence[int]
) -> bool:
    """Exactness of ``A --f--> B --g--> C`` at ``B``: ``im f == ker g`` as subgroups.

    Both subgroups are compared as lattices in generator coordinates of ``B``
    containing the relations of ``B``, so torsion is accounted for.
    """
    im_f = hom_image(f, a_orders, b_orders)
    ker_g = hermite_basis(hom_kernel(g, b_orders, c_orders) + _relation_columns(b_orders), len(b_orders))
    return im_f == ker_g


def hom_cokernel(matrix: IntMatrix, source_orders: Sequence[int], target_orders: Sequence[int]) -> FGAbelianGroup:
    t = len(target_orders)
    cols = matrix.columns() + _relation_columns(target_orders)
    pres = IntMatrix.from_columns(cols, t)
    factors = invariant_factors(pres) if pres.cols else []
    return FGAbelianGroup.from_orders([f for f in factors if f != 1] + [0] * (t - len(factors)))
