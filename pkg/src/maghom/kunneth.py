"""Staircase interleavings, the cross product of paths and the Künneth check."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations
from math import comb, gcd
from typing import Sequence

from .betweenness import BetweennessStructure, bet_product
from .homology import HomologyTable, magnitude_homology
from .intlinalg import FGAbelianGroup, IntMatrix, direct_sum, group_tensor, group_tor, hom_is_injective, hom_is_well_defined
from .magchain import DEFAULT_CAP, Chain, boundary, path_length
from .spaces import FiniteSpace, format_rational, l1_product

H, V = "H", "V"


@dataclass(frozen=True)
class Staircase:
    """A monotone lattice path from ``(0, 0)`` to ``(n, l)``.

    ``H`` advances the first coordinate, ``V`` the second.
    """

    moves: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.moves.count(H)

    @property
    def l(self) -> int:
        return self.moves.count(V)

    def point(self, t: int) -> tuple[int, int]:
        h = sum(1 for m in self.moves[:t] if m == H)
        return h, t - h

    def sigma_h(self, t: int) -> int:
        return self.point(t)[0]

    def sigma_v(self, t: int) -> int:
        return self.point(t)[1]

    def squares_below(self) -> int:
        """Unit squares between the path and the bottom-right corner."""
        s = vs = 0
        for m in self.moves:
            if m == V:
                vs += 1
            else:
                s += vs
        return s

    def sign(self) -> int:
        return -1 if self.squares_below() % 2 else 1

    def index_kind(self, m: int) -> str:
        """Classify an interior index: ``flat``, ``wall``, ``corner_hv`` or ``corner_vh``."""
        if not 0 < m < len(self.moves):
            raise IndexError("only interior indices are classified")
        before, after = self.moves[m - 1], self.moves[m]
        if before == after:
            return "flat" if before == H else "wall"
        return "corner_hv" if before == H else "corner_vh"

    def delete(self, m: int) -> Staircase:
        """Remove interior index ``m`` of a flat or wall (drop one move)."""
        kind = self.index_kind(m)
        if kind not in ("flat", "wall"):
            raise ValueError("only flats and walls can be deleted")
        return Staircase(self.moves[: m] + self.moves[m + 1:])

    def flip(self, m: int) -> Staircase:
        """Swap the two moves around the corner at ``m``."""
        if not self.index_kind(m).startswith("corner"):
            raise ValueError("only corners can be flipped")
        mv = list(self.moves)
        mv[m - 1], mv[m] = mv[m], mv[m - 1]
        return Staircase(tuple(mv))

    def __str__(self) -> str:
        return "".join(self.moves)


def staircases(n: int, l: int) -> list[Staircase]:
    """All ``C(n+l, n)`` staircases, positions of the ``H`` moves in lex order."""
    if n < 0 or l < 0:
        raise ValueError("sizes must be non-negative")
    out = []
    for hs in combinations(range(n + l), n):
        mv = [V] * (n + l)
        for i in hs:
            mv[i] = H
        out.append(Staircase(tuple(mv)))
    assert len(out) == comb(n + l, n)
    return out


def sign(sigma: Staircase) -> int:
    return sigma.sign()


def interleave(x: Sequence[int], y: Sequence[int], sigma: Staircase, second_size: int) -> tuple[int, ...]:
    """The path ``t -> (x[sigma_h(t)], y[sigma_v(t)])`` in the row-major product."""
    if sigma.n != len(x) - 1 or sigma.l != len(y) - 1:
        raise ValueError("staircase does not match the path degrees")
    out = []
    h = v = 0
    out.append(x[0] * second_size + y[0])
    for m in sigma.moves:
        if m == H:
            h += 1
        else:
            v += 1
        out.append(x[h] * second_size + y[v])
    return tuple(out)


def product_space(X, Y):
    if isinstance(X, FiniteSpace) and isinstance(Y, FiniteSpace):
        return l1_product(X, Y)
    return bet_product(X, Y)


def _degree(chain: Chain) -> int | None:
    degs = {len(p) - 1 for p in chain}
    if len(degs) > 1:
        raise ValueError("chain is not of pure degree")
    return degs.pop() if degs else None


def cross_product(cx: Chain, cy: Chain, second_size: int) -> Chain:
    """Signed sum of all interleavings, bilinearly extended."""
    n, l = _degree(cx), _degree(cy)
    if n is None or l is None:
        return {}
    stairs = [(s, s.sign()) for s in staircases(n, l)]
    out: Chain = defaultdict(int)
    for p, a in cx.items():
        for q, b in cy.items():
            for s, e in stairs:
                out[interleave(p, q, s, second_size)] += e * a * b
    return {p: c for p, c in out.items() if c}


def _add(a: Chain, b: Chain, scale: int = 1) -> Chain:
    out = dict(a)
    for p, c in b.items():
        out[p] = out.get(p, 0) + scale * c
    return {p: c for p, c in out.items() if c}


def chain_map_defect(X, Y, cx: Chain, cy: Chain, P=None) -> Chain:
    """``d(x[]y) - (dx)[]y - (-1)^n x[](dy)``; empty exactly when the identity holds."""
    P = P if P is not None else product_space(X, Y)
    m = Y.n
    n = _degree(cx) or 0
    lhs = boundary(P, cross_product(cx, cy, m))
    rhs = _add(cross_product(boundary(X, cx), cy, m), cross_product(cx, boundary(Y, cy), m), -1 if n % 2 else 1)
    return _add(lhs, rhs, -1)


# ---------------------------------------------------------------------------
# Künneth verification
# ---------------------------------------------------------------------------


def _sum_len(a, b):
    return None if a is None or b is None else a + b


@dataclass
class KunnethReport:
    K: int
    per_degree: list[dict] = field(default_factory=list)
    per_class: list[dict] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(r["verdict"] == "holds" for r in self.per_degree) and all(
            r["verdict"] == "holds" for r in self.per_class
        )

    def to_dict(self) -> dict:
        return {"K": self.K, "holds": self.holds, "degrees": self.per_degree, "classes": self.per_class}


def _fmt_len(v):
    return None if v is None else format_rational(v)


def verify_kunneth(X, Y, K: int, *, cap: int = DEFAULT_CAP, check_injective: bool = True) -> KunnethReport:
    """Compare ``MH(X x Y)`` with the Künneth formula, per degree and per length.

    The sequence splits for free complexes, so the middle group must be
    isomorphic to ``tensor part + Tor part``.  Separately, the cross product of
    homology generators must induce an injective map from the tensor part.
    """
    P = product_space(X, Y)
    hx = magnitude_homology(X, K, cap=cap)
    hy = magnitude_homology(Y, K, cap=cap)
    hp = magnitude_homology(P, K, cap=cap)
    report = KunnethReport(K)
    tensor_parts: dict[tuple[int, object], list[FGAbelianGroup]] = defaultdict(list)
    tor_parts: dict[tuple[int, object], list[FGAbelianGroup]] = defaultdict(list)
    pairs: dict[tuple[int, object], list] = defaultdict(list)
    for (n, a), ex in hx.entries.items():
        for (m, b), ey in hy.entries.items():
            L = _sum_len(a, b)
            if n + m <= K:
                tensor_parts[(n + m, L)].append(group_tensor(ex.group, ey.group))
                pairs[(n + m, L)].append((ex, ey))
            if n + m + 1 <= K:
                tor_parts[(n + m + 1, L)].append(group_tor(ex.group, ey.group))
    classes = set(tensor_parts) | set(tor_parts) | set(hp.entries)
    for k, L in sorted(classes, key=lambda kl: (kl[0], (0, 0) if kl[1] is None else (1, kl[1]))):
        lhs = direct_sum(tensor_parts.get((k, L), []))
        tor = direct_sum(tor_parts.get((k, L), []))
        prod = hp.group(k, L)
        row = {"k": k, "l": _fmt_len(L), "lhs": str(lhs), "tor": str(tor), "product": str(prod)}
        ok = prod == lhs + tor
        if check_injective and pairs.get((k, L)):
            inj = _cross_injective(pairs[(k, L)], hp, k, L, Y.n)
            row["cross_injective"] = inj
            ok = ok and inj
        row["verdict"] = "holds" if ok else "fails"
        report.per_class.append(row)
    for k in range(K + 1):
        lhs = direct_sum(g for (j, _), gs in tensor_parts.items() if j == k for g in gs)
        tor = direct_sum(g for (j, _), gs in tor_parts.items() if j == k for g in gs)
        prod = hp.total(k)
        report.per_degree.append(
            {"k": k, "lhs": str(lhs), "tor": str(tor), "product": str(prod), "verdict": "holds" if prod == lhs + tor else "fails"}
        )
    return report


def _cross_injective(pairs, hp: HomologyTable, k: int, L, m: int) -> bool:
    target = hp.entry(k, L)
    t_orders = target.orders if target else []
    cols, orders = [], []
    for ex, ey in pairs:
        for g, og in zip(ex.generators, ex.orders):
            for h, oh in zip(ey.generators, ey.orders):
                o = gcd(og, oh)
                if o == 1:
                    continue
                c = cross_product(g, h, m)
                cols.append(target.coordinates(c) if target else [])
                orders.append(o)
    if not cols:
        return True
    M = IntMatrix.from_columns(cols, len(t_orders))
    return hom_is_well_defined(M, orders, t_orders) and hom_is_injective(M, orders, t_orders)
