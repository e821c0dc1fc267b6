"""Command line interface.

Exit status: 0 computed or verified, 1 usage or input error, 2 a checked
property fails (a counterexample file is written), 3 the path cap was hit.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from pathlib import Path

from . import io
from .betweenness import (
    NotAPosetError,
    all_simplices,
    lipschitz_good_set,
    maximal_good_set,
    verify_axioms,
    verify_simplicial_identities,
)
from .gated import NotGatedError, excision_check, mayer_vietoris_check, validate_bet_decomposition, validate_decomposition
from .homology import magnitude_homology
from .kunneth import product_space, verify_kunneth
from .magchain import DEFAULT_CAP, PathCapExceeded
from .medial import cycle_graph, hypercube, is_diagonal, path_graph, random_tree, star_graph
from .spaces import FiniteSpace, InvalidSpaceError

OK, USAGE, VIOLATED, CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, k_default: int = 2) -> None:
    p.add_argument("--k-max", type=int, default=k_default, help="degree bound K")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum number of paths per degree")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for homology blocks")
    p.add_argument("--output", help="write the result here instead of stdout")
    p.add_argument("--witness", help="counterexample file (default: <command>-counterexample.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="maghom", description="Magnitude homology of finite metric and betweenness spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("homology", help="magnitude homology table")
    p.add_argument("space")
    p.add_argument("--length", action="append", help="restrict to a length class (repeatable)")
    _common(p)

    p = sub.add_parser("diagonal", help="diagonality report")
    p.add_argument("space")
    _common(p)

    p = sub.add_parser("kunneth", help="check the Künneth formula for a product")
    p.add_argument("X")
    p.add_argument("Y")
    _common(p)

    for name in ("excision", "mv"):
        p = sub.add_parser(name, help="excision" if name == "excision" else "Mayer-Vietoris sequence")
        p.add_argument("decomposition")
        p.add_argument("--gate-only", action="store_true", help="use the weaker literal condition (W gated in Z; one-sided projection)")
        _common(p)

    p = sub.add_parser("betweenness", help="betweenness structure checks")
    p.add_argument("action", choices=("verify",))
    p.add_argument("space")
    _common(p)

    p = sub.add_parser("goodset", help="maximal good set of a map")
    p.add_argument("morphism")
    _common(p)

    p = sub.add_parser("generate", help="emit a fixture")
    p.add_argument("family", choices=("hypercube", "cycle", "path", "star", "tree", "product"))
    p.add_argument("args", nargs="+")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--format", choices=("json",), default="json")
    return parser


# ---------------------------------------------------------------------------


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list[dict]) -> str:
    buf = _io.StringIO()
    if rows:
        keys = list(rows[0])
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow(["" if r.get(k) is None else (" ".join(map(str, r[k])) if isinstance(r.get(k), list) else r[k]) for k in keys])
    return buf.getvalue()


def _render(args, payload: dict, rows: list[dict]) -> str:
    return _csv(rows) if args.format == "csv" else io.dumps(payload)


def _witness(args, payload: dict) -> None:
    path = args.witness or f"{args.command}-counterexample.json"
    Path(path).write_text(io.dumps(payload))
    sys.stderr.write(f"counterexample written to {path}\n")


def _load_space(path: str):
    return io.space_from_json(io.read_json(path))


def cmd_homology(args) -> int:
    space = _load_space(args.space)
    lengths = args.length
    if lengths and not isinstance(space, FiniteSpace):
        raise UsageError("--length needs a metric space")
    table = magnitude_homology(space, args.k_max, lengths, cap=args.cap, jobs=args.jobs)
    text = table.to_csv() if args.format == "csv" else io.dumps(table.rows())
    _emit(args, text)
    return OK


def cmd_diagonal(args) -> int:
    space = _load_space(args.space)
    rep = is_diagonal(space, args.k_max, cap=args.cap)
    _emit(args, _render(args, rep.to_dict(), rep.entries))
    if not rep.diagonal:
        _witness(args, {"space": io.space_to_json(space), **rep.witness})
        return VIOLATED
    return OK


def cmd_kunneth(args) -> int:
    X, Y = _load_space(args.X), _load_space(args.Y)
    rep = verify_kunneth(X, Y, args.k_max, cap=args.cap)
    _emit(args, _render(args, rep.to_dict(), rep.per_degree))
    if not rep.holds:
        bad = [r for r in rep.per_class if r["verdict"] != "holds"]
        _witness(args, {"X": io.space_to_json(X), "Y": io.space_to_json(Y), "failures": bad})
        return VIOLATED
    return OK


def _decomposition(args):
    obj = io.read_json(args.decomposition)
    space, Y, Z, pi = io.decomposition_from_json(obj)
    try:
        if isinstance(space, FiniteSpace):
            return validate_decomposition(space, Y, Z, require_projection=not args.gate_only)
        return validate_bet_decomposition(space, Y, Z, pi, K=args.k_max, require_reverse=not args.gate_only)
    except NotGatedError as exc:
        _witness(args, {"decomposition": obj, "reason": str(exc).split(":")[0], "witness": exc.witness})
        return None


def cmd_excision(args) -> int:
    d = _decomposition(args)
    if d is None:
        return VIOLATED
    rep = excision_check(d, args.k_max, cap=args.cap, jobs=args.jobs)
    _emit(args, _render(args, {"decomposition": d.to_dict(), **rep.to_dict()}, rep.entries))
    if not rep.holds:
        _witness(args, {"decomposition": d.to_dict(), "failures": rep.failures()})
        return VIOLATED
    return OK


def cmd_mv(args) -> int:
    d = _decomposition(args)
    if d is None:
        return VIOLATED
    rep = mayer_vietoris_check(d, args.k_max, cap=args.cap, jobs=args.jobs)
    _emit(args, _render(args, {"decomposition": d.to_dict(), **rep.to_dict()}, rep.entries))
    if not rep.holds:
        _witness(args, {"decomposition": d.to_dict(), "entries": rep.entries})
        return VIOLATED
    return OK


def cmd_betweenness(args) -> int:
    space = _load_space(args.space)
    axioms = verify_axioms(space)
    simp = verify_simplicial_identities(space, args.k_max)
    payload = {"axioms": axioms.to_dict(), "simplicial": {"bound": simp.bound, "checked": simp.checked, "ok": simp.ok, "violations": len(simp.violations)}}
    rows = [{"check": "axioms", "ok": axioms.ok, "violations": len(axioms.violations)}, {"check": "simplicial", "ok": simp.ok, "violations": len(simp.violations)}]
    _emit(args, _render(args, payload, rows))
    if not (axioms.ok and simp.ok):
        _witness(args, {"space": io.space_to_json(space), "axioms": axioms.violations, "simplicial": simp.violations})
        return VIOLATED
    return OK


def cmd_goodset(args) -> int:
    f = io.map_from_json(io.read_json(args.morphism))
    K = args.k_max
    goods = maximal_good_set(f, K)
    bad = [list(x) for x in all_simplices(f.source.n, K) if x not in goods.members]
    sizes = {str(k): len(v) for k, v in goods.by_degree().items()}
    payload = {"bound": K, "stable": goods.stable, "good_counts": sizes, "not_good": bad}
    if isinstance(f.source, FiniteSpace) and isinstance(f.target, FiniteSpace) and f.is_1lipschitz():
        lip = lipschitz_good_set(f, K)
        payload["length_preserving_contained"] = lip.members <= goods.members
    rows = [{"k": int(k), "good": n} for k, n in sizes.items()]
    _emit(args, _render(args, payload, rows))
    return OK


def cmd_generate(args) -> int:
    fam, rest = args.family, args.args
    if fam == "product":
        if len(rest) != 2:
            raise UsageError("generate product needs two space files")
        X, Y = _load_space(rest[0]), _load_space(rest[1])
        _emit(args, io.dumps(io.space_to_json(product_space(X, Y))))
        return OK
    if len(rest) != 1:
        raise UsageError(f"generate {fam} needs one size argument")
    try:
        n = int(rest[0])
    except ValueError as exc:
        raise UsageError(f"size must be an integer, got {rest[0]!r}") from exc
    makers = {"hypercube": hypercube, "cycle": cycle_graph, "path": path_graph, "star": star_graph}
    g = random_tree(n, args.seed) if fam == "tree" else makers[fam](n)
    _emit(args, io.dumps(io.graph_to_json(g)))
    return OK


COMMANDS = {
    "homology": cmd_homology,
    "diagonal": cmd_diagonal,
    "kunneth": cmd_kunneth,
    "excision": cmd_excision,
    "mv": cmd_mv,
    "betweenness": cmd_betweenness,
    "goodset": cmd_goodset,
    "generate": cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "k_max", 0) < 0:
            raise UsageError("--k-max must be non-negative")
        if getattr(args, "cap", 1) < 1:
            raise UsageError("--cap must be positive")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"maghom: {exc}\n")
        return USAGE
    except PathCapExceeded as exc:
        l = None if exc.length is None else str(exc.length)
        sys.stderr.write(json.dumps({"error": "path cap exceeded", "k": exc.k, "l": l, "cap": exc.cap}) + "\n")
        return CAP
    except (OSError, json.JSONDecodeError, io.FormatError, InvalidSpaceError, NotAPosetError, ValueError, TypeError) as exc:
        sys.stderr.write(f"maghom: {exc}\n")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
