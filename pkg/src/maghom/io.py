"""JSON formats for spaces, decompositions and maps.

Spaces::

    {"kind": "metric", "dist": [["0", "1/2"], ["1/2", "0"]], "labels": [...]}
    {"kind": "graph", "n": 4, "edges": [[0, 1], [1, 2]]}
    {"kind": "poset", "n": 4, "le": [[0, 1], [0, 2]]}
    {"kind": "betweenness", "intervals": [[[0], [0, 1]], [[0, 1], [1]]]}

Decompositions are ``{"space": ..., "Y": [...], "Z": [...]}`` (optionally
``"pi": {"z": w}`` for betweenness structures); maps are
``{"source": ..., "target": ..., "map": [...]}``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .betweenness import BetweennessStructure, from_poset
from .spaces import FiniteGraph, FiniteSpace, PointMap, format_rational, graph_metric


class FormatError(ValueError):
    pass


def space_from_json(obj: dict):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FormatError("a space needs a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "metric":
            return FiniteSpace(obj["dist"], obj.get("labels"))
        if kind == "graph":
            return graph_metric(FiniteGraph(int(obj["n"]), obj.get("edges", [])))
        if kind == "poset":
            return from_poset(int(obj["n"]), obj.get("le", []))
        if kind == "betweenness":
            return BetweennessStructure(obj["intervals"], obj.get("labels"))
    except KeyError as exc:
        raise FormatError(f"{kind} space is missing {exc}") from exc
    raise FormatError(f"unknown space kind {kind!r}")


def space_to_json(space) -> dict:
    if isinstance(space, FiniteSpace):
        out = {"kind": "metric", "dist": [[format_rational(v) for v in row] for row in space.dist]}
        if space.labels:
            out["labels"] = list(space.labels)
        return out
    if isinstance(space, BetweennessStructure):
        out = {"kind": "betweenness", "intervals": space.table()}
        if space.labels:
            out["labels"] = list(space.labels)
        return out
    raise TypeError(f"cannot serialise {type(space).__name__}")


def graph_to_json(g: FiniteGraph) -> dict:
    return {"kind": "graph", "n": g.n, "edges": [list(e) for e in sorted(g.edges)]}


def decomposition_from_json(obj: dict):
    """``(space, Y, Z, pi)``; ``pi`` is ``None`` unless given."""
    try:
        space = space_from_json(obj["space"])
        Y = [int(v) for v in obj["Y"]]
        Z = [int(v) for v in obj["Z"]]
    except KeyError as exc:
        raise FormatError(f"decomposition is missing {exc}") from exc
    pi = obj.get("pi")
    if pi is not None:
        pi = {int(k): int(v) for k, v in pi.items()}
    return space, Y, Z, pi


def map_from_json(obj: dict) -> PointMap:
    try:
        return PointMap(space_from_json(obj["source"]), space_from_json(obj["target"]), [int(v) for v in obj["map"]])
    except KeyError as exc:
        raise FormatError(f"map is missing {exc}") from exc


def read_json(path: str | Path):
    with open(path) as fh:
        return json.load(fh)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"
