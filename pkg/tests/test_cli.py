from __future__ import annotations

import json
import subprocess
import sys

import pytest

from maghom import io
from maghom.cli import main
from maghom.medial import hypercube

from helpers import Q2


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def k2(tmp_path):
    return write(tmp_path / "k2.json", {"kind": "graph", "n": 2, "edges": [[0, 1]]})


@pytest.fixture
def p3(tmp_path):
    return write(tmp_path / "p3.json", {"kind": "graph", "n": 3, "edges": [[0, 1], [1, 2]]})


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_homology_of_k2(k2, capsys):
    code, out, _ = run(["homology", k2, "--k-max", "3"], capsys)
    assert code == 0
    rows = json.loads(out)
    assert rows == [{"k": k, "l": str(k), "rank": 2, "torsion": []} for k in range(4)]


def test_homology_csv_and_length_filter(tmp_path, capsys):
    c5 = write(tmp_path / "c5.json", {"kind": "graph", "n": 5, "edges": [[i, (i + 1) % 5] for i in range(5)]})
    code, out, _ = run(["homology", c5, "--k-max", "2", "--length", "3", "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines() == ["k,l,rank,torsion", "2,3,10,"]


def test_generate_then_diagonal(tmp_path, capsys):
    out = tmp_path / "q2.json"
    assert main(["generate", "hypercube", "2", "--output", str(out)]) == 0
    assert io.space_from_json(io.read_json(out)) == Q2
    code, text, _ = run(["diagonal", str(out), "--k-max", "3"], capsys)
    assert code == 0 and json.loads(text)["diagonal"] is True


def test_generate_round_trip(tmp_path, capsys):
    for fam, n in [("cycle", "6"), ("path", "4"), ("star", "3"), ("tree", "7"), ("hypercube", "3")]:
        code, text, _ = run(["generate", fam, n, "--seed", "3"], capsys)
        assert code == 0
        obj = json.loads(text)
        space = io.space_from_json(obj)
        assert space.n == obj["n"]
        again = io.space_from_json(json.loads(io.dumps(io.space_to_json(space))))
        assert again == space
    assert io.graph_to_json(hypercube(3)) == json.loads(run(["generate", "hypercube", "3"], capsys)[1])


def test_generate_product(k2, p3, capsys):
    code, text, _ = run(["generate", "product", k2, p3], capsys)
    assert code == 0
    prod = io.space_from_json(json.loads(text))
    assert prod.n == 6 and prod.dist[0][5] == 3


def test_mv_on_p3(tmp_path, capsys):
    dec = write(tmp_path / "d.json", {"space": {"kind": "graph", "n": 3, "edges": [[0, 1], [1, 2]]}, "Y": [0, 1], "Z": [1, 2]})
    code, text, _ = run(["mv", dec, "--k-max", "3"], capsys)
    assert code == 0
    rep = json.loads(text)
    assert rep["holds"] and {e["k"] for e in rep["entries"]} == {0, 1, 2, 3}
    code, _, _ = run(["excision", dec, "--k-max", "3"], capsys)
    assert code == 0


def test_non_gated_split_writes_a_witness(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    c4 = {"kind": "graph", "n": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}
    dec = write(tmp_path / "d.json", {"space": c4, "Y": [0, 1, 2], "Z": [2, 3, 0]})
    code, _, err = run(["excision", dec], capsys)
    assert code == 2
    w = json.loads((tmp_path / "excision-counterexample.json").read_text())
    assert w["witness"] == {"point": 3, "candidates": [], "W": [0, 2]}


def test_gate_only_excision_failure(tmp_path, capsys):
    c4 = {"kind": "graph", "n": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}
    dec = write(tmp_path / "d.json", {"space": c4, "Y": [0, 1], "Z": [0, 2, 3]})
    wit = tmp_path / "w.json"
    assert run(["excision", dec, "--k-max", "1", "--witness", str(wit)], capsys)[0] == 2
    code, _, _ = run(["excision", dec, "--k-max", "1", "--gate-only", "--witness", str(wit)], capsys)
    assert code == 2
    assert json.loads(wit.read_text())["failures"][0]["k"] == 1


def test_c5_diagonal_witness(tmp_path, capsys):
    c5 = write(tmp_path / "c5.json", {"kind": "graph", "n": 5, "edges": [[i, (i + 1) % 5] for i in range(5)]})
    wit = tmp_path / "w.json"
    code, _, _ = run(["diagonal", c5, "--k-max", "2", "--witness", str(wit)], capsys)
    assert code == 2
    w = json.loads(wit.read_text())
    assert (w["k"], w["l"]) == (2, "3")


def test_kunneth(k2, p3, capsys):
    code, text, _ = run(["kunneth", k2, p3, "--k-max", "2"], capsys)
    assert code == 0
    rep = json.loads(text)
    assert rep["holds"] and [d["k"] for d in rep["degrees"]] == [0, 1, 2]


def test_betweenness_verify(tmp_path, capsys):
    good = write(tmp_path / "poset.json", {"kind": "poset", "n": 4, "le": [[0, 1], [0, 2], [1, 3], [2, 3]]})
    assert run(["betweenness", "verify", good, "--k-max", "3"], capsys)[0] == 0
    table = [[[x, z] for z in range(3)] for x in range(3)]
    table[0][2] = table[2][0] = [0, 1, 2]
    table[0][1] = table[1][0] = [0, 1, 2]
    bad = write(tmp_path / "bad.json", {"kind": "betweenness", "intervals": table})
    wit = tmp_path / "w.json"
    assert run(["betweenness", "verify", bad, "--witness", str(wit)], capsys)[0] == 2
    assert json.loads(wit.read_text())["axioms"]


def test_goodset(tmp_path, capsys):
    p3 = {"kind": "graph", "n": 3, "edges": [[0, 1], [1, 2]]}
    k2 = {"kind": "graph", "n": 2, "edges": [[0, 1]]}
    m = write(tmp_path / "m.json", {"source": p3, "target": k2, "map": [0, 0, 1]})
    code, text, _ = run(["goodset", m, "--k-max", "2"], capsys)
    assert code == 0
    rep = json.loads(text)
    assert rep["length_preserving_contained"] is True
    assert [0, 1] in rep["not_good"]


def test_cap_overflow(tmp_path, capsys):
    c5 = write(tmp_path / "c5.json", {"kind": "graph", "n": 5, "edges": [[i, (i + 1) % 5] for i in range(5)]})
    code, _, err = run(["homology", c5, "--cap", "10"], capsys)
    assert code == 3
    info = json.loads(err)
    assert info["cap"] == 10 and "k" in info and "l" in info


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["homology"],
        ["homology", "/no/such/file.json"],
        ["generate", "cycle", "x"],
        ["generate", "cycle", "2"],
        ["generate", "hypercube", "9"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 1


def test_bad_inputs(tmp_path, capsys):
    f = write(tmp_path / "f.json", {"kind": "metric", "dist": [[0, 0.5], [0.5, 0]]})
    assert run(["homology", f], capsys)[0] == 1
    d = write(tmp_path / "d.json", {"kind": "graph", "n": 3, "edges": [[0, 1]]})
    assert run(["homology", d], capsys)[0] == 1
    p = write(tmp_path / "p.json", {"kind": "poset", "n": 2, "le": [[0, 1], [1, 0]]})
    assert run(["betweenness", "verify", p], capsys)[0] == 1
    k = write(tmp_path / "k.json", {"kind": "graph", "n": 2, "edges": [[0, 1]]})
    assert run(["homology", k, "--k-max", "-1"], capsys)[0] == 1
    assert run(["homology", k, "--cap", "0"], capsys)[0] == 1


def test_output_is_byte_identical(tmp_path):
    c5 = write(tmp_path / "c5.json", {"kind": "graph", "n": 5, "edges": [[i, (i + 1) % 5] for i in range(5)]})
    outs = []
    for i in range(2):
        target = tmp_path / f"out{i}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "maghom.cli", "homology", c5, "--k-max", "3", "--output", str(target)],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
