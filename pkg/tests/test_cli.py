import io
import json

import pytest

from surgobs import cli
from surgobs import complete_intersection as ci

VERDICT_EXIT = {
    "Diffeomorphic": 0, "NotDiffeomorphic": 1, "Indeterminate": 2,
    "elementary": 0, "elementary-after-word": 0, "inconclusive": 2,
}

HYPERBOLIC_TRIPLE = {"epsilon": 1, "variant": "mu", "V_rank": 2, "V0_rank": 2, "V1_rank": 2,
                     "f": [[1, 0], [0, 1]], "g": [[1, 0], [0, 1]],
                     "lambda": [[0, 1], [1, 0]], "mu": [0, 0]}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def dump(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_ci_compare(capsys):
    code, rep = run(capsys, "ci", "compare", "3", "5", "5,1")
    assert code == 0 and rep["verdict"] == "Diffeomorphic" and rep["schema"] == 1
    code, rep = run(capsys, "ci", "compare", "3", "8", "4,2")
    assert code == 1 and rep["verdict"] == "NotDiffeomorphic"
    assert "euler_characteristic" in rep["differing"]
    assert set(rep["predicates"]) == {"intro", "prop12"}
    code, _ = run(capsys, "ci", "compare", "2", "3", "3")
    assert code == 3
    code, _ = run(capsys, "ci", "compare", "3", "5", "x")
    assert code == 3
    code, _ = run(capsys, "ci", "compare", "3", "0", "5")
    assert code == 3


def test_ci_compare_indeterminate(capsys, monkeypatch):
    fixed = ci.invariants(ci.MultiDegree(3, (8,)))
    monkeypatch.setattr(ci, "invariants", lambda m: fixed)
    code, rep = run(capsys, "ci", "compare", "3", "8", "4,2")
    assert code == 2 and rep["verdict"] == "Indeterminate"


def test_ci_invariants(capsys):
    code, rep = run(capsys, "ci", "invariants", "3", "5")
    assert code == 0
    assert rep["invariants"]["euler_characteristic"] == -200
    assert rep["invariants"]["pontrjagin"] == [-20]


def test_odd_check(capsys, tmp_path):
    code, rep = run(capsys, "odd", "check", dump(tmp_path, "e.json", {"epsilon": 1, "r": 1, "V": [[1], [0]]}))
    assert code == 0 and rep["verdict"] == "elementary" and rep["word"] == []
    f1 = dump(tmp_path, "f.json", {"epsilon": 1, "r": 1, "V": [[0], [1]]})
    code, rep = run(capsys, "odd", "check", f1)
    assert code == 0 and rep["word"] == [{"type": "Flip", "i": 1}]
    code, rep = run(capsys, "odd", "check", f1, "--depth", "0")
    assert code == 2 and rep["verdict"] == "inconclusive"
    code, _ = run(capsys, "odd", "check", dump(tmp_path, "bad.json", {"epsilon": 1, "r": 1, "V": [[2], [0]]}))
    assert code == 3
    code, _ = run(capsys, "odd", "check", str(tmp_path / "missing.json"))
    assert code == 3


def test_odd_check_nontrivial_group_is_inconclusive(capsys, tmp_path):
    obj = {"group": {"order": 2, "mul_table": [[0, 1], [1, 0]], "w": [1, 1]},
           "epsilon": 1, "r": 1, "V": [[[0, 0]], [[1, 0]]]}
    code, rep = run(capsys, "odd", "check", dump(tmp_path, "g.json", obj))
    assert code == 2 and rep["verdict"] == "inconclusive"


def test_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"epsilon": 1, "r": 1, "V": [[0], [1]]})))
    code, rep = run(capsys, "odd", "check", "-")
    assert code == 0


def test_seven_check(capsys, tmp_path):
    hyp = {"S": [[0, 1], [1, 0]], "rho": [], "p0": [], "p1": []}
    code, rep = run(capsys, "seven", "check", dump(tmp_path, "a.json", {"sign_W": 0, "char_numbers": [0], "datum": hyp}))
    assert code == 0 and rep["witness"] is not None
    code, rep = run(capsys, "seven", "check", dump(tmp_path, "b.json", {"sign_W": 8, "char_numbers": [0], "datum": hyp}))
    assert code == 1 and rep["sign_vanishes"] is False
    code, rep = run(capsys, "seven", "check", dump(tmp_path, "c.json", {"sign_W": 0, "char_numbers": [1], "datum": hyp}))
    assert code == 1 and rep["char_numbers_vanish"] is False
    code, _ = run(capsys, "seven", "check",
                  dump(tmp_path, "d.json", {"sign_W": 0, "char_numbers": [0], "datum": {"S": [[1, 1], [1, 1]]}}))
    assert code == 3


def test_form_verify(capsys, tmp_path):
    good = {"form": {"epsilon": 1, "variant": "mu", "rank": 2, "lambda": [[0, 1], [1, 0]], "mu": [[0], [0]]}}
    code, rep = run(capsys, "form", "verify", dump(tmp_path, "g.json", good))
    assert code == 0
    bad = {"form": {"epsilon": 1, "variant": "mu", "rank": 2, "lambda": [[0, 1], [2, 0]], "mu": [[0], [0]]}}
    code, rep = run(capsys, "form", "verify", dump(tmp_path, "b.json", bad))
    assert code == 1 and "axiom ii)" in json.dumps(rep["failed"])
    code, rep = run(capsys, "form", "verify", dump(tmp_path, "w.json", {"triple": HYPERBOLIC_TRIPLE, "witness": [[1, 0]]}))
    assert code == 0
    code, rep = run(capsys, "form", "verify", dump(tmp_path, "x.json", {"triple": HYPERBOLIC_TRIPLE, "witness": [[1, 1]]}))
    assert code == 1
    code, _ = run(capsys, "form", "verify", dump(tmp_path, "n.json", {"nothing": 1}))
    assert code == 3


def test_usage_errors(capsys):
    code, _ = run(capsys, "nonsense")
    assert code == 3
    code, _ = run(capsys)
    assert code == 3


def test_deterministic_output(capsys, tmp_path):
    path = dump(tmp_path, "f.json", {"epsilon": -1, "r": 1, "V": [[2], [1]]})
    outs = []
    for _ in range(2):
        cli.main(["odd", "check", path])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


@pytest.mark.parametrize("argv", [["ci", "compare", "3", "5", "5,1"], ["ci", "compare", "3", "8", "4,2"],
                                  ["ci", "compare", "4", "2", "3"], ["ci", "compare", "5", "6", "3,2"]])
def test_exit_code_matches_verdict(capsys, argv):
    code, rep = run(capsys, *argv)
    assert rep["exit_code"] == code == VERDICT_EXIT[rep["verdict"]]
