"""Command line behaviour: outputs and the exit-code contract."""

from __future__ import annotations

import json
import pathlib

from matchlog.cli import main

PROGRAMS = pathlib.Path(__file__).parent / "programs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_prove_exit_codes(capsys):
    code, out, _ = run(capsys, "prove", PROGRAMS / "listnat.lp", "list(cons(0,nil))",
                       "--depth", "8")
    assert code == 0 and out.startswith("Proved")
    assert "•[3]" in out
    code, out, _ = run(capsys, "prove", PROGRAMS / "listnat.lp", "list(cons(X,Y))",
                       "--depth", "8")
    assert code == 1 and out.strip() == "Failed"
    code, out, _ = run(capsys, "prove", PROGRAMS / "gc.lp", "connected(X,Y)",
                       "--depth", "50")
    assert code == 2 and out.strip() == "Unknown"


def test_solve_surface_names(capsys):
    code, out, _ = run(capsys, "solve", PROGRAMS / "gc.lp", "connected(X,Y)",
                       "--max-answers", "1")
    assert code == 0
    assert out.strip() == "{Y -> X}"
    code, out, _ = run(capsys, "solve", PROGRAMS / "listnat.lp", "list(cons(X,Y))",
                       "--max-answers", "1")
    assert out.strip() == "{X -> 0, Y -> nil}"


def test_solve_bound_marker(capsys):
    code, out, _ = run(capsys, "solve", PROGRAMS / "bad.lp", "bad(X)",
                       "--max-steps", "100")
    assert code == 0
    assert out.strip() == "%% bound reached"


def test_tree_formats(capsys):
    code, out, _ = run(capsys, "tree", PROGRAMS / "listnat_plus.lp", "list(cons(0,nil))",
                       "--depth", "3")
    assert code == 0
    assert out.count("•[") == 5
    code, out, _ = run(capsys, "tree", PROGRAMS / "gc.lp", "connected(X,Y)",
                       "--depth", "2", "--format", "dot")
    assert code == 0 and "shape=point" in out
    code, out, _ = run(capsys, "tree", PROGRAMS / "gc.lp", "connected(X,Y)",
                       "--depth", "0", "--format", "json")
    data = json.loads(out)
    assert data["truncated"] is True and data["children"] == []


def test_check_lax(capsys):
    code, out, _ = run(capsys, "check", PROGRAMS / "listnat.lp", "--what", "lax")
    assert code == 0
    assert "LAX OK" in out
    assert "STRICT FAIL  f=(0):0->1  A=nat(X1)" in out
    assert "lhs={} rhs={{}}" in out


def test_check_inj(capsys):
    code, out, _ = run(capsys, "check", PROGRAMS / "gc.lp", "--what", "inj")
    assert code == 0
    assert "STRICT OK" in out


def test_check_bridge(capsys):
    code, out, _ = run(capsys, "check", PROGRAMS / "gc.lp", "--what", "bridge",
                       "--max-steps", "200")
    assert code == 0
    assert "BRIDGE OK" in out and "BRIDGE FAIL" not in out


def test_check_ground_oracle(capsys):
    code, out, _ = run(capsys, "check", PROGRAMS / "ex33.lp", "--what", "ground-oracle",
                       "--levels", "4")
    assert code == 0
    assert out.count("GROUND OK") == 4
    code, _, err = run(capsys, "check", PROGRAMS / "gc.lp", "--what", "ground-oracle")
    assert code == 65 and "variable-free" in err


def test_check_json_format(capsys):
    code, out, _ = run(capsys, "check", PROGRAMS / "listnat.lp", "--what", "lax",
                       "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True and data["lax_failures"] == 0
    assert data["witnesses"][0]["arrow"] == "(0):0->1"
    assert data["witnesses"][0]["atom"] == "nat(X1)"

    code, out, _ = run(capsys, "check", PROGRAMS / "ex33.lp", "--what", "ground-oracle",
                       "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["ok"] is True and len(data["atoms"]) == 4

    code, out, _ = run(capsys, "check", PROGRAMS / "gc.lp", "--what", "bridge",
                       "--format", "json", "--max-steps", "200")
    data = json.loads(out)
    assert code == 0 and data["ok"] is True
    conn = [g for g in data["goals"] if g["goal"] == "connected(X1, X2)"]
    assert conn and conn[0]["answers"][0]["tm"] == "Proved"


def test_classify_output(capsys):
    code, out, _ = run(capsys, "classify", PROGRAMS / "gc.lp")
    assert code == 0
    assert out.strip() == "existential: clause 2 of 2 (variable Z)"
    code, out, _ = run(capsys, "classify", PROGRAMS / "listnat.lp")
    assert out.strip() == "non-existential"


def test_usage_and_parse_errors(capsys, tmp_path):
    code, _, err = run(capsys, "frobnicate", PROGRAMS / "gc.lp")
    assert code == 64
    code, _, err = run(capsys, "prove", PROGRAMS / "gc.lp")
    assert code == 64
    broken = tmp_path / "broken.lp"
    broken.write_text("p(a.\n")
    code, _, err = run(capsys, "prove", broken, "p(X)")
    assert code == 65 and "1:" in err
    code, _, err = run(capsys, "prove", tmp_path / "missing.lp", "p(X)")
    assert code == 65
    code, _, err = run(capsys, "prove", PROGRAMS / "listnat.lp", "nat(s(X,Y))")
    assert code == 65 and "arity" in err
