from __future__ import annotations

import json

from forge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.startswith("{") else out)


def test_theory_show(capsys):
    code, rep = run(capsys, "theory", "show", "Semilattice", "--dsl")
    assert code == 0
    assert rep["status"] == "pass"
    assert rep["payload"]["name"] == "Semilattice"
    assert rep["command"] == {"name": "theory show", "argv": ["theory", "show", "Semilattice", "--dsl"]}


def test_theory_tensor_lists_added_equations(capsys):
    code, rep = run(capsys, "theory", "tensor", "--left", "Semilattice", "--right", "Sigma22Free", "--show")
    assert code == 0
    assert rep["payload"]["addedEquations"] == 4 == len(rep["payload"]["added"])


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.th"
    path.write_text("theory X {\n  op f : 2;\n  eq (x) f(x, = x;\n}\n")
    assert main(["theory", "parse", str(path)]) == 2
    assert "3:15" in capsys.readouterr().err


def test_unknown_suite_is_a_usage_error(capsys):
    assert main(["suite", "bogus"]) == 2


def test_unknown_monad_is_a_usage_error(capsys):
    assert main(["monad", "laws", "--monad", "nosuch"]) == 2


def test_no_command(capsys):
    assert main([]) == 2


def test_law_failure_and_replay(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, rep = run(capsys, "monad", "laws", "--monad", "powerset:broken", "--max-size", "2", "--out", str(out))
    assert code == 1
    assert rep["witness"]["kind"] == "monad-law"
    code, again = run(capsys, "replay", str(out))
    assert code == 1 and again["payload"]["reproduced"]
    code, again = run(capsys, "--replay", str(out))
    assert code == 1


def test_replay_reruns_command(tmp_path, capsys):
    out = tmp_path / "r.json"
    run(capsys, "subsume", "ramsey", "--samples", "100", "--out", str(out))
    code, rep = run(capsys, "replay", str(out))
    assert code == 0
    assert rep["payload"]["identicalPayload"]


def test_payload_is_deterministic(capsys):
    argv = ["tensor", "enum", "--left", "Semilattice", "--right", "Unary", "--max-size", "3", "--algebras"]
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first["payload"] == second["payload"]
    assert first["payload"]["counts"] == {"1": 1, "2": 2, "3": 3}


def test_budget_exit_code(capsys):
    code, rep = run(capsys, "free", "--theory", "Sigma22Free", "--gens", "a,b", "--depth", "4", "--budget", "100")
    assert code == 3
    assert rep["status"] == "partial"


def test_free_semilattice(capsys):
    code, rep = run(capsys, "free", "--theory", "Semilattice", "--gens", "a,b,c", "--depth", "4")
    assert code == 0
    assert rep["payload"]["classCount"] == 8


def test_commutativity_witness_replays(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, rep = run(capsys, "monad", "commutative", "--monad", "state:S=2", "--out", str(out))
    assert code == 0 and not rep["payload"]["commutative"]
    code, again = run(capsys, "replay", str(out))
    assert again["payload"]["reproduced"]


def test_commute_on_given_elements(capsys):
    code, rep = run(capsys, "monad", "commute", "--monad", "powerset:full", "--A", "2", "--B", "1",
                    "--p", '["a0", "a1"]', "--q", '["b0"]')
    assert code == 0 and rep["payload"]["commutes"]
    assert main(["monad", "commute", "--monad", "powerset:full", "--p", '["zz"]', "--q", "[]"]) == 2


def test_metalang_commands(tmp_path, capsys):
    left = tmp_path / "l.ml"
    right = tmp_path / "r.ml"
    decls = "base A\nbase B\nvar p : T A\nvar q : T B\n"
    left.write_text(decls + "term do x <- p; do y <- q; ret (x, y)\n")
    right.write_text(decls + "term do y <- q; do x <- p; ret (x, y)\n")
    code, rep = run(capsys, "metalang", "check", str(left))
    assert code == 0 and rep["payload"]["type"] == "T (A * B)"
    assert run(capsys, "metalang", "equiv", str(left), str(right), "--monad", "powerset:full")[0] == 0
    code, rep = run(capsys, "metalang", "equiv", str(left), str(right), "--monad", "state:S=2")
    assert code == 1 and rep["witness"]
    bad = tmp_path / "bad.ml"
    bad.write_text("term fst (a,\n")
    assert main(["metalang", "check", str(bad)]) == 2


def test_law_check_from_enumeration(tmp_path, capsys):
    report = tmp_path / "e.json"
    run(capsys, "tensor", "enum", "--left", "Semilattice", "--right", "Input(1)", "--max-size", "3",
        "--algebras", "--out", str(report))
    for i in range(6):
        code, rep = run(capsys, "tensor", "law-check", "--algebra", str(report), "--index", str(i),
                        "--left", "powerset:full", "--right", "free:I=1:depth=1")
        assert code == 0, rep


def test_law_check_rejects_negation(tmp_path, capsys):
    path = tmp_path / "a.json"
    path.write_text(json.dumps({
        "carrier": [0, 1], "left": "powerset:full", "right": "free:I=1:depth=1",
        "tables": {"join": {"0,0": 0, "0,1": 1, "1,0": 1, "1,1": 1}, "bot": {"": 0}, "read": {"0": 1, "1": 0}}}))
    code, rep = run(capsys, "tensor", "law-check", "--algebra", str(path))
    assert code == 1
    assert not rep["payload"]["commutation"]["ok"]
    assert not rep["payload"]["tensorLaw"]["ok"]


def test_subsume_decide(capsys):
    code, rep = run(capsys, "subsume", "decide", "--a", "pre:[{v}];cyc:[{u},{v}]", "--x", "pre:[];cyc:[u,v]",
                    "--check")
    assert code == 0
    assert rep["payload"]["subsumes"] is False and rep["payload"]["chainOracle"] is False


def test_forge_out_directory(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FORGE_OUT", str(tmp_path / "reports"))
    assert main(["subsume", "catalog"]) == 0
    saved = json.loads((tmp_path / "reports" / "subsume-catalog.json").read_text())
    assert saved["payload"]["agree"] == 50


def test_pretty_output(capsys):
    code, text = run(capsys, "--pretty", "tensor", "verify-state", "--S", "1", "--X", "1")
    assert code == 0
    assert text.startswith("tensor verify-state: pass")
    assert "expected: 2" in text


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("forge ")
