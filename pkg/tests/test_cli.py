import json
import subprocess
from pathlib import Path

from cobweave.cli import run

DATA = Path(__file__).resolve().parent.parent / "data"


def records(capsys):
    out = capsys.readouterr().out
    return [json.loads(line) for line in out.splitlines()]


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    return code, records(capsys)


def test_accept(capsys):
    code, recs = call(capsys, "accept", DATA / "ab.json", "--word", "ABAB")
    assert code == 0 and recs[0]["accepted"] is True
    code, recs = call(capsys, "accept", DATA / "ab.json", "--word", "ABA")
    assert code == 0 and recs[0]["accepted"] is False
    code, recs = call(capsys, "accept", DATA / "dyck_psa.json", "--word", "(())")
    assert recs[0]["accepted"] is True


def test_builtin_fixture(capsys):
    code, recs = call(capsys, "accept", "fixture:ab", "--word", "AB")
    assert code == 0 and recs[0]["accepted"] is True


def test_eval(capsys):
    code, recs = call(capsys, "eval", DATA / "ab.json", DATA / "floating_ABAB.json")
    assert code == 0 and recs[0]["matrix"]["entries"] == [[1]]
    code, recs = call(capsys, "eval", DATA / "ab.json", DATA / "snake.json")
    assert recs[0]["matrix"]["entries"] == [[1, 0], [0, 1]]


def test_eval_mistyped_exits_2(capsys):
    assert run(["eval", str(DATA / "ab.json"), str(DATA / "mistyped.json")]) == 2


def test_bad_inputs_exit_2(capsys, tmp_path):
    assert run(["accept", str(tmp_path / "missing.json"), "--word", "A"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  \"states\": [,]\n}")
    assert run(["accept", str(bad), "--word", "A"]) == 2
    assert "line 2" in capsys.readouterr().err
    assert run(["accept", str(DATA / "ab.json"), "--word", "AZ"]) == 2
    assert run(["no-such-command"]) == 2


def test_size_cap_exits_3(capsys, tmp_path, monkeypatch):
    from cobweave.cobordism import diagram_to_json, floating_line
    n = 70
    cycle = {"states": [f"s{i}" for i in range(n)], "alphabet": ["A"],
             "transitions": [[f"s{i}", "A", f"s{(i + 1) % n}"] for i in range(n)],
             "initial": "s0", "finals": ["s0"]}
    machine, diagram = tmp_path / "cycle.json", tmp_path / "line.json"
    machine.write_text(json.dumps(cycle))
    diagram.write_text(json.dumps(diagram_to_json(floating_line("A" * n))))
    monkeypatch.delenv("COBWEAVE_BUDGET", raising=False)
    assert run(["eval", str(machine), str(diagram)]) == 0
    assert records(capsys)[0]["matrix"]["entries"] == [[1]]
    monkeypatch.setenv("COBWEAVE_BUDGET", "1")
    assert run(["eval", str(machine), str(diagram)]) == 3


def test_apply_and_compose(capsys):
    code, recs = call(capsys, "apply", DATA / "c_to_ab.json", DATA / "ab.json", "--bound", "3")
    assert code == 0
    assert recs[0]["language"] == ["", "x", "xx", "xxx"]
    code, recs = call(capsys, "compose", DATA / "c_to_ab.json", "fixture:identity_ab",
                      "--machine", DATA / "ab.json")
    assert code == 0 and all(r.get("passed", True) for r in recs)


def test_naturality(capsys):
    code, recs = call(capsys, "check-naturality", DATA / "c_to_ab.json", DATA / "ab.json")
    assert code == 0 and all(r["commutes"] for r in recs)


def test_subregular(capsys):
    code, recs = call(capsys, "subregular", DATA / "ab.json", "--k", "2", "--markers")
    assert code == 0
    factors = [r for r in recs if r["check"] == "factors"][0]
    assert sorted(factors["factors"]) == sorted(["⋊A", "AB", "BA", "B⋉"])


def test_grammar_commands(capsys):
    code, recs = call(capsys, "grammar", DATA / "dyck_grammar.json", "--bound", "4")
    assert code == 0
    lang = [r for r in recs if r["check"] == "language"][0]
    assert sorted(lang["arrows"]) == ["", "(())", "()", "()()"]
    code, recs = call(capsys, "cs-factorize", DATA / "dyck_grammar.json")
    assert code == 0


def test_suite_seed_7():
    proc = subprocess.run(["cobweave", "suite", "--seed", "7"], capture_output=True, text=True)
    assert proc.returncode == 0
    recs = [json.loads(line) for line in proc.stdout.splitlines()]
    assert [r["criterion"] for r in recs] == list(range(1, 10))
    assert all(r["exact"] for r in recs)


def test_reports_are_deterministic(tmp_path):
    outs = []
    for k in range(2):
        target = tmp_path / f"r{k}.jsonl"
        assert run(["--out", str(target), "suite", "--seed", "3", "--criteria", "4,5,7,9"]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
