import json

import pytest
from fastapi.testclient import TestClient

from qfgenus.cli import main
from qfgenus.commands import dispatch
from qfgenus.service import app
from qfgenus.symbol import genus_symbol


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def _run(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture
def i3(tmp_path):
    return _write(tmp_path, "i3.json", genus_symbol([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).to_json())


def test_symbol_command(tmp_path, capsys):
    f = _write(tmp_path, "q.json", {"n": 2, "rows": [[1, 0], [0, 3]]})
    code, out = _run(capsys, ["symbol", "--form", f])
    assert code == 0
    assert out["n"] == 2 and out["sig"] == 2
    assert set(out["components"]) == {"2", "3"}


def test_validate(capsys, i3):
    code, out = _run(capsys, ["validate", "--symbol", i3])
    assert code == 0 and out["valid"] is True


def test_generate_then_verify(tmp_path, capsys):
    s = _write(tmp_path, "s.json", genus_symbol([[2, 1, 0], [1, 4, 1], [0, 1, 6]]).to_json())
    code, form = _run(capsys, ["generate", "--symbol", s, "--seed", "7"])
    assert code == 0
    q = _write(tmp_path, "gen.json", form)
    code, rep = _run(capsys, ["verify", "--form", q, "--symbol", s])
    assert code == 0 and rep["member"] is True


def test_generate_trace(capsys, i3):
    code, out = _run(capsys, ["generate", "--symbol", i3, "--trace"])
    assert code == 0
    assert out["trace"]["ok"] is True
    assert out["form"]["n"] == 3


def test_tampered_oddity_exits_1(tmp_path, capsys):
    sym = genus_symbol([[1, 0], [0, 1]]).to_json()
    sym["components"]["2"][0]["oddity"] = (sym["components"]["2"][0]["oddity"] + 2) % 8
    s = _write(tmp_path, "bad.json", sym)
    code, out = _run(capsys, ["generate", "--symbol", s])
    assert code == 1
    assert out["valid"] is False


def test_determinism(tmp_path, capsys, monkeypatch):
    s = _write(tmp_path, "s.json", genus_symbol([[3, 1, 0, 0], [1, 5, 2, 0], [0, 2, 7, 1], [0, 0, 1, -4]]).to_json())
    main(["generate", "--symbol", s, "--seed", "11"])
    first = capsys.readouterr().out
    main(["generate", "--symbol", s, "--seed", "11"])
    assert capsys.readouterr().out == first
    monkeypatch.setenv("QFGENUS_SEED", "11")
    main(["generate", "--symbol", s])
    assert capsys.readouterr().out == first


def test_asymmetric_matrix_names_entry(tmp_path, capsys):
    f = _write(tmp_path, "q.json", {"n": 2, "rows": [[1, 2], [3, 4]]})
    code, out = _run(capsys, ["symbol", "--form", f])
    assert code == 1
    assert out["error"] == "SchemaError"
    assert "(0,1)" in out["message"]


def test_dimension_sum_checked(tmp_path, capsys):
    sym = genus_symbol([[1, 0], [0, 1]]).to_json()
    sym["n"] = 3
    s = _write(tmp_path, "s.json", sym)
    code, out = _run(capsys, ["validate", "--symbol", s])
    assert code == 1
    assert out["error"] == "SchemaError"


def test_unreadable_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = _run(capsys, ["symbol", "--form", str(bad)])
    assert code == 1 and out["error"] == "ParseError"
    code, out = _run(capsys, ["symbol", "--form", str(tmp_path / "missing.json")])
    assert code == 1 and out["error"] == "ParseError"


def test_oracle_commands(tmp_path, capsys):
    code, out = _run(capsys, ["oracle", "appendix-c", "--which", "typeII"])
    assert code == 0 and out["suites"]["typeII"]["failures"] == 0
    code, out = _run(capsys, ["oracle", "rep-dim4"])
    assert code == 0 and out["unsolvable_cells"] == 0
    a = _write(tmp_path, "a.json", {"rows": [[1, 0], [0, 1]]})
    b = _write(tmp_path, "b.json", {"rows": [[2, 0], [0, 2]]})
    code, out = _run(capsys, ["oracle", "equiv", "--a", a, "--b", b, "--p", "3", "--k", "2"])
    assert code == 0 and out["modulus"] == "9"
    code, out = _run(capsys, ["oracle", "equiv", "--a", a, "--b", b, "--p", "3", "--k", "2", "--brute"])
    assert code == 0
    c = _write(tmp_path, "c.json", {"rows": [[1, 0], [0, 2]]})
    code, out = _run(capsys, ["oracle", "equiv", "--a", a, "--b", c, "--p", "3", "--k", "1", "--brute"])
    assert code == 1 and out["error"] == "NotEquivalent"


def test_localform_and_findt(capsys, i3):
    code, out = _run(capsys, ["localform", "--symbol", i3, "--p", "2"])
    assert code == 0 and out["n"] == 3
    code, out = _run(capsys, ["findt", "--symbol", i3])
    assert code == 0 and out["gcd"] == "1"


def test_dispatch_exit_codes(monkeypatch):
    assert dispatch("nope")[0] == 1
    from qfgenus import commands
    from qfgenus.errors import CaseMismatch, GenerationFailed

    def boom(**_):
        raise GenerationFailed("out of retries")

    def bug(**_):
        raise CaseMismatch("inconsistent case")

    monkeypatch.setitem(commands.COMMANDS, "generate", boom)
    assert dispatch("generate")[0] == 2
    monkeypatch.setitem(commands.COMMANDS, "generate", bug)
    assert dispatch("generate")[0] == 3


def test_service_matches_cli():
    client = TestClient(app)
    sym = genus_symbol([[2, 1], [1, 3]]).to_json()
    r = client.post("/generate", json={"symbol": sym, "seed": 5})
    assert r.status_code == 200
    body = r.json()
    assert body["exit_code"] == 0
    assert body["payload"] == dispatch("generate", symbol=sym, seed=5)[1]
    r = client.post("/validate", json={"symbol": sym})
    assert r.json()["payload"]["valid"] is True
    r = client.post("/oracle", json={"kind": "rep-dim4"})
    assert r.json() == {"exit_code": 0, "payload": {"unsolvable_cells": 0}}
