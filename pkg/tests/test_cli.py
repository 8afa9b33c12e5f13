import json

import pytest

from tightpath.cli import replay, run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_thresholds_r4(capsys):
    code, out, _ = _run(capsys, "table", "thresholds", "--r", "4", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["diff"] == [] and {r["key"]: r["value"] for r in payload["rows"]}["growing"] == 15


def test_certify_bundled(capsys):
    code, out, _ = _run(capsys, "thresh", "certify", "--psg", "5", "--cert", "data/psg5_cert.json", "--format", "json")
    assert code == 0, out


def test_usage_errors(capsys):
    code, _, err = _run(capsys, "table", "thresholds", "--r", "4", "--bogus")
    assert code == 2 and json.loads(err)["error"] == "usage"
    code, _, _ = _run(capsys, "tourn", "construct", "--kind", "nope", "--n", "4")
    assert code == 2
    code, _, _ = _run(capsys, "tourn", "construct", "--kind", "max-second")
    assert code == 2
    code, _, _ = _run(capsys, "conj", "check34", "--n", "5", "--mode", "exhaustive")
    assert code == 2


def test_missing_input_file(capsys):
    code, _, err = _run(capsys, "paths", "longest", "--in", "/nonexistent/graph.json")
    assert code == 2 and "no such file" in json.loads(err)["message"]


def test_construct_then_analyse(tmp_path, capsys):
    g = tmp_path / "g.json"
    assert run(["tourn", "construct", "--kind", "max-second", "--n", "7", "--format", "json", "--out", str(g)]) == 0
    code, out, _ = _run(capsys, "tourn", "check", "--in", str(g), "--format", "json")
    assert code == 0 and json.loads(out)["k"] == 2
    code, out, _ = _run(capsys, "paths", "longest", "--in", str(g), "--format", "json")
    res = json.loads(out)
    assert code == 0 and res["optimal"] and res["size"] < 7
    code, out, _ = _run(capsys, "conj", "count-paths", "--in", str(g))
    assert code == 0 and out.strip() == "0"
    # too sparse for the flexible construction: a precondition error
    code, _, err = _run(capsys, "paths", "span-flex", "--in", str(g))
    assert code == 2 and json.loads(err)["error"] == "PreconditionError"


def test_table_mismatch_exits_1(monkeypatch, capsys):
    from tightpath import cli
    from tightpath.tables import TableRow

    real = cli.expected_table
    monkeypatch.setattr(cli, "expected_table", lambda r: [TableRow(x.key, x.row, 1) for x in real(r)])
    code, out, _ = _run(capsys, "table", "thresholds", "--r", "4")
    assert code == 1 and "MISMATCH" in out


def test_resource_limit_exit(tmp_path, capsys):
    g = tmp_path / "g.json"
    assert run(["tourn", "construct", "--kind", "first-not-max", "--n", "15", "--format", "json", "--out", str(g)]) == 0
    code, _, err = _run(capsys, "conj", "count-paths", "--in", str(g))
    assert code == 3 and json.loads(err)["error"] == "resource"


def test_dot_output(capsys):
    code, out, _ = _run(capsys, "psg", "build", "--r", "3", "--format", "dot")
    assert code == 0 and out.startswith("digraph")
    code, _, _ = _run(capsys, "table", "thresholds", "--r", "4", "--format", "dot")
    assert code == 2


def test_manifest_replay(tmp_path, capsys):
    man = tmp_path / "run.json"
    argv = ["conj", "check34", "--n", "6", "--samples", "300", "--seed", "4", "--format", "json", "--manifest", str(man)]
    assert run(argv) == 0
    first = capsys.readouterr().out
    data = json.loads(man.read_text())
    assert data["seed"] == 4 and data["exit_code"] == 0 and data["backend"] in ("numba", "numpy")
    assert replay(str(man))
    assert run(argv[:-2]) == 0
    assert capsys.readouterr().out == first


def test_manifest_records_input_digest(tmp_path, capsys):
    g, man = tmp_path / "g.json", tmp_path / "m.json"
    run(["tourn", "construct", "--kind", "first-not-max", "--n", "6", "--format", "json", "--out", str(g)])
    assert run(["paths", "longest", "--in", str(g), "--manifest", str(man)]) == 0
    capsys.readouterr()
    assert str(g) in json.loads(man.read_text())["inputs"]
    assert replay(str(man))


@pytest.mark.parametrize(
    "argv",
    [
        ["psg", "cycles", "--r", "3"],
        ["psg", "family", "--r", "4", "--bundled"],
        ["thresh", "growing", "--r", "4"],
        ["thresh", "clusters", "--r", "5", "--t", "1"],
        ["tourn", "construct", "--kind", "binary33", "--t", "2"],
        ["conj", "check34", "--n", "4", "--mode", "exhaustive"],
    ],
)
def test_smoke(capsys, argv):
    code, out, err = _run(capsys, *argv, "--quiet")
    assert code == 0, err
    assert out.strip()
