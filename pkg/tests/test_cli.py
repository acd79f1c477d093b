import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from gatecap import cli, gates
from gatecap.optim import InvariantViolation

SCHEMA = json.loads(resources.files("gatecap").joinpath("schema/capacity_report.schema.json")
                    .read_text())
QUICK = ["--restarts", "2", "--seed", "4"]


def run_json(capsys, argv, code=0):
    assert cli.run(argv) == code
    out = capsys.readouterr().out
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    return rep


@pytest.mark.parametrize("argv", [
    ["schmidt", "--gate", "cp:3"],
    ["entcap", "--gate", "cnot", *QUICK],
    ["entcap", "--gate", "cnot", "--destroying", *QUICK],
    ["ecap-sweep", "--gate", "cnot", "--dims", "1,2", *QUICK],
    ["holevo", "--gate", "cnot", "--ensemble-size", "4", *QUICK],
    ["hamcap", "--ham", "zz", "--ancilla", "1,1", *QUICK],
    ["bounds-report", "--gate", "cnot", "--ensemble-size", "4", *QUICK],
    ["proto", "--name", "swap-dense"],
    ["proto", "--name", "teleport", "--seed", "3"],
])
def test_reports_validate_against_schema(capsys, argv):
    rep = run_json(capsys, argv)
    assert rep["command"] == argv[0]
    assert rep["schema_version"] == "1.0"


def test_entcap_values(capsys):
    rep = run_json(capsys, ["entcap", "--gate", "swap:2", *QUICK])
    assert rep["results"]["entcap"]["value"] == pytest.approx(2.0, abs=1e-3)
    assert rep["gate"]["digest"] == gates.gate_digest(gates.swap(2))


def test_schmidt_values(capsys):
    rep = run_json(capsys, ["schmidt", "--gate", "cp:4"])
    assert rep["results"]["schmidt"]["schmidt_number"] == 2


def test_backward_direction(capsys):
    rep = run_json(capsys, ["holevo", "--gate", "cnot", "--direction", "backward",
                            "--ensemble-size", "4", *QUICK])
    assert rep["config"]["direction"] == "backward"
    assert rep["results"]["holevo"]["value"] == pytest.approx(1.0, abs=1e-3)


def test_results_byte_identical_across_runs(capsys):
    argv = ["entcap", "--gate", "j", *QUICK]
    a = run_json(capsys, argv)
    b = run_json(capsys, argv)
    for key in ("results", "config", "gate"):
        assert json.dumps(a[key], sort_keys=True) == json.dumps(b[key], sort_keys=True)


def test_gate_file_round_trip(tmp_path, capsys):
    path = tmp_path / "g.json"
    gates.gate_to_file(gates.j_gate(), path)
    from_file = run_json(capsys, ["schmidt", "--gate", f"file:{path}"])
    builtin = run_json(capsys, ["schmidt", "--gate", "j"])
    assert from_file["gate"]["digest"] == builtin["gate"]["digest"]
    assert from_file["results"] == builtin["results"]


def test_out_file_and_table(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.run(["schmidt", "--gate", "cnot", "--format", "table", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("gatecap schmidt")
    assert "schmidt.schmidt_number" in text
    jsonschema.validate(json.loads(out.read_text()), SCHEMA)
    assert cli.run(["schmidt", "--gate", "cnot", "--format", "table", "--plain"]) == 0
    assert capsys.readouterr().out.startswith("schmidt.")


@pytest.mark.parametrize("argv,needle", [
    (["entcap"], "needs --gate"),
    (["entcap", "--gate", "toffoli"], "unknown gate"),
    (["entcap", "--gate", "cp:1"], "bad gate"),
    (["entcap", "--gate", "cnot", "--ensemble-size", "3"], "--ensemble-size is not valid"),
    (["entcap", "--gate", "cnot", "--ancilla", "2"], "nA,nB"),
    (["entcap", "--gate", "cnot", "--restarts", "0"], "restarts"),
    (["ecap-sweep", "--gate", "cnot"], "--dims"),
    (["holevo", "--gate", "cnot", "--ensemble-size", "1"], "ensemble size"),
    (["hamcap", "--ham", "xyz"], "unknown Hamiltonian"),
    (["hamcap", "--ham", "zz", "--s-grid", "0.1"], "s_grid"),
    (["proto", "--name", "nope"], "--name"),
    (["proto", "--name", "cnot-two-way", "--msg", "2"], "two-bit"),
    (["frobnicate"], "invalid choice"),
    (["entcap", "--gate", "file:/nonexistent/g.json"], "cannot read"),
])
def test_input_errors_exit_1(capsys, argv, needle):
    assert cli.run(argv) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and needle in err


def test_malformed_gate_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"dims": [2, 2], "matrix": [[[1, 0]]')
    assert cli.run(["schmidt", "--gate", f"file:{path}"]) == 1
    assert "line" in capsys.readouterr().err
    doc = gates.gate_to_json(gates.cnot())
    doc["matrix"][0][0] = [0.5, 0.0]
    path.write_text(json.dumps(doc))
    assert cli.run(["schmidt", "--gate", f"file:{path}"]) == 1
    assert "unitar" in capsys.readouterr().err


def test_invariant_violation_exits_2(monkeypatch, capsys):
    def boom(*a, **k):
        raise InvariantViolation("entanglement capacity exceeds log2 Sch")
    monkeypatch.setattr(cli, "optimize_entcap", boom)
    assert cli.run(["entcap", "--gate", "cnot"]) == 2
    assert "invariant violation" in capsys.readouterr().err


def test_violated_bound_emits_report_and_exits_2(monkeypatch, capsys):
    real = cli.check_bounds
    monkeypatch.setattr(cli, "check_bounds",
                        lambda g, comp, **kw: real(g, {**comp, "delta_e": 5.0}, **kw))
    rep = run_json(capsys, ["bounds-report", "--gate", "cnot", "--ensemble-size", "4", *QUICK],
                   code=2)
    statuses = {c["name"]: c["status"] for c in rep["results"]["bounds"]["checks"]}
    assert statuses["cor34_schmidt_upper"] == "violated"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gatecap", "schmidt", "--gate", "cnot"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["schmidt"]["schmidt_number"] == 2
    bad = subprocess.run([sys.executable, "-m", "gatecap", "schmidt"], capture_output=True)
    assert bad.returncode == 1
