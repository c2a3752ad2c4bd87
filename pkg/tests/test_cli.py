import csv
import io
import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from zxgrad import barren_analyzer as ba
from zxgrad import cli
from zxgrad.ansatz_library import AnsatzSpec, build, hamiltonian_for

HEADER = "ansatz,n,layers,param,method,value,stderr"


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli.main, [str(a) for a in args])

    return invoke


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


# -- helpers -------------------------------------------------------------------


@pytest.mark.parametrize(
    "text,expected",
    [("2..6", (2, 3, 4, 5, 6)), ("3", (3,)), ("2,4,6", (2, 4, 6)), ("5..4", ()), ("1..2,7", (1, 2, 7))],
)
def test_parse_range(text, expected):
    assert cli.parse_range(text) == expected


@pytest.mark.parametrize("text,value", [("pi/2", math.pi / 2), ("-pi", -math.pi), ("3*pi/4", 0.75 * math.pi), ("0.5", 0.5), ("2pi", 2 * math.pi)])
def test_eval_angle(text, value):
    assert cli.eval_angle(text) == pytest.approx(value)


# -- rules ---------------------------------------------------------------------


def test_rules_two_legs(run):
    res = run("rules", "--legs", 2)
    assert res.exit_code == 0, res.output
    assert "+0.866025403784" in res.output and "-0.288675134595" in res.output
    assert float(res.output.split("residual:")[1]) < 1e-12


def test_rules_one_leg(run):
    res = run("rules", "--legs", 1)
    assert "shift +1.5707963268  coefficient +0.500000000000" in res.output


def test_rules_four_term(run):
    res = run("rules", "--eigs", "-0.5,0,0.5", "--alphas", "1.5707963,3.1415926")
    assert res.exit_code == 0, res.output
    assert "scale=0.5" in res.output
    assert "-0.2071067" in res.output
    assert float(res.output.split("residual:")[1]) < 1e-9


def test_rules_general_spectrum(run):
    res = run("rules", "--eigs", "0,1,3")
    assert res.exit_code == 0
    assert float(res.output.split("residual:")[1]) < 1e-12
    res = run("rules", "--legs", 2, "--alphas", "pi/4,pi/2")
    assert float(res.output.split("residual:")[1]) < 1e-12


@pytest.mark.parametrize(
    "args",
    [
        ("rules",),
        ("rules", "--legs", 2, "--eigs", "0,1"),
        ("rules", "--eigs", "0,1,2.5"),
        ("rules", "--eigs", "1"),
        ("rules", "--legs", 2, "--alphas", "1,1"),
        ("rules", "--legs", 0),
    ],
)
def test_rules_usage_errors(run, args):
    assert run(*args).exit_code == 2


# -- verify --------------------------------------------------------------------


@pytest.mark.parametrize("suite", ["zxw-rules", "gradients"])
def test_verify_suites_pass(run, suite):
    res = run("verify", suite)
    assert res.exit_code == 0, res.output
    assert "FAIL" not in res.output


def test_verify_nogo(run):
    res = run("verify", "nogo", "--trials", 1000, "--seed", 7)
    assert res.exit_code == 0
    value = float(res.output.split("min residual")[1].split()[0])
    assert value > 1e-6


def test_verify_failure_exit_code(run, monkeypatch):
    monkeypatch.setattr(cli.sr, "nogo_sweep", lambda trials, seed: np.zeros(trials))
    res = run("verify", "nogo")
    assert res.exit_code == 1
    assert "FAIL" in res.output


def test_verify_unknown_suite(run):
    assert run("verify", "everything").exit_code == 2


# -- sweeps --------------------------------------------------------------------


def test_sweep_header_and_closed_form_pairs(run):
    res = run("sweep", "--ansatz", "sim1", "--n", "2..6", "--h", "Z^n", "--methods", "quadrature,closed_form")
    assert res.exit_code == 0, res.output
    assert res.output.splitlines()[0] == HEADER
    rows = rows_of(res.output)
    assert len(rows) == 10
    for q, cf in zip(rows[0::2], rows[1::2]):
        assert (q["method"], cf["method"]) == ("quadrature", "closed_form")
        assert float(q["value"]) == pytest.approx(float(cf["value"]), abs=1e-9)
        assert float(cf["value"]) == 0.5 ** int(cf["n"])


def test_sweep_iqp1_layers(run):
    res = run("sweep", "--ansatz", "iqp1", "--n", 3, "--layers", "1..6", "--h", "Z^n")
    values = [float(r["value"]) for r in rows_of(res.output)]
    assert values == pytest.approx([1 / 2, 1 / 4, 3 / 8, 5 / 16, 11 / 32, 21 / 64], abs=1e-9)


def test_empty_range_writes_header_only(run, tmp_path):
    out = tmp_path / "empty.csv"
    res = run("sweep", "--ansatz", "sim1", "--n", "5..4", "--output", out)
    assert res.exit_code == 0
    assert out.read_text() == HEADER + "\n"


def test_json_mirrors_csv(run):
    args = ("sweep", "--ansatz", "sim9", "--n", "2..3", "--params", "all", "--methods", "quadrature,diagram")
    rows = rows_of(run(*args).output)
    records = json.loads(run(*args, "--format", "json").output)
    assert len(records) == len(rows)
    for rec, row in zip(records, rows):
        assert list(rec) == HEADER.split(",")
        assert [str(rec[k]) for k in ("ansatz", "n", "layers", "param", "method", "stderr")] == [
            row[k] for k in ("ansatz", "n", "layers", "param", "method", "stderr")
        ]
        assert rec["value"] == float(row["value"])


def test_monte_carlo_needs_seed_and_is_reproducible(run, tmp_path):
    assert run("sweep", "--ansatz", "sim1", "--n", 2, "--methods", "monte_carlo").exit_code == 2
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        res = run("sweep", "--ansatz", "sim1", "--n", "2..3", "--methods", "monte_carlo", "--samples", 4000, "--seed", 5, "-o", path)
        assert res.exit_code == 0
    assert a.read_bytes() == b.read_bytes()
    row = rows_of(a.read_text())[1]
    c = build(AnsatzSpec("sim1", 3))
    est, err = ba.variance_mc(c, hamiltonian_for("Z^n", 3), 0, 4000, seed=5)
    assert (float(row["value"]), float(row["stderr"])) == (est, err)


def test_rows_are_reproducible_from_the_library(run):
    rows = rows_of(run("sweep", "--ansatz", "iqp2", "--n", 4, "--h", "(YX)^(n/2)", "--params", "all").output)
    c = build(AnsatzSpec("iqp2", 4))
    H = hamiltonian_for("(YX)^(n/2)", 4)
    for r in rows:
        assert float(r["value"]) == ba.variance_quadrature(c, H, int(r["param"]))


def test_budget_rows_are_marked(run):
    rows = rows_of(run("sweep", "--ansatz", "sim1", "--n", "2..3", "--budget", 100).output)
    assert [r["stderr"] for r in rows] == ["exact", "skipped:budget"]
    assert rows[1]["value"] == ""


@pytest.mark.parametrize(
    "args",
    [
        ("sweep", "--ansatz", "nope", "--n", 2),
        ("sweep", "--ansatz", "iqp2", "--n", 3),
        ("sweep", "--n", "two"),
        ("sweep", "--n", 2, "--h", "QQ"),
        ("sweep", "--n", 2, "--methods", "magic"),
        ("sweep", "--n", 2, "--format", "xml"),
        ("variance", "--n", 2),
        ("variance", "--ansatz", "sim1"),
    ],
)
def test_sweep_usage_errors(run, args):
    assert run(*args).exit_code == 2


# -- variance ------------------------------------------------------------------


def test_variance_for_an_ansatz(run):
    res = run("variance", "--ansatz", "intro", "--n", 3, "--h", "X^n", "--param", "all", "--methods", "quadrature,diagram,closed_form")
    values = [float(r["value"]) for r in rows_of(res.output)]
    assert len(values) == 6
    assert values == pytest.approx([0.25] * 6, abs=1e-12)


def test_variance_from_circuit_file(run, tmp_path):
    path = tmp_path / "circ.json"
    path.write_text(
        json.dumps(
            {
                "qubits": 2,
                "params": 2,
                "gates": [
                    {"name": "H", "targets": [0]},
                    {"name": "RX", "targets": [0], "bind": {"param": 0, "mult": 1.0, "offset": 0.0}},
                    {"name": "CNOT", "targets": [0, 1]},
                    {"name": "RZ", "targets": [1], "bind": {"param": 1}},
                ],
            }
        )
    )
    res = run("variance", "--circuit", path, "--h", "ZZ", "--param", "all", "--methods", "quadrature,diagram")
    assert res.exit_code == 0, res.output
    rows = rows_of(res.output)
    assert [r["ansatz"] for r in rows] == ["circ"] * 4
    assert float(rows[0]["value"]) == pytest.approx(float(rows[1]["value"]), abs=1e-12)


def test_variance_rejects_bad_circuit_file(run, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"qubits": 1, "gates": [{"name": "NOPE", "targets": [0]}]}')
    assert run("variance", "--circuit", path).exit_code == 2


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "zxgrad", "rules", "--legs", "1"], capture_output=True, text=True)
    assert out.returncode == 0 and "residual" in out.stdout
