import json
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from dellns import cli

DOCS = Path(__file__).resolve().parent.parent / "docs"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def schema(name):
    return json.loads((DOCS / name).read_text())


def test_verify_passes_with_exit_zero(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "identityC1", "--n", "3", "--seed", "2")
    assert code == 0 and "PASS" in out


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "squarefree-probe", "--n", "3", "--omega-order", "1")
    assert code == 1 and "FAIL" in out


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "nope"],
    ["verify"],
    ["act", "--op", "J7", "--input", "p[1]"],
    ["act", "--op", "Ci", "--input", "x1", "--n", "2", "--index", "3"],
    ["dump", "--op", "J0", "--weight", "9"],
    ["dump", "--op", "DN", "--weight", "1"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_report_json_matches_schema(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "hamiltonians", "--max-degree", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, schema("report.schema.json"))
    assert data["cases"] and all(c["status"] == "pass" for c in data["cases"])


def test_dump_matches_schema(capsys):
    for op in ("J0", "K1", "I0"):
        code, out, _ = run(capsys, "dump", "--op", op, "--weight", "2", "--format", "json")
        assert code == 0
        jsonschema.validate(json.loads(out), schema("operator-table.schema.json"))


def test_act_j0_on_p1(capsys):
    code, out, _ = run(capsys, "act", "--op", "J0", "--input", "p[1]")
    assert code == 0
    assert out.strip() == "(t - 1 - q^-1*t + q^-1)*p[1]"
    code, out, _ = run(capsys, "act", "--op", "J0", "--input", "p[1]", "--format", "json")
    data = json.loads(out)
    assert data["basis"] == "power-sum" and data["terms"][0]["partition"] == [1]


def test_act_dn_two_variables(capsys):
    code, out, _ = run(capsys, "act", "--op", "DN", "--n", "2", "--omega-order", "0", "--input", "x1+x2",
                       "--format", "json")
    assert code == 0
    layers = json.loads(out)["layers"]
    assert [(r["omega"], r["u"]) for r in layers] == [(0, 0), (0, 1), (0, 2)]


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--suite", "identityC2", "--n", "3", "--format", "json",
                       "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["suite"] == "identityC2"


def test_parse_symfunc():
    f = cli.parse_symfunc("2*p[2] - p[1,1] + 3*p[]")
    assert str(f.coeff((2,))) == "2" and str(f.coeff((1, 1))) == "-1" and str(f.coeff(())) == "3"
    with pytest.raises(cli.UsageError):
        cli.parse_symfunc("p[2")


def _cli(args, threads):
    env = dict(os.environ, DELLNS_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "dellns.cli", *args], capture_output=True, env=env,
                          check=False).stdout


def test_output_is_deterministic_across_thread_counts():
    args = ["verify", "--suite", "stability", "--n", "2", "--max-degree", "2", "--format", "json"]
    a, b, c = _cli(args, 1), _cli(args, 1), _cli(args, 4)
    assert a == b == c and a
