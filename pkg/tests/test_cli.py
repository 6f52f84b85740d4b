import json
import subprocess
import sys

import pytest

from ffwitness import cli

FALSIFY = ["falsify", "--phi", "t^2", "--s0", "0", "--i0", "2", "--bound-M", "1000", "--delta", "0.5"]


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_falsify_report(capsys):
    code, out, _ = run_cli(FALSIFY, capsys)
    report = json.loads(out)
    assert code == 0
    assert report["verdict"] == "violated"
    assert report["derived"]["B"] == 4 and report["derived"]["M2"] == 8.0
    assert report["seed"] == 0


def test_affine_claim_exits_zero(capsys):
    argv = FALSIFY.copy()
    argv[2] = "3*t+1"
    code, out, _ = run_cli(argv, capsys)
    assert code == 0 and json.loads(out)["verdict"] == "no_witness"


def test_parse_error_is_positioned(capsys):
    argv = FALSIFY.copy()
    argv[2] = "sin(t"
    code, _, err = run_cli(argv, capsys)
    assert code == 1
    assert "--phi" in err and "unbalanced parenthesis" in err and "^" in err


@pytest.mark.parametrize("argv", [
    ["falsify", "--phi", "t^2"],
    ["seminorm", "--f", "sin(2*pi*s)", "--index", "x"],
    FALSIFY[:-2] + ["--delta", "-1"],
    ["seminorm", "--f", "sin(2*pi*s)", "--index", "2", "--resolution", "8"],
    ["seminorm", "--f", "s", "--index", "1"],
    ["bump-check", "--alpha", "1", "--deltas", "0"],
])
def test_bad_arguments_exit_one(argv, capsys):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(cli.main(argv))
    assert info.value.code == 1


def test_affine_transport_demo_is_inconclusive(capsys):
    code, out, _ = run_cli(["transport-demo", "--phi3", "3*xi+1", "--deltas", "0.1"], capsys)
    report = json.loads(out)
    assert code == 2
    assert report["inconclusive"] and report["rows"][0]["derivative_distance"] == 0.0


def test_gateaux_check(capsys):
    code, out, _ = run_cli(["gateaux-check", "--phi", "sin(t)", "--x", "sin(2*pi*s)",
                            "--u", "cos(2*pi*s)", "--index", "2"], capsys)
    assert code == 0
    assert json.loads(out)["verdict"] == "first_order"


def test_bump_check(capsys):
    code, out, _ = run_cli(["bump-check", "--alpha", "1,2"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "verified"


def test_seminorm(capsys):
    code, out, _ = run_cli(["seminorm", "--f", "sin(2*pi*s)", "--index", "1"], capsys)
    assert code == 0
    assert abs(json.loads(out)["value"] - 6.283185307179586) < 1e-12


def test_output_files(tmp_path, capsys):
    paths = {k: tmp_path / f"out.{k}" for k in ("json", "csv", "svg")}
    code = cli.main(["transport-demo", "--phi3", "xi^2", "--deltas", "0.1,0.05",
                     "--json", str(paths["json"]), "--csv", str(paths["csv"]),
                     "--svg", str(paths["svg"])])
    assert code == 0
    assert capsys.readouterr().out == ""
    rows = paths["csv"].read_text().splitlines()
    assert rows[0] == "delta,g_seminorm_i0,exact_partial_lower,derivative_distance"
    assert len(rows) == 3 and "," in rows[1]
    assert paths["svg"].read_text().startswith("<svg")
    assert len(json.loads(paths["json"].read_text())["rows"]) == 2


def test_csv_refused_where_missing(tmp_path, capsys):
    code = cli.main(["seminorm", "--f", "1", "--index", "0", "--json", str(tmp_path / "a.json")])
    assert code == 0
    with pytest.raises(SystemExit) as info:
        cli.main(["seminorm", "--f", "1", "--index", "0", "--csv", "x.csv"])
    assert info.value.code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ffwitness.cli", "seminorm", "--f", "cos(2*pi*s)",
                           "--index", "0"], capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == 1.0
