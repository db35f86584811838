"""Golden-file tests of the command-line front end, run from inside tests/data."""
import io
import subprocess
import sys
from pathlib import Path

import pytest
from conftest import DATA

from polyvar.cli import INPUT_ERROR, NEGATIVE, OK, run

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "certify_extreme": ["certify", "--scenario", "extreme.vi", "--path", "path_extreme.vi"],
    "certify_interior": ["certify", "--scenario", "extreme.vi", "--path", "path_interior.vi"],
    "chain_g2": ["chain", "--g", "G2.vi", "--f", "Fpm.vi", "--point", "0", "0",
                 "--kind", "convexified"],
    "reach_growth": ["reach", "--scenario", "growth.vi", "--x0", "1", "--N", "100"],
    "converge_csv": ["converge", "--scenario", "growth.vi", "--x0", "1", "--Ns", "10", "20", "40",
                     "--format", "csv"],
    "subdiff_band": ["subdiff", "--scenario", "band.vi", "--x0", "3/7"],
    "coderiv_fpm": ["coderiv", "--map", "Fpm.vi", "--point", "0", "0", "--kind", "convexified",
                    "--dir", "1"],
    "oracle_g1": ["oracle-check", "--map", "G1.vi", "--point", "0", "0", "--seed", "3"],
    "missing_file": ["reach", "--scenario", "nope.vi", "--x0", "1"],
    "bad_csv": ["chain", "--g", "G2.vi", "--f", "Fpm.vi", "--point", "0", "0", "--format", "csv"],
    "off_graph": ["coderiv", "--map", "Fpm.vi", "--point", "1", "0"],
}


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def in_data_dir(monkeypatch):
    monkeypatch.chdir(DATA)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_output(name):
    code, out, err = invoke(CASES[name])
    assert code == int((GOLDEN / f"{name}.code").read_text())
    assert out == (GOLDEN / f"{name}.out").read_text(encoding="utf-8")
    assert err == (GOLDEN / f"{name}.err").read_text(encoding="utf-8")


def test_every_exit_code_is_covered_by_goldens():
    codes = {int((GOLDEN / f"{n}.code").read_text()) for n in CASES}
    assert codes == {OK, NEGATIVE, INPUT_ERROR}


def test_certify_reports_constant_costate():
    code, out, _ = invoke(CASES["certify_extreme"])
    assert code == OK and "constant costate p = (1)" in out


def test_chain_relation_line():
    _, out, _ = invoke(CASES["chain_g2"])
    assert "LHS ⊊ RHS" in out.splitlines()


def test_reach_growth_value():
    _, out, _ = invoke(CASES["reach_growth"])
    assert "interval [1, 2.70481382942]" in out


@pytest.mark.parametrize("name", ["oracle_g1", "converge_csv", "chain_g2"])
def test_byte_determinism(name):
    assert invoke(CASES[name]) == invoke(CASES[name])


def test_header_echoes_configuration():
    _, out, _ = invoke(["pi", "--scenario", "band.vi", "--x0", "0", "--xN", "-1", "--dir", "1",
                        "--Ns", "4", "--delta", "1/8", "--seed", "5"])
    head = [ln for ln in out.splitlines() if ln.startswith("# ")]
    assert head[0] == "# command: pi" and "# seed: 5" in head and "# delta: 1/8" in head


def test_pi_negative_direction_is_negative_verdict():
    code, out, _ = invoke(["pi", "--scenario", "band.vi", "--x0", "0", "--xN", "-1", "--dir", "-1",
                           "--Ns", "4"])
    assert code == NEGATIVE and "intersection=empty" in out


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["reach", "--scenario", "growth.vi", "--x0", "1", "--bogus"],
    ["reach", "--scenario", "growth.vi"],
    ["reach", "--scenario", "growth.vi", "--x0", "1/0"],
    ["reach", "--scenario", "growth.vi", "--x0", "1", "2"],
    ["subdiff", "--scenario", "growth.vi", "--x0", "1"],
    ["converge", "--scenario", "band.vi", "--x0", "0", "--Ns", "4"],
    ["oracle-check", "--map", "G1.vi", "--point", "0", "0", "--kind", "convexified"],
    ["chain", "--g", "G1.vi", "--f", "Fpm.vi", "--point", "0"],
    ["reach", "--scenario", "Fpm.vi", "--x0", "1"],
])
def test_input_errors_exit_two(argv):
    code, _, _ = invoke(argv)
    assert code == INPUT_ERROR


def test_piece_budget_exits_two():
    argv = ["reach", "--scenario", "branching.vi", "--x0", "1"]
    code, out, _ = invoke(argv)
    assert code == OK and out.count("point ") == 9
    code, _, err = invoke(argv + ["--budget", "3"])
    assert code == INPUT_ERROR and "piece budget exceeded" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polyvar", "coderiv", "--map", "Fpm.vi",
                           "--point", "0", "0", "--dir", "1"], capture_output=True, text=True,
                          cwd=DATA)
    assert proc.returncode == 0 and "point -1" in proc.stdout and "point 1" in proc.stdout
