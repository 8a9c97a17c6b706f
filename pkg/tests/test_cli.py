import io
import re
from pathlib import Path

import pytest

from cusptransfer.cli import run

from golden_cases import EXACT, NUMERIC

GOLDEN = Path(__file__).parent / "golden"
NUMBER = re.compile(r"[-+]?\d+\.\d+e[-+]\d+(?:[-+]\d+\.\d+e[-+]\d+i)?")


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def golden(name):
    text = (GOLDEN / f"{name}.txt").read_text()
    head, body = text.split("\n", 1)
    return int(head.split("=")[1]), body


@pytest.mark.parametrize("name", sorted(EXACT))
def test_exact_golden(name):
    code, out, _ = invoke(EXACT[name])
    assert (code, out) == golden(name)


def as_number(tok):
    return complex(tok.replace("i", "j")) if tok.endswith("i") else float(tok)


def residual_like(line):
    return "residual" in line or "samples_error" in line


@pytest.mark.parametrize("name", sorted(NUMERIC))
def test_numeric_golden(name):
    # text must match once floats are masked; floats agree to 1e-9, residuals only need to stay tiny
    code, out, _ = invoke(NUMERIC[name])
    want_code, want = golden(name)
    assert code == want_code
    got_lines, want_lines = out.splitlines(), want.splitlines()
    assert len(got_lines) == len(want_lines)
    for g, w in zip(got_lines, want_lines):
        assert NUMBER.sub("#", g) == NUMBER.sub("#", w)
        for a, b in zip(NUMBER.findall(g), NUMBER.findall(w)):
            x, y = as_number(a), as_number(b)
            if residual_like(g):
                assert abs(x) < 1e-8 and abs(y) < 1e-8
            else:
                assert abs(x - y) < 1e-9 * max(1.0, abs(y))


def test_cusps_level8_widths():
    code, out, _ = invoke(["cusps", "--level", "8"])
    assert code == 0
    assert [int(re.search(r"m=(\d+)", l).group(1)) for l in out.splitlines()] == [1, 8, 2, 1]


def test_deterministic():
    argv = NUMERIC["verify_27_transfer"]
    assert invoke(argv) == invoke(argv)


def test_thread_count_does_not_change_output(monkeypatch):
    argv = ["verify", "--fixture", "level20.eta", "--identity", "three-term", "--nmax", "10"]
    monkeypatch.setenv("CUSP_TRANSFER_THREADS", "1")
    serial = invoke(argv)
    monkeypatch.setenv("CUSP_TRANSFER_THREADS", "4")
    assert invoke(argv) == serial
    assert serial[0] == 0


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["cusps"],
    ["cusps", "--level", "0"],
    ["cusps", "--level", "9", "--character", "mod=9;gen=2"],
    ["transfer", "--level", "11", "--cusp", "2/4", "--index", "3"],
    ["transfer", "--level", "11", "--cusp", "0", "--index", "x"],
    ["three-term", "--level", "11", "--cusp", "0", "--prime", "4"],
    ["three-term", "--level", "11", "--cusp", "0", "--prime", "11"],
    ["verify", "--fixture", "nope.eta", "--identity", "automorphy"],
    ["verify", "--fixture", "level11.eta", "--identity", "hecke"],
    ["verify", "--fixture", "level11.eta", "--identity", "three-term", "--prime", "11"],
    ["verify", "--fixture", "level11.eta", "--identity", "three-term", "--prime", "9"],
    ["supercuspidal", "--fixture", "level27.eta", "--prime", "3", "--bound", "-1"],
    ["supercuspidal", "--fixture", "level27.eta", "--prime", "6", "--bound", "2"],
    ["extract", "--fixture", "level11.eta", "--cusp", "inf", "--nmax", "0"],
])
def test_usage_errors_exit_2(argv):
    code, out, err = invoke(argv)
    assert code == 2
    assert out == ""
    assert "usage:" in err


def test_verification_failure_exits_1():
    code, out, _ = invoke(["verify", "--fixture", "level11.eta", "--identity", "three-term", "--prime", "2",
                           "--nmax", "10", "--tol", "1e-30"])
    assert code == 1
    assert out.splitlines()[-1].endswith("tol=1e-30 FAIL")


def test_every_verdict_reports_residual_and_tolerance():
    for name, argv in NUMERIC.items():
        if argv[0] != "verify":
            continue
        _, out, _ = invoke(argv)
        assert re.fullmatch(r"max_residual=\S+ tol=\S+ (PASS|FAIL)", out.splitlines()[-1])


def test_main_module_help():
    code, out, _ = invoke(["--help"])
    assert code == 0
