import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from worms.cli import run

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_schur(capsys):
    code, out, _ = _run(capsys, "schur", "--table", "2,2", "--m", "2")
    assert code == 0 and out.strip() == "1"


def test_tetris(capsys):
    code, out, _ = _run(capsys, "tetris", "--table", "2,2", "--m", "2")
    data = json.loads(out)
    assert data["sequence"] == [[2, 2], [3]] and data["tilde_dim"] == 5


def test_tetris_single_column_is_input_error(capsys):
    code, _, err = _run(capsys, "tetris", "--table", "1,1")
    assert code == 2 and "two-column" in err


def test_check_brackets(capsys):
    code, out, _ = _run(capsys, "check", "--suite", "brackets")
    assert code == 0
    assert "PASS brackets: [R1,d2] = -E11" in out
    assert "FAIL" not in out


def test_check_unknown_suite(capsys):
    code, _, err = _run(capsys, "check", "--suite", "nope")
    assert code == 2 and "unknown suite" in err


def test_integrate_pi(capsys):
    code, out, _ = _run(capsys, "integrate", "--exponent", "-x^2 - d12(x)^2", "--poly", "d1(x)*d2(x)", "--expect", "pi")
    data = json.loads(out)
    assert code == 0 and data["passed"] and abs(data["value"] - math.pi) < 1e-9


def test_euler_sphere_report(capsys):
    code, out, _ = _run(capsys, "euler", "--metric", str(CONFIGS / "sphere.json"), "--nodes", "200")
    data = json.loads(out)
    assert code == 0
    assert data["predicted"] == pytest.approx(-4 * math.pi ** 2)
    assert "sign_convention" in data and data["value"] < 0


def test_euler_verify_reports_mismatch(capsys):
    code, out, _ = _run(capsys, "euler", "--metric", str(CONFIGS / "sphere.json"), "--nodes", "200", "--verify")
    assert code == 1 and json.loads(out)["verified"] is False


def test_euler_flat(capsys):
    code, out, _ = _run(capsys, "euler", "--metric", str(CONFIGS / "flat_torus.json"), "--verify")
    data = json.loads(out)
    assert data["symbolic_zero"] and data["value"] == 0.0


@pytest.mark.parametrize(
    "payload, field",
    [
        ({"coords": ["u", "v"], "metric": [["1", "0"]], "domain": "plane"}, "metric"),
        ({"coords": ["u", "v"], "metric": [["1", "0"], ["0", "1"]]}, "domain"),
        ({"coords": ["u"], "metric": [["1"]], "domain": {"type": "torus"}}, "domain.type"),
        ({"dim": 3, "coords": ["u", "v"], "metric": [["1", "0"], ["0", "1"]], "domain": "plane"}, "dim"),
        ({"coords": ["u", "v"], "metric": [["1", "0"], ["0", "1"]], "domain": "plane", "euler_char": "two"}, "euler_char"),
    ],
)
def test_malformed_config_names_field(tmp_path, capsys, payload, field):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    code, _, err = _run(capsys, "euler", "--metric", str(path))
    assert code == 2
    assert field in err


def test_missing_file(capsys):
    code, _, err = _run(capsys, "euler", "--metric", "/nonexistent/metric.json")
    assert code == 2 and "not found" in err


def test_decompose(capsys):
    code, out, _ = _run(capsys, "decompose", "--m", "2", "--max-degree", "4")
    data = json.loads(out)
    assert code == 0 and data["ok"]


def test_cohomology(capsys):
    code, out, _ = _run(capsys, "cohomology", "--diff", "r1", "--m", "1", "--trunc", "4", "--max-x-degree", "0")
    data = json.loads(out)
    assert data["nonzero_stable_betti"] == {"0,0": 1, "0,1": 1}


def test_cohomology_with_pairings(capsys):
    code, out, _ = _run(capsys, "cohomology", "--diff", "r1", "--m", "1", "--trunc", "3", "--max-x-degree", "0", "--pairings")
    data = json.loads(out)
    assert code == 0 and data["pairings"]["d2->d, d1->0"]["quasi_isomorphism"]


def test_transform(capsys):
    code, out, _ = _run(capsys, "transform", "--map", "x^2", "--elem", "d12(x)")
    data = json.loads(out)
    assert data["images"]["d12(x)"]["text"].replace(" ", "") in {"(2*x)*d12(x)+(2)*d1(x)*d2(x)"}
    code, out, _ = _run(capsys, "transform", "--mat2", "0,1;1,0", "--elem", "d12(x)")
    assert json.loads(out)["images"]["d12(x)"]["text"].replace(" ", "") == "-d12(x)"


def test_usage_errors():
    for argv in (["bogus"], ["schur", "--table", "2,2"], ["euler"], ["schur", "--table", "2", "--m", "2", "--extra"]):
        with pytest.raises(SystemExit) as exc:
            run(argv)
        assert exc.value.code == 2


def test_byte_identical_output():
    cmd = [sys.executable, "-m", "worms", "euler", "--metric", str(CONFIGS / "sphere.json"), "--nodes", "150"]
    a = subprocess.run(cmd + ["--workers", "1"], capture_output=True, check=True).stdout
    b = subprocess.run(cmd + ["--workers", "3"], capture_output=True, check=True).stdout
    strip = lambda s: [l for l in s.splitlines() if b'"workers"' not in l]
    assert strip(a) == strip(b)
    c = subprocess.run(cmd + ["--workers", "1"], capture_output=True, check=True).stdout
    assert a == c
