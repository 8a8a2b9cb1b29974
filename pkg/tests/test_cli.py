import json
import subprocess
import sys

import pytest

from clustergrowth.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_growth_a2(capsys):
    code, out, _ = _run(capsys, "growth", "--family", "A", "--n", "2", "--radius", "10")
    assert code == 0
    assert "counts: 1 3 5 5" in out and "classification: Finite" in out


def test_growth_structured_and_deterministic(capsys, tmp_path):
    args = ["--format", "structured", "growth", "--family", "D~", "--n", "4",
            "--radius", "8"]
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args, "--threads", "3")
    assert first == second
    doc = json.loads(first)
    assert doc["counts"][-1] == 476 and doc["exit_status"] in (0, 2)
    assert "wall_time_ms" not in doc
    _, timed, _ = _run(capsys, *args, "--timing")
    assert "wall_time_ms" in json.loads(timed)


def test_growth_config_file(capsys, tmp_path):
    cfg = tmp_path / "g.json"
    cfg.write_text(json.dumps({"growth": {"radius": 6, "max_vertices": 100}}))
    code, out, _ = _run(capsys, "growth", "--family", "X6", "--config", str(cfg))
    assert code == 2 and "truncated: True" in out
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = _run(capsys, "growth", "--family", "X6", "--config", str(cfg))
    assert code == 3 and "unknown config keys" in err


def test_class_weight5(capsys, tmp_path):
    f = tmp_path / "w5.diag"
    f.write_text("v 3\ne 1 2 5\ne 2 3 1\ne 3 1 1\n")
    code, out, _ = _run(capsys, "class", "--input", str(f))
    assert code == 1 and "InfiniteDetected" in out


def test_class_finite_and_limit(capsys):
    code, out, _ = _run(capsys, "class", "--family", "D~", "--n", "4")
    assert code == 0 and "class size: 10" in out
    code, out, _ = _run(capsys, "class", "--family", "E8~", "--max-nodes", "10")
    assert code == 2


def test_certify_and_replay(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    code, out, _ = _run(capsys, "certify", "--case", "X6", "--out", str(cert))
    assert code == 0 and "verdict: Valid" in out
    assert json.loads(cert.read_text())["verdict"] == "Valid"
    code, out, _ = _run(capsys, "certify", "--replay", str(cert))
    assert code == 0
    code, _, _ = _run(capsys, "certify", "--case", "nope")
    assert code == 3


def test_unfold(capsys, tmp_path):
    code, out, _ = _run(capsys, "unfold", "verify", "--pair", "G2*+->E6^11", "--depth", "5")
    assert code == 0 and "Verified" in out
    code, text, _ = _run(capsys, "unfold", "emit", "--pair", "B~3->D~4")
    f = tmp_path / "p.unf"
    f.write_text(text.replace("0 0 1 0 0\n0 0 1 0 0\n", "0 0 2 0 0\n0 0 0 0 0\n"))
    code, out, _ = _run(capsys, "unfold", "verify", "--input", str(f))
    assert code == 1 and "witness" in out


def test_mutate(capsys, tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("# Markov\n3\n0 2 -2\n-2 0 2\n2 -2 0\n")
    code, out, _ = _run(capsys, "mutate", "--input", str(f), "--word", "1")
    assert code == 0 and out.splitlines()[1].split() == ["0", "-2", "2"]
    code, _, err = _run(capsys, "mutate", "--input", str(f), "--word", "1,1")
    assert code == 3 and "repeats" in err
    code, out, _ = _run(capsys, "mutate", "--input", str(f), "--word", "1,1", "--reduce")
    assert code == 0


def test_catalog(capsys):
    code, out, _ = _run(capsys, "catalog", "list")
    assert code == 0 and "X6" in out
    code, out, _ = _run(capsys, "catalog", "emit", "--name", "X6", "--format", "diagram")
    assert code == 0 and out.startswith("v 6")
    code, out, _ = _run(capsys, "catalog", "emit", "--name", "D~", "--n", "4")
    assert out.startswith("5\n")


@pytest.mark.parametrize("argv", [
    ["growth", "--bogus"], ["frobnicate"], ["growth", "--family", "Q9", "--radius", "2"],
    ["class", "--input", "/nonexistent/file"], [],
])
def test_input_errors(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 3 and err


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "clustergrowth.cli", "catalog", "list"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0 and "Markov" in out.stdout
