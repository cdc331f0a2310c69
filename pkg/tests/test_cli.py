import json

import pytest

from cvlab.cli import main
from cvlab.suites import worker_count


def test_scan_indices(tmp_path, capsys):
    out = tmp_path / "scan.json"
    assert main(["scan", "indices", "--nmax", "15", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["pass"] and data["checks"][0]["extra"]["violations"] == 0


def test_verify_symcomb_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "symcomb", "--seed", "3", "--out", str(a)]) == 0
    assert main(["verify", "symcomb", "--seed", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    env = json.loads(a.read_text())["environment"]
    assert env["seed"] == 3 and len(env["config_hash"]) == 64


def test_csv_to_stdout(capsys):
    assert main(["verify", "symcomb", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("name,inputs,measured")


def test_failing_suite_exit_code(tmp_path):
    cfg = tmp_path / "strict.cfg"
    cfg.write_text("tol_exact = 1e-300\n")
    assert main(["verify", "symcomb", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 1


@pytest.mark.parametrize("argv", [
    ["verify", "symcomb", "--n", "9"],
    ["experiment", "comparison", "--k", "2", "--l", "1", "--p", "3", "--q", "1", "--t", "0.1"],
    ["verify", "nonsense"],
    ["scan", "indices", "--nmax", "2"],
])
def test_config_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_bad_config_file_tuple(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("specs = 3,1,2,2,1\n")
    assert main(["verify", "symcomb", "--config", str(cfg)]) == 2


def test_io_errors_exit_3(tmp_path):
    assert main(["verify", "symcomb", "--out", str(tmp_path / "missing" / "r.json")]) == 3
    assert main(["verify", "symcomb", "--config", str(tmp_path / "nope.cfg")]) == 3


def test_experiment_comparison(tmp_path):
    out = tmp_path / "cmp.json"
    argv = ["experiment", "comparison", "--k", "2", "--l", "1", "--p", "2", "--q", "1",
            "--n", "3", "--lambda", "1", "--grid", "16", "--t", "-0.05", "--seed", "0", "--out", str(out)]
    assert main(argv) == 0
    rec = json.loads(out.read_text())["checks"][0]
    assert rec["extra"]["hypothesis_holds"] and rec["extra"]["conclusion_holds"]


def test_threads_env(monkeypatch):
    monkeypatch.setenv("CVLAB_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("CVLAB_THREADS", "0")
    assert worker_count() == 1
    monkeypatch.delenv("CVLAB_THREADS")
    assert worker_count() >= 1
