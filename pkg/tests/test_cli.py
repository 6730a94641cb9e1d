import csv
import json
import math
import re
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from retarded_sl.cli import run_command

DATA = Path(__file__).parent / "data"
LINE = re.compile(r"^(INFO|WARN|ERROR) [a-z0-9_]+ .+$")


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


def t0_problem(**changes):
    problem = json.loads((DATA / "t0.json").read_text())["problem"]
    problem.update(changes)
    return {"problem": problem}


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("content,code", [
    ("{not json", 1),
    ({"problem": {"alpha": {}}}, 1),
    ({"problem": {"alpha": {"a1m": 0, "a1p": 0, "a2m": 0, "a2p": 1},
                  "beta": {"b1m": 0, "b1p": 0, "b2m": 0, "b2p": 1}}, "extra": 1}, 1),
    ({"problem": {"alpha": {"a1m": "x", "a1p": 0, "a2m": 0, "a2p": 1},
                  "beta": {"b1m": 0, "b1p": 0, "b2m": 0, "b2p": 1}}}, 1),
    (t0_problem(q="sin(t"), 1),
    (t0_problem(theta=[4.0]), 2),
    (t0_problem(delay="t-1"), 2),
    (t0_problem(alpha={"a1m": 0, "a1p": 0, "a2m": 0, "a2p": 0}), 2),
])
def test_exit_codes(tmp_path, capsys, content, code):
    cfg = write_config(tmp_path, content)
    assert run_command(["validate", "--config", str(cfg), "--out", str(tmp_path)]) == code
    err = capsys.readouterr().err.strip().splitlines()
    assert err and all(LINE.match(line) for line in err)


def test_missing_file(tmp_path, capsys):
    assert run_command(["spectrum", "--config", str(tmp_path / "nope.json")]) == 1
    assert capsys.readouterr().err.startswith("ERROR config cannot read")


def test_schema_error_is_located(tmp_path, capsys):
    cfg = write_config(tmp_path, t0_problem(delta="one"))
    run_command(["validate", "--config", str(cfg), "--out", str(tmp_path)])
    assert "config.problem.delta" in capsys.readouterr().err


def test_bad_arguments(tmp_path):
    cfg = DATA / "t0.json"
    assert run_command(["spectrum", "--config", str(cfg), "--jobs", "0"]) == 1
    assert run_command(["spectrum", "--config", str(cfg), "--n-min", "5", "--n-max", "2",
                        "--out", str(tmp_path)]) == 1
    assert run_command(["frobnicate"]) == 1


def test_validate_ok(tmp_path):
    assert run_command(["validate", "--config", str(DATA / "t0.json"), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "validate_summary.json").read_text())
    assert summary["passed"] is True


def test_spectrum_t0(tmp_path):
    assert run_command(["spectrum", "--config", str(DATA / "t0.json"), "--n-min", "0",
                        "--n-max", "30", "--out", str(tmp_path)]) == 0
    rows = [r for r in read_csv(tmp_path / "spectrum.csv") if r["sign"] == "+"]
    by_n = {int(r["n"]): float(r["mu_re"]) for r in rows}
    for n in range(2, 31):
        assert abs(by_n[n] - (n - 1)) <= 1e-9
    assert (tmp_path / "spectrum.png").stat().st_size > 0


def test_json_format(tmp_path):
    assert run_command(["spectrum", "--config", str(DATA / "t0.json"), "--n-min", "2",
                        "--n-max", "4", "--format", "json", "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "spectrum.json").read_text())
    assert [r["n"] for r in rows] == [2, 3, 4]


def run_twice(tmp_path, argv):
    outs = []
    for jobs in ("1", "2"):
        out = tmp_path / f"jobs{jobs}"
        assert run_command([*argv, "--jobs", jobs, "--out", str(out)]) == 0
        outs.append(out)
    return outs


def test_outputs_independent_of_jobs(tmp_path):
    a, b = run_twice(tmp_path, ["trace", "--config", str(DATA / "t0.json"), "--n-max", "8"])
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    assert "trace.png" in names
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_trace_t0(tmp_path):
    assert run_command(["trace", "--config", str(DATA / "t0.json"), "--n-max", "10",
                        "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "trace.csv")
    assert len(rows) == 11
    assert all(abs(float(r["partial_sum"])) <= 1e-6 for r in rows)


def test_nodal_t0(tmp_path):
    assert run_command(["nodal", "--config", str(DATA / "t0.json"), "--n-max", "20",
                        "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "nodal.csv")
    assert len(rows) == 19
    assert abs(float(rows[0]["t_numeric"]) - math.pi / 38) <= 1e-8


def test_nodal_index_too_small(tmp_path, capsys):
    assert run_command(["nodal", "--config", str(DATA / "t0.json"), "--n-max", "2",
                        "--out", str(tmp_path)]) == 1


def test_reconstruct_needs_u_plus(tmp_path, capsys):
    assert run_command(["reconstruct", "--config", str(DATA / "e2flat.json"),
                        "--out", str(tmp_path)]) == 1
    assert "u-plus-zero" in capsys.readouterr().err


def test_reconstruct_rejects_delay(tmp_path):
    cfg = {"problem": {**json.loads((DATA / "e2flat.json").read_text())["problem"], "delay": "t/2"},
           "inverse": {"n": 20}}
    assert run_command(["reconstruct", "--config", str(write_config(tmp_path, cfg)),
                        "--u-plus-zero", "1", "--out", str(tmp_path)]) == 2


@pytest.mark.slow
def test_reconstruct_round_trip(tmp_path):
    assert run_command(["reconstruct", "--config", str(DATA / "e2flat.json"),
                        "--u-plus-zero", "11.0703463164", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "reconstruct_summary.json").read_text())
    assert summary["relative_sup_error_inner"] <= 0.05
    rows = read_csv(tmp_path / "reconstruction.csv")
    assert list(rows[0]) == ["t", "f_hat", "q_hat", "q_true"]
    assert (tmp_path / "reconstruction.png").exists()


def test_limitfn_columns(tmp_path):
    cfg = {**json.loads((DATA / "e2flat.json").read_text()), "inverse": {"n": 40, "grid_points": 17}}
    assert run_command(["limitfn", "--config", str(write_config(tmp_path, cfg)),
                        "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "limitfn.csv")
    assert list(rows[0]) == ["t", "f_hat", "f_exact", "abs_gap"]
    assert len(rows) == 15


def test_verify_examples(tmp_path, capsys):
    code = run_command(["verify-examples", "--out", str(tmp_path)])
    report = json.loads(capsys.readouterr().out)
    failed = [c["quantity"] for c in report["checks"] if not c["passed"]]
    # the printed V+(39) of the second example drops the 1 in 1 + 78^2
    assert failed == ["v_plus(39)"]
    assert code == 3
    listed = {(d["example"], d["quantity"]) for d in report["discrepancies"]}
    assert listed == {("example1", "u_plus(39)"), ("example1", "u_plus(0)"),
                      ("example1", "mu(+40)"), ("example1", "trace"),
                      ("example2", "trace"), ("example2", "mu(+40)")}
    oracle = {(d["example"], d["quantity"]): d for d in report["discrepancies"]}
    assert abs(oracle["example1", "u_plus(39)"]["computed"] + 0.0818686) <= 1e-7
    assert abs(oracle["example1", "u_plus(0)"]["computed"] - math.pi ** 2 / 4) <= 1e-8


def test_trajectory_and_integrals(tmp_path):
    cfg = str(DATA / "t0.json")
    assert run_command(["trajectory", "--config", cfg, "--mu", "3", "--points", "5",
                        "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "trajectory.csv")
    assert abs(float(rows[-1]["y_re"]) + 3) <= 1e-8
    assert run_command(["integrals", "--config", cfg, "--points", "3", "--out", str(tmp_path)]) == 0
    assert all(float(r["u_plus"]) == 0 for r in read_csv(tmp_path / "integrals.csv"))


@pytest.mark.skipif(shutil.which("retarded-sl") is None, reason="console script not installed")
def test_console_script(tmp_path):
    proc = subprocess.run(["retarded-sl", "validate", "--config", str(DATA / "t0.json"),
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0


def test_module_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "retarded_sl.cli", "validate", "--config",
                           str(tmp_path / "missing.json")], capture_output=True, text=True)
    assert proc.returncode == 1
    assert LINE.match(proc.stderr.strip())
