"""Command-line interface smoke tests."""

import json
import subprocess
import sys

import numpy as np

from qrbf import cli
from qrbf import interpolation as interp


def test_gen_data_writes_loadable_csv(tmp_path, capsys):
    out = tmp_path / "data.csv"
    rc = cli.main(["gen-data", "--m", "12", "--d", "3", "--box", "-1", "1",
                   "--seed", "5", "--out", str(out)])
    assert rc == 0
    ds = interp.load_dataset(out)
    assert ds.m == 12 and ds.d == 3
    assert np.all(ds.sites >= -1.0) and np.all(ds.sites <= 1.0)
    assert "seed 5" in capsys.readouterr().out


def test_gen_data_respects_env_seed(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QRBF_SEED", "21")
    out = tmp_path / "data.csv"
    cli.main(["gen-data", "--m", "6", "--d", "2", "--out", str(out)])
    assert "seed 21" in capsys.readouterr().out


def test_fit_classical_prints_summary(tmp_path, capsys):
    rc = cli.main(["fit", "--pipeline", "classical", "--seed", "2",
                   "--out", str(tmp_path / "run")])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["pipeline"] == "classical"
    assert summary["seed"] == 2
    assert (tmp_path / "run" / "queries.csv").exists()
    assert (tmp_path / "run" / "summary.json").exists()


def test_fit_with_config_and_set_overrides(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"pipeline": "classical", "dataset": {"m": 6}}))
    rc = cli.main(["fit", "--config", str(cfg_path), "--seed", "1",
                   "--set", "dataset.m=5", "--set", "queries.n=3"])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["m"] == 5
    assert summary["n_queries"] == 3


def test_evaluate_prints_query_rows(tmp_path, capsys):
    qfile = tmp_path / "q.csv"
    qfile.write_text("x1,x2\n0.5,0.5\n0.25,0.75\n")
    rc = cli.main(["evaluate", "--pipeline", "classical", "--seed", "3",
                   "--query-file", str(qfile)])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("seed,config_hash,x1,x2,f_classical")
    assert len(lines) == 3


def test_verify_bounds_exit_status_ok(capsys):
    rc = cli.main(["verify-bounds", "--suite", "truncation", "--seed", "0"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "0 failed" in out and "ok" in out


def test_sweep_runs_over_values(tmp_path, capsys):
    rc = cli.main(["sweep", "--pipeline", "classical", "--seed", "4",
                   "--param", "kernel.sigma", "--values", "0.3,0.5",
                   "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "kernel.sigma=0.3" in out and "kernel.sigma=0.5" in out
    assert (tmp_path / "sweep.csv").exists()


def test_installed_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qrbf.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("gen-data", "fit", "evaluate", "verify-bounds", "sweep"):
        assert sub in proc.stdout
