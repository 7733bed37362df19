"""Tests for data generation, budgets, pipelines, suites, and determinism."""

import json
import math
import os

import numpy as np
import pytest

from qrbf import harness
from qrbf import interpolation as interp


def test_gen_data_shape_box_and_determinism():
    ds1 = harness.gen_data(15, 3, [-2.0, 2.0], seed=4)
    ds2 = harness.gen_data(15, 3, [-2.0, 2.0], seed=4)
    ds3 = harness.gen_data(15, 3, [-2.0, 2.0], seed=5)
    assert ds1.m == 15 and ds1.d == 3
    assert np.array_equal(ds1.sites, ds2.sites)
    assert np.array_equal(ds1.values, ds2.values)
    assert not np.array_equal(ds1.sites, ds3.sites)
    assert np.all(ds1.sites >= -2.0) and np.all(ds1.sites <= 2.0)
    assert np.unique(ds1.sites, axis=0).shape[0] == 15


def test_gen_data_targets():
    ds = harness.gen_data(10, 2, [0.0, 1.0], seed=0, target_fn="constant")
    assert np.all(ds.values == 1.0)
    ds = harness.gen_data(10, 2, [0.0, 1.0], seed=0, target_fn="cosines")
    want = np.prod(np.cos(2.0 * np.pi * ds.sites), axis=1)
    assert np.allclose(ds.values, want, rtol=1e-14)
    ds = harness.gen_data(10, 2, [0.0, 1.0], seed=0, target_fn="franke")
    assert np.all(np.isfinite(ds.values))
    with pytest.raises(ValueError):
        harness.gen_data(10, 2, [0.0, 1.0], seed=0, target_fn="unknown")


def test_resolve_seed_env_and_explicit(monkeypatch):
    monkeypatch.delenv("QRBF_SEED", raising=False)
    assert harness.resolve_seed(None) == 0
    assert harness.resolve_seed(7) == 7
    monkeypatch.setenv("QRBF_SEED", "13")
    assert harness.resolve_seed(None) == 13
    assert harness.resolve_seed(7) == 7  # explicit wins over the environment


def test_config_hash_stable_and_order_free():
    a = {"x": 1, "y": {"z": 2.5}}
    b = {"y": {"z": 2.5}, "x": 1}
    assert harness.config_hash(a) == harness.config_hash(b)
    assert len(harness.config_hash(a)) == 12
    assert harness.config_hash(a) != harness.config_hash({"x": 1, "y": {"z": 2.6}})


def test_merge_config_is_recursive():
    base = {"a": {"b": 1, "c": 2}, "d": 3}
    out = harness.merge_config(base, {"a": {"c": 9}, "e": 4})
    assert out == {"a": {"b": 1, "c": 9}, "d": 3, "e": 4}
    assert base["a"]["c"] == 2  # base not mutated


def test_csv_body_repr_floats_and_determinism():
    rows = [{"a": 0.1 + 0.2, "b": None, "c": True, "d": 7}]
    body = harness.csv_body(["a", "b", "c", "d"], rows)
    assert body.splitlines()[1] == "0.30000000000000004,,True,7"
    assert body == harness.csv_body(["a", "b", "c", "d"], rows)


def test_write_csv_round_trip(tmp_path):
    path = tmp_path / "rows.csv"
    rows = [{"v": float(np.pi)}, {"v": 1e-300}]
    harness.write_csv(path, ["v"], rows)
    text = path.read_text()
    vals = [float(line) for line in text.splitlines()[1:]]
    assert vals[0] == float(np.pi) and vals[1] == 1e-300


def test_derive_budgets_relations():
    b = harness.derive_budgets(1e-2, kappa=10.0, d=2)
    assert b.eps_c == 1e-2
    assert np.isclose(b.eps_A, 1e-2 / 100.0)
    assert np.isclose(b.delta, b.eps_A / 4.0)
    assert b.norm_samples == b.overlap_samples == 10000
    assert b.eps_E == b.eps_F == b.eps_p == 1e-2
    with pytest.raises(ValueError):
        harness.derive_budgets(0.0, 10.0, 2)
    with pytest.raises(ValueError):
        harness.derive_budgets(1.0, 10.0, 2)


def test_readout_budget_formula():
    b = harness.derive_budgets(1e-2, kappa=5.0, d=2)
    phi_norm, y_norm, C, c_norm, o_cl = 0.8, 0.6, 0.2, 3.0, 0.4
    base = max(0.0, 2.0 * (0.5 + 0.5 * o_cl**2) - 1.0)
    eps_o = math.sqrt(base + 2.0 * b.eps_p) - math.sqrt(base)
    want = phi_norm * (b.eps_F * y_norm / C + c_norm * (2.0 * b.eps_c + eps_o))
    got = harness.readout_budget(phi_norm, y_norm, C, c_norm, o_cl, b)
    assert np.isclose(got, want, rtol=1e-14)


def test_classical_pipeline_runs_and_writes(tmp_path):
    cfg = {"pipeline": "classical", "seed": 3, "queries": {"n": 5}}
    out = tmp_path / "run"
    result = harness.run_pipeline(cfg, out_dir=str(out))
    assert result.summary["pipeline"] == "classical"
    assert result.summary["n_queries"] == 5
    assert len(result.query_rows) == 5
    assert all(np.isfinite(row["f_classical"]) for row in result.query_rows)
    assert os.path.exists(result.files["queries"])
    assert os.path.exists(result.files["summary"])
    assert os.path.exists(result.files["dataset"])
    back = interp.load_dataset(result.files["dataset"])
    assert back.m == 8


def test_classical_pipeline_interpolates_training_data(tmp_path):
    qfile = tmp_path / "q.csv"
    ds = harness.gen_data(8, 2, [0.0, 1.0], seed=3)
    with open(qfile, "w") as fh:
        fh.write("x1,x2\n")
        for row in ds.sites:
            fh.write(f"{float(row[0])!r},{float(row[1])!r}\n")
    cfg = {
        "pipeline": "classical",
        "seed": 3,
        "dataset": {"m": 8, "d": 2, "box": [0.0, 1.0], "target": "franke", "seed": 3},
        "queries": {"file": str(qfile)},
    }
    result = harness.run_pipeline(cfg)
    got = np.array([row["f_classical"] for row in result.query_rows])
    assert np.allclose(got, ds.values, atol=1e-8)


def test_global_pipeline_analytic_readout_matches_classical():
    cfg = {
        "pipeline": "quantum-global",
        "seed": 1,
        "kernel": {"family": "gaussian", "sigma": 0.4},
        "queries": {"n": 6},
    }
    result = harness.run_pipeline(cfg)
    s = result.summary
    assert s["fidelity_vs_classical"] > 1.0 - 1e-9
    assert s["gram_frobenius_error"] <= s["gram_frobenius_budget"]
    for row in result.query_rows:
        assert abs(row["f_quantum_analytic"] - row["f_classical"]) < 1e-6
        assert row["within_budget"]
    assert s["all_within_budget"]


def test_global_pipeline_rejects_non_gaussian_kernel():
    cfg = {
        "pipeline": "quantum-global",
        "kernel": {"family": "matern-c2", "eta": 1.0},
    }
    with pytest.raises(ValueError):
        harness.run_pipeline(cfg)


def test_global_pipeline_quantized_mode_smoke():
    # sharp kernel keeps kappa small enough for the 10-bit clock default
    cfg = {
        "pipeline": "quantum-global",
        "seed": 3,
        "epsilon": 5e-2,
        "kernel": {"family": "gaussian", "sigma": 0.15},
        "inversion": {"mode": "quantized"},
        "queries": {"n": 3},
    }
    result = harness.run_pipeline(cfg)
    s = result.summary
    assert s["inversion_mode"] == "quantized"
    assert s["deviation_from_ideal"] is not None
    assert s["deviation_from_ideal"] < 0.05


def test_global_pipeline_dme_check_block():
    cfg = {
        "pipeline": "quantum-global",
        "seed": 1,
        "dme_check": {"enabled": True, "t": 1.0, "steps": 32},
        "queries": {"n": 2},
    }
    s = harness.run_pipeline(cfg).summary
    assert s["dme_check"] is not None
    assert s["dme_check"]["steps"] == 32
    assert s["dme_check"]["trace_norm_error"] > 0.0


def test_compact_pipeline_exact_oracles():
    cfg = {
        "pipeline": "quantum-compact",
        "seed": 4,
        "kernel": {"family": "wendland", "d": 3, "k": 2, "alpha": 0.7},
        "queries": {"n": 5},
    }
    result = harness.run_pipeline(cfg)
    s = result.summary
    assert s["pipeline"] == "quantum-compact"
    assert s["matrix_frobenius_error"] == 0.0
    assert s["fidelity_vs_exact_solution"] > 1.0 - 1e-9
    for row in result.query_rows:
        assert abs(row["f_quantum_analytic"] - row["f_classical"]) < 1e-6


def test_compact_pipeline_estimated_oracles():
    cfg = {
        "pipeline": "quantum-compact",
        "seed": 4,
        "kernel": {"family": "wendland", "d": 3, "k": 2, "alpha": 0.7},
        "compact": {"ae_bits": 10},
        "queries": {"n": 4},
    }
    s = harness.run_pipeline(cfg).summary
    assert s["matrix_frobenius_error"] > 0.0
    assert s["fidelity_vs_exact_solution"] > 0.99


def test_pipeline_rejects_unknown_name():
    with pytest.raises(ValueError):
        harness.run_pipeline({"pipeline": "noqueue"})


def test_stage_labels_surface_in_errors():
    cfg = {"pipeline": "classical", "dataset": {"m": 3, "d": 2, "box": [0.0, 0.0]}}
    with pytest.raises(RuntimeError, match="stage: dataset"):
        harness.run_pipeline(cfg)


def test_verify_bounds_truncation_suite_and_files(tmp_path):
    res = harness.verify_bounds("truncation", seed=0, out_dir=str(tmp_path))
    assert res.ok and res.n_failed == 0
    assert len(res.rows) > 200
    assert os.path.exists(res.files["csv"])
    assert os.path.exists(res.files["json"])
    payload = json.loads(open(res.files["json"]).read())
    assert payload["failed"] == 0 and payload["ok"]
    with pytest.raises(ValueError):
        harness.verify_bounds("not-a-suite")


def test_verify_bounds_rows_are_deterministic():
    a = harness.verify_bounds("gram", seed=5)
    b = harness.verify_bounds("gram", seed=5)
    body_a = harness.csv_body(a.fieldnames, a.rows)
    body_b = harness.csv_body(b.fieldnames, b.rows)
    assert body_a == body_b


def test_sweep_over_ae_bits(tmp_path):
    cfg = {
        "pipeline": "quantum-compact",
        "seed": 6,
        "kernel": {"family": "wendland", "d": 3, "k": 2, "alpha": 0.8},
        "queries": {"n": 3},
    }
    rows, path = harness.sweep(cfg, "compact.ae_bits", [6, 10], out_dir=str(tmp_path))
    assert [row["value"] for row in rows] == [6, 10]
    assert all(np.isfinite(row["max_abs_err"]) for row in rows)
    assert os.path.exists(path)


def test_set_by_path_nested():
    cfg = harness.default_config()
    harness._set_by_path(cfg, "inversion.mode", "quantized")
    assert cfg["inversion"]["mode"] == "quantized"
    harness._set_by_path(cfg, "dataset.m", 5)
    assert cfg["dataset"]["m"] == 5


def test_pipeline_outputs_are_byte_identical_across_reruns(tmp_path):
    cfg = {
        "pipeline": "quantum-global",
        "seed": 9,
        "queries": {"n": 4},
    }
    out1, out2 = tmp_path / "a", tmp_path / "b"
    harness.run_pipeline(dict(cfg), out_dir=str(out1))
    harness.run_pipeline(dict(cfg), out_dir=str(out2))
    for name in ("queries.csv", "summary.json", "dataset.csv", "solve_report.json"):
        b1 = (out1 / name).read_bytes()
        b2 = (out2 / name).read_bytes()
        assert b1 == b2, f"{name} differs between reruns"
