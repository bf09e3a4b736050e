"""End-to-end acceptance checks.

Each criterion prints one ``PASS``/``FAIL`` line (shown in the pytest terminal
summary, or on stdout when run as ``python tests/test_acceptance.py``).
Statistical criteria use 50 trials from base seed 0.
"""
import functools
import json
import sys
from pathlib import Path

import numpy as np
import pytest

from confignet import bench
from confignet.cli import main as cli_main
from confignet.dataset import Dataset, minmax_normalize
from confignet.harness import DataSpec, dumps, make_config, run_trials
from confignet.network import NetworkModel
from confignet.oscn import OscnConfig, error_bound, train_oscn

TRIALS = 50
DATA_DIR = Path(__file__).parent / "data"
RESULTS = {}

IRIS_CFG = {"algorithm": "oscn", "L_max": 10, "lambda_grid": "0.5:0.5:10", "T_max": 10, "sigma": 1e-6}


@functools.lru_cache(maxsize=None)
def suite(name):
    data_dir = DATA_DIR if name == "classification" else None
    results, _ = bench.run_suite(name, data_dir, TRIALS, 0)
    return results


def pick(results, algorithm, label=None):
    return next(r for r in results if r.algorithm == algorithm and (label is None or r.label == label))


@functools.lru_cache(maxsize=None)
def iris_result():
    data = {"path": str(DATA_DIR / "iris.csv"), "split": {"train": 120, "test": 30, "seed": 0}}
    return run_trials(data, IRIS_CFG, TRIALS, 0, label="iris")


def record(num, title, ok, detail):
    RESULTS[num] = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title}: {detail}"
    print(RESULTS[num])
    assert ok, RESULTS[num]


def _oscn_runs():
    """(dataset, config) pairs for every OSCN configuration the bench suites use."""
    out = []
    for name in ("table1", "table2"):
        for label, data, algos, nodes in bench.suite_cases(name):
            cfg = next(a for a in algos if a["algorithm"] == "oscn")
            spec = DataSpec.from_dict(data)
            for seed in range(10):
                tr, _ = spec.trial_data(seed)
                out.append((tr, make_config(cfg, seed, nodes)))
    spec = DataSpec.from_dict({"path": str(DATA_DIR / "iris.csv"), "split": {"train": 120, "test": 30}})
    cached = spec.load()
    for seed in range(10):
        tr, _ = spec.trial_data(seed, cached)
        out.append((tr, make_config(IRIS_CFG, seed)))
    return out


def test_c01_node_economy():
    res = suite("table1")
    o, s = pick(res, "oscn").ave("nodes_used"), pick(res, "sc3").ave("nodes_used")
    record(1, "eq26 node economy", o < s and o <= 22, f"OSCN {o:.2f} nodes, SCN {s:.2f} nodes (need OSCN < SCN, OSCN <= 22)")


def test_c02_error_level():
    o = pick(suite("table1"), "oscn")
    tr, te = o.ave("train_rmse"), o.ave("test_rmse")
    ok = 0.035 <= tr <= 0.05 and 0.035 <= te <= 0.05
    record(2, "eq26 OSCN error level", ok, f"train {tr:.4f}, test {te:.4f} (need both in [0.035, 0.05])")


def test_c03_irvfln_failure_mode():
    v = pick(suite("table1"), "irvfln").ave("train_rmse")
    record(3, "IRVFLN scope sensitivity", v >= 0.09, f"train RMSE {v:.4f} (need >= 0.09)")


def test_c04_table2_ordering():
    res = suite("table2")
    o, s = pick(res, "oscn", "eq27-8"), pick(res, "sc3", "eq27-8")
    # the comparison is on training RMSE per output
    vals = [(o.ave(f"train_rmse_y{q}"), s.ave(f"train_rmse_y{q}")) for q in (1, 2)]
    ok = all(a < b for a, b in vals)
    detail = ", ".join(f"y{q + 1} OSCN {a:.4f} vs SCN {b:.4f}" for q, (a, b) in enumerate(vals))
    record(4, "eq27 8-node training RMSE ordering", ok, detail)


def test_c05_iris():
    res = iris_result()
    acc = res.ave("test_accuracy")
    record(5, "iris classification", acc >= 0.90, f"test accuracy {acc:.4f} +/- {res.dev('test_accuracy'):.4f} (need >= 0.90)")


def test_c06_constructive_equals_least_squares():
    worst = 0.0
    for s in range(100):
        rng = np.random.default_rng(1000 + s)
        N, d, m, L = int(rng.integers(10, 61)), int(rng.integers(1, 6)), int(rng.integers(1, 4)), int(rng.integers(1, 11))
        ds = minmax_normalize(Dataset(rng.uniform(size=(N, d)), rng.uniform(size=(N, m))))
        model, _, state = train_oscn(ds, OscnConfig(L, 10, 0.0, 1e-6, (0.5, 1.0, 5.0, 10.0), seed=s), return_state=True)
        if model.n_nodes == 0:
            continue
        H = model.hidden(ds.X)
        ref = np.linalg.norm(ds.T - H @ (np.linalg.pinv(H) @ ds.T))
        got = np.linalg.norm(state.residual)
        worst = max(worst, abs(got - ref) / max(ref, 1e-300))
    record(6, "constructive vs pinv residual", worst <= 1e-8, f"worst relative gap {worst:.2e} over 100 instances (need <= 1e-8)")


def test_c07_orthogonality_across_bench():
    bad, runs = [], 0
    for res in suite("table1") + suite("table2") + suite("classification"):
        for t in res.trials:
            runs += 1
            bad += [f for f in t["flags"] if f.startswith("invariant")]
    for t in iris_result().trials:
        runs += 1
        bad += [f for f in t["flags"] if f.startswith("invariant")]
    record(7, "orthogonality invariants", not bad and runs > 0, f"{len(bad)} violations in {runs} runs")


def test_c08_contraction_and_ceiling():
    checked = broken = 0
    trials = [t for res in suite("table1") + suite("table2") if res.algorithm == "oscn" for t in res.trials]
    trials += iris_result().trials
    for t in trials:
        ex = t["extras"]
        prev = ex["e0_sq"]
        for cur, tau in zip(ex["residual_sq"], ex["tau"]):
            checked += 1
            broken += cur - tau * prev > 1e-12 * prev
            prev = cur
        if t["escalation_events"] == 0:
            for L, cur in enumerate(ex["residual_sq"], 1):
                checked += 1
                broken += cur > error_bound(L, ex["e0_sq"]) * (1 + 1e-12)
    record(8, "contraction and error ceiling", broken == 0 and checked > 0, f"{broken} violations in {checked} checks")


def test_c09_finalization_fidelity():
    worst_fin = worst_rt = 0.0
    for ds, cfg in _oscn_runs():
        model, _, state = train_oscn(ds, cfg, return_state=True)
        ref = state.basis @ state.weights
        pred = model.predict(ds.X)
        worst_fin = max(worst_fin, np.linalg.norm(pred - ref) / max(np.linalg.norm(ref), 1e-300))
        back = NetworkModel.from_dict(json.loads(json.dumps(model.to_dict())))
        worst_rt = max(worst_rt, float(np.max(np.abs(back.predict(ds.X) - pred), initial=0.0)))
    ok = worst_fin <= 1e-8 and worst_rt <= 1e-12
    record(9, "finalization and round trip", ok, f"finalize gap {worst_fin:.2e} (<= 1e-8), round-trip gap {worst_rt:.2e} (<= 1e-12)")


def test_c10_determinism(tmp_path):
    same = []
    for name in ("table1", "table2"):
        blobs = []
        for run in ("a", "b"):
            out = tmp_path / f"{name}_{run}"
            assert cli_main(["bench", "--suite", name, "--trials", str(TRIALS), "--out", str(out)]) == 0
            blobs.append((out / f"{name}.json").read_bytes())
        same.append(blobs[0] == blobs[1])
        # the in-process run must agree with the CLI as well
        report = json.loads(blobs[0])
        same.append(dumps([r.to_dict() for r in suite(name)]) == dumps(report["results"]))
    record(10, "byte-identical bench output", all(same), f"{sum(same)}/{len(same)} comparisons identical")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
