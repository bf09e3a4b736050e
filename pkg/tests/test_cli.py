import csv
import json

import numpy as np
import pytest

from confignet.cli import main


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture
def iris_config(tmp_path, iris_path):
    return _write(tmp_path / "cfg.json", {
        "algorithm": "oscn", "T_max": 10, "lambda_grid": "0.5:0.5:10", "L_max": 10, "sigma": 1e-6,
        "dataset": {"path": str(iris_path), "target_cols": 1, "split": {"train": 120, "test": 30, "seed": 0}},
        "trials": 2,
    })


def test_train_happy_path(tmp_path, iris_config, capsys):
    out = tmp_path / "out"
    assert main(["train", "--config", str(iris_config), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert len(report["trials"]) == 2
    assert report["summary"]["test_accuracy"]["ave"] > 0.8
    assert "wall_time_seconds" not in report["trials"][0]
    assert len(json.loads((out / "timings.json").read_text())["wall_time_seconds"]) == 2
    assert (out / "residuals.csv").read_text().startswith("label,algorithm")
    assert "test_accuracy" in capsys.readouterr().out


def test_missing_dataset_is_usage_error(tmp_path, capsys):
    cfg = _write(tmp_path / "cfg.json", {"algorithm": "oscn", "dataset": {"path": "nowhere.csv"}})
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "nowhere.csv" in capsys.readouterr().err


def test_bad_arguments_exit_2(tmp_path):
    assert main(["bench", "--suite", "nope"]) == 2
    assert main(["train", "--config", str(tmp_path / "absent.json")]) == 2
    assert main([]) == 2


def test_bench_table1_schema(tmp_path):
    assert main(["bench", "--suite", "table1", "--trials", "2", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "table1.json").read_text())
    assert doc["suite"] == "table1" and doc["trials"] == 2
    algos = [r["algorithm"] for r in doc["results"]]
    assert algos == ["irvfln", "sc3", "oscn"]
    for r in doc["results"]:
        assert {"summary", "trials", "failed_trials", "per_sample_variance"} <= set(r)
        assert len(r["trials"]) == 2
    with open(tmp_path / "table1_table.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3


def test_bench_is_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["bench", "--suite", "table2", "--trials", "2", "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "table2.json").read_bytes() == (tmp_path / "b" / "table2.json").read_bytes()


def test_synth_and_predict_round_trip(tmp_path):
    data = tmp_path / "eq26.csv"
    assert main(["synth", "--which", "eq26", "--n", "300", "--seed", "1", "--out", str(data)]) == 0
    rows = np.loadtxt(data, delimiter=",", ndmin=2, skiprows=1)
    assert rows.shape == (300, 2)
    cfg = _write(tmp_path / "cfg.json", {
        "algorithm": "oscn", "T_max": 20, "lambda_grid": "150:10:200", "L_max": 60, "epsilon": 0.03,
        "dataset": {"path": str(data), "split": {"train": 240, "test": 60}},
    })
    out = tmp_path / "o"
    assert main(["train", "--config", str(cfg), "--out", str(out)]) == 0
    pred = tmp_path / "pred.csv"
    assert main(["predict", "--model", str(out / "model.json"), "--data", str(data), "--out", str(pred)]) == 0
    with open(pred) as fh:
        got = np.array([float(r[0]) for r in list(csv.reader(fh))[1:]])
    # predictions come back in raw target units
    err = np.sqrt(np.mean((got - rows[:, 1]) ** 2))
    assert err < 0.1 * (rows[:, 1].max() - rows[:, 1].min())
