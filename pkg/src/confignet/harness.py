"""Experiment orchestration: metrics, multi-trial statistics and report files."""
from __future__ import annotations

import csv
import json
import logging
import math
import re
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .common import TrialReport
from .dataset import (
    CLASSIFICATION,
    GENERATORS,
    MULTI_OUTPUT_MEAN,
    MULTI_OUTPUT_VAR,
    SplitSpec,
    denormalize_targets,
    fit_minmax,
    load_csv,
    minmax_normalize,
    normalize_inputs,
    split,
)
from .irvfln import IrvflnConfig, train_irvfln
from .oscn import OscnConfig, train_oscn
from .scn import ScnConfig, train_scn

log = logging.getLogger(__name__)

ALGORITHMS = ("irvfln", "sc1", "sc2", "sc3", "oscn")


def rmse(pred, target):
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    if pred.size == 0:
        return 0.0
    return float(np.sqrt(np.mean((pred - target) ** 2)))


def rmse_per_output(pred, target):
    pred = np.asarray(pred, dtype=np.float64).reshape(len(target), -1)
    target = np.asarray(target, dtype=np.float64).reshape(len(target), -1)
    return np.sqrt(np.mean((pred - target) ** 2, axis=0)).tolist()


def accuracy(pred, target_onehot):
    """Fraction of rows whose argmax matches the one-hot target (first max wins ties)."""
    pred = np.asarray(pred, dtype=np.float64)
    target_onehot = np.asarray(target_onehot, dtype=np.float64)
    if pred.shape != target_onehot.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target_onehot.shape}")
    if pred.shape[0] == 0:
        return 0.0
    return float(np.mean(np.argmax(pred, axis=1) == np.argmax(target_onehot, axis=1)))


_SCOPE = re.compile(r"^\s*\{?\s*([^{}]*?)\s*\}?\s*$")


def parse_scope(spec):
    """Parse a lambda grid: "a:s:b" (inclusive when b-a is a multiple of s), "a", or a list."""
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if not isinstance(spec, str):
        return [float(x) for x in spec]
    body = _SCOPE.match(spec).group(1)
    parts = [p.strip() for p in body.split(":")]
    if len(parts) == 1:
        return [float(x) for x in parts[0].split(",") if x.strip()]
    if len(parts) == 2:
        a, b = map(float, parts)
        s = 1.0
    elif len(parts) == 3:
        a, s, b = map(float, parts)
    else:
        raise ValueError(f"bad scope {spec!r}")
    if s <= 0 or b < a:
        raise ValueError(f"bad scope {spec!r}")
    n = math.floor((b - a) / s + 1e-9)
    return [a + k * s for k in range(n + 1)]


# ---------------------------------------------------------------- configs

def make_config(cfg, seed, node_count=None):
    """Build the algorithm-specific config object from a flat dict."""
    algo = cfg["algorithm"].lower()
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {cfg['algorithm']!r}")
    L_max = int(cfg.get("L_max", 100))
    eps = float(cfg.get("epsilon", 0.05))
    if node_count is not None:
        L_max, eps = int(node_count), 0.0
    grid = parse_scope(cfg.get("lambda_grid", [1.0]))
    if algo == "irvfln":
        return IrvflnConfig(L_max, eps, grid[0], seed, cfg.get("weights", "constructive"))
    if algo == "oscn":
        return OscnConfig(
            L_max, int(cfg.get("T_max", 10)), eps, float(cfg.get("sigma", 1e-6)), grid, seed,
            int(cfg.get("max_r_retries", 8)), cfg.get("tau_sampler", "interval"),
            cfg.get("selection", "pool"),
        )
    return ScnConfig(
        L_max, int(cfg.get("T_max", 10)), eps, grid, float(cfg.get("r", 0.999)),
        algo.upper(), int(cfg.get("window", 10)), seed, cfg.get("selection", "pool"),
    )


def train(ds, cfg, seed, node_count=None, return_state=False):
    conf = make_config(cfg, seed, node_count)
    if isinstance(conf, OscnConfig):
        return train_oscn(ds, conf, return_state=return_state)
    if isinstance(conf, IrvflnConfig):
        out = train_irvfln(ds, conf)
    else:
        out = train_scn(ds, conf)
    return out + (None,) if return_state else out


# ---------------------------------------------------------------- data

@dataclass
class DataSpec:
    """Where a trial's data comes from: a CSV file or a seeded generator."""

    path: str | None = None
    synth: str | None = None
    n: int = 1000
    target_cols: int = 1
    has_header: object = "auto"
    task: str | None = None
    train: int | None = None
    test: int | None = None
    split_seed: int = 0

    @classmethod
    def from_dict(cls, doc, base_dir=None):
        doc = dict(doc)
        sp = doc.pop("split", {}) or {}
        path = doc.get("path")
        if path is not None and base_dir is not None and not Path(path).is_absolute():
            path = str(Path(base_dir) / path)
        synth = doc.get("synth") or doc.get("which")
        return cls(
            path=path,
            synth=synth,
            n=int(doc.get("n", 1000)),
            target_cols=int(doc.get("target_cols", 1)),
            has_header=doc.get("has_header", "auto"),
            task=doc.get("task"),
            train=sp.get("train"),
            test=sp.get("test"),
            split_seed=int(sp.get("seed", 0)),
        )

    def load(self):
        if self.synth:
            return None
        return load_csv_auto(self.path, self.target_cols, self.has_header, self.task)

    def trial_data(self, seed, cached=None):
        """Normalized (train, test) for one trial.

        Generated data is redrawn per trial from the trial seed; file data is
        split once with the configured split seed so every trial sees the same rows.
        """
        if self.synth:
            if self.synth not in GENERATORS:
                raise ValueError(f"unknown generator {self.synth!r}")
            ds = GENERATORS[self.synth](self.n, seed)
            split_seed = seed
        else:
            ds = cached if cached is not None else self.load()
            split_seed = self.split_seed
        n_train = self.train if self.train is not None else ds.n
        n_test = self.test if self.test is not None else ds.n - n_train
        tr, te = split(ds, SplitSpec(int(n_train), int(n_test), split_seed))
        meta = fit_minmax(tr)
        return minmax_normalize(tr, meta), minmax_normalize(te, meta) if te.n else te

    def eval_inputs(self, cached=None):
        """Fixed raw-unit inputs on which per-sample prediction variance is measured."""
        if self.synth == "eq26":
            return np.linspace(0.0, 1.0, 201).reshape(-1, 1)
        if self.synth == "eq27":
            half = 2.0 * math.sqrt(MULTI_OUTPUT_VAR)
            g = np.linspace(MULTI_OUTPUT_MEAN - half, MULTI_OUTPUT_MEAN + half, 21)
            a, b = np.meshgrid(g, g, indexing="ij")
            return np.column_stack([a.ravel(), b.ravel()])
        ds = cached if cached is not None else self.load()
        n_train = self.train if self.train is not None else ds.n
        n_test = self.test if self.test is not None else ds.n - n_train
        _, te = split(ds, SplitSpec(int(n_train), int(n_test), self.split_seed))
        return np.array(te.X)


def load_csv_auto(path, target_cols=1, has_header="auto", task=None):
    if has_header == "auto":
        with open(path) as fh:
            first = fh.readline().split(",")
        try:
            [float(c) for c in first[: max(1, len(first) - target_cols)]]
            has_header = False
        except ValueError:
            has_header = True
    return load_csv(path, target_cols, bool(has_header), task)


# ---------------------------------------------------------------- suites

@dataclass
class SuiteResult:
    algorithm: str
    trials: list
    summary: dict
    failed_trials: list
    per_sample_variance: list
    label: str = ""
    timings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "label": self.label,
            "algorithm": self.algorithm,
            "summary": self.summary,
            "failed_trials": self.failed_trials,
            "trials": self.trials,
            "per_sample_variance": self.per_sample_variance,
        }

    def ave(self, key):
        return self.summary[key]["ave"]

    def dev(self, key):
        return self.summary[key]["dev"]


SCALAR_METRICS = (
    "nodes_used", "train_rmse", "test_rmse", "train_accuracy", "test_accuracy", "escalation_events",
)


def summarize(trial_docs):
    """AVE (mean) and DEV (population std) of every metric over successful trials."""
    ok = [t for t in trial_docs if not t["failed"]]
    out = {}
    keys = list(SCALAR_METRICS)
    if ok:
        m = len(ok[0].get("train_rmse_per_output", []))
        keys += [f"train_rmse_y{q + 1}" for q in range(m)]
        keys += [f"test_rmse_y{q + 1}" for q in range(len(ok[0].get("test_rmse_per_output", [])))]
    for key in keys:
        vals = []
        for t in ok:
            if key.startswith(("train_rmse_y", "test_rmse_y")):
                part, q = key.rsplit("_y", 1)
                vals.append(t[part + "_per_output"][int(q) - 1])
            elif t.get(key) is not None:
                vals.append(t[key])
        if vals:
            # exact rational arithmetic: identical trials give DEV == 0.0 exactly
            vals = [float(v) for v in vals]
            out[key] = {"ave": statistics.fmean(vals), "dev": statistics.pstdev(vals), "n": len(vals)}
    return out


def _trial_doc(report, model, train_ds, test_ds, fixed_nodes):
    doc = report.to_dict()
    if fixed_nodes is not None and report.nodes_used < fixed_nodes:
        if not any(f.startswith("configuration_failure") for f in doc["flags"]):
            doc["flags"].append(f"configuration_failure:stopped at {report.nodes_used}")
    doc["failed"] = any(f.startswith("configuration_failure") for f in doc["flags"])
    pred_tr = model.predict(train_ds.X)
    doc["train_rmse"] = rmse(pred_tr, train_ds.T)
    doc["train_rmse_per_output"] = rmse_per_output(pred_tr, train_ds.T)
    if test_ds.n:
        pred_te = model.predict(test_ds.X)
        doc["test_rmse"] = rmse(pred_te, test_ds.T)
        doc["test_rmse_per_output"] = rmse_per_output(pred_te, test_ds.T)
    if train_ds.task == CLASSIFICATION:
        doc["train_accuracy"] = accuracy(pred_tr, train_ds.T)
        if test_ds.n:
            doc["test_accuracy"] = accuracy(pred_te, test_ds.T)
    return doc


def run_trials(data, algo_cfg, trials=1, base_seed=0, node_count=None, label=""):
    """Run ``trials`` seeded trials (seed = base_seed + t) and aggregate.

    ``data`` is a :class:`DataSpec` (or dict). Failed trials stay in the
    per-trial list but are excluded from AVE/DEV and from the variance map.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if isinstance(data, dict):
        data = DataSpec.from_dict(data)
    cached = data.load()
    grid = data.eval_inputs(cached)
    docs, preds, timings = [], [], []
    for t in range(trials):
        seed = base_seed + t
        tr, te = data.trial_data(seed, cached)
        model, report = train(tr, algo_cfg, seed, node_count)
        doc = _trial_doc(report, model, tr, te, node_count)
        doc["trial"] = t
        docs.append(doc)
        timings.append(report.wall_time_seconds)
        if not doc["failed"]:
            out = model.predict(normalize_inputs(grid, tr.norm_meta))
            preds.append(denormalize_targets(out, tr.norm_meta))
    variance = np.var(np.stack(preds), axis=0).tolist() if preds else []
    return SuiteResult(
        algorithm=algo_cfg["algorithm"].lower(),
        trials=docs,
        summary=summarize(docs),
        failed_trials=[d["trial"] for d in docs if d["failed"]],
        per_sample_variance=variance,
        label=label,
        timings=timings,
    )


def run_fixed_nodes(ds, algo_cfg, node_count, seed=0):
    """Train on an already-normalized dataset until exactly ``node_count`` nodes."""
    if node_count < 1:
        raise ValueError("node_count must be >= 1")
    model, report = train(ds, algo_cfg, seed, node_count)
    if report.nodes_used < node_count and not report.failed:
        report.flags.append(f"configuration_failure:stopped at {report.nodes_used}")
    return model, report


# ---------------------------------------------------------------- output

def dumps(obj):
    """Canonical JSON text: sorted keys, repr floats, so equal results give equal bytes."""
    return json.dumps(obj, sort_keys=True, indent=1, allow_nan=True)


def write_residual_csv(results, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "algorithm", "trial", "seed", "rmse_after_each_node"])
        for res in results:
            for t in res.trials:
                w.writerow([res.label, res.algorithm, t["trial"], t["seed"]]
                           + [repr(x) for x in t["residual_history"]])
