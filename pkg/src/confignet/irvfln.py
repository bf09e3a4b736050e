"""Incremental RVFL baseline: one random node per step, accepted unconditionally.

By default only the new node's output weight is fitted to the current
residual (earlier weights stay frozen). ``weights="global"`` instead refits
every output weight by least squares after each addition.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .common import TrialReport, draw_candidates, residual_rmse
from .core_math import lstsq_pinv
from .dataset import CLASSIFICATION
from .network import SIGMOID, NetworkModel, hidden_matrix


@dataclass
class IrvflnConfig:
    L_max: int = 100
    epsilon: float = 0.05
    lam: float = 1.0
    seed: int = 0
    weights: str = "constructive"

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.L_max < 0 or self.epsilon < 0:
            raise ValueError("need L_max >= 0 and epsilon >= 0")
        if self.weights not in ("constructive", "global"):
            raise ValueError(f"unknown weight scheme {self.weights!r}")


def train_irvfln(ds, config, act=SIGMOID):
    t0 = time.perf_counter()
    X, T = ds.X, ds.T
    d, m = X.shape[1], T.shape[1]
    rng = np.random.default_rng(config.seed)
    eps = 0.0 if ds.task == CLASSIFICATION else config.epsilon
    W = np.zeros((0, d))
    b = np.zeros(0)
    H = np.zeros((X.shape[0], 0))
    beta = np.zeros((0, m))
    E = T.copy()
    report = TrialReport("irvfln", config.seed)
    report.initial_rmse = rmse = residual_rmse(T)
    while W.shape[0] < config.L_max and rmse > eps:
        w_new, b_new = draw_candidates(rng, config.lam, 1, d)
        h = hidden_matrix(w_new, b_new, X, act)
        W = np.vstack([W, w_new])
        b = np.concatenate([b, b_new])
        H = np.column_stack([H, h])
        if config.weights == "global":
            beta = lstsq_pinv(H, T)
            E = T - H @ beta
        else:
            hh = float(h[:, 0] @ h[:, 0])
            row = (E.T @ h[:, 0]) / hh if hh > 0 else np.zeros(m)
            beta = np.vstack([beta, row])
            E = E - np.outer(h[:, 0], row)
        rmse = residual_rmse(E)
        report.residual_history.append(rmse)
        report.accepted_lambda.append(config.lam)
    report.nodes_used = W.shape[0]
    report.train_rmse = rmse
    report.wall_time_seconds = time.perf_counter() - t0
    return NetworkModel(d, m, W, b, beta, act), report
