"""Baseline stochastic configuration network with the SC-I/II/III weight schemes."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .common import ConfigurationFailure, TrialReport, draw_candidates, pick_best, residual_rmse
from .core_math import lstsq_pinv
from .dataset import CLASSIFICATION
from .network import SIGMOID, HiddenNode, NetworkModel, hidden_output

log = logging.getLogger(__name__)

SCHEMES = ("SC1", "SC2", "SC3")


@dataclass
class ScnConfig:
    L_max: int = 100
    T_max: int = 20
    epsilon: float = 0.05
    lambda_grid: tuple = (1.0,)
    r: float = 0.999
    scheme: str = "SC3"
    window: int = 10
    seed: int = 0
    selection: str = "pool"  # or "first"

    def __post_init__(self):
        if self.selection not in ("pool", "first"):
            raise ValueError(f"unknown selection {self.selection!r}")
        self.lambda_grid = tuple(float(x) for x in np.atleast_1d(self.lambda_grid))
        self.scheme = self.scheme.upper()
        if not self.lambda_grid or min(self.lambda_grid) <= 0:
            raise ValueError("lambda_grid must be non-empty and positive")
        if not 0 < self.r < 1:
            raise ValueError("r must lie in (0, 1)")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.L_max < 0 or self.T_max < 1:
            raise ValueError("need L_max >= 0 and T_max >= 1")


@dataclass
class CandidateRecord:
    node: HiddenNode
    h: np.ndarray
    xi: float
    xi_min: float
    lam: float = 0.0


class ScnState:
    """Raw activation columns, output weights and residual of a growing SCN."""

    def __init__(self, T):
        self.T = np.asarray(T, dtype=np.float64)
        n, m = self.T.shape
        self.H = np.zeros((n, 0))
        self.beta = np.zeros((0, m))
        self.residual = self.T.copy()
        self.nodes = []

    @property
    def L(self):
        return self.H.shape[1]

    def add_column(self, node, h):
        self.nodes.append(node)
        self.H = np.column_stack([self.H, h])
        self.beta = np.vstack([self.beta, np.zeros((1, self.T.shape[1]))])


def contractive_mu(r, L):
    """mu_L = (1 - r)/(L + 1)."""
    return (1.0 - r) / (L + 1)


def sc_xi(h, residual, r, mu):
    """Supervisory scores of a raw activation vector against the residual."""
    h = np.asarray(h, dtype=np.float64).ravel()
    hh = h @ h
    if hh == 0:
        raise ValueError("zero activation vector")
    E = np.asarray(residual, dtype=np.float64).reshape(h.size, -1)
    p = E.T @ h
    xi = p * p / hh - (1.0 - r - mu) * np.einsum("iq,iq->q", E, E)
    return xi, float(xi.sum())


def passes_supervisory_inequality(h, residual, r, mu):
    """The acceptance inequality in product form, <e_q,h>^2 >= (1-r-mu)||h||^2 ||e_q||^2 for all q."""
    h = np.asarray(h, dtype=np.float64).ravel()
    E = np.asarray(residual, dtype=np.float64).reshape(h.size, -1)
    lhs = (E.T @ h) ** 2
    rhs = (1.0 - r - mu) * (h @ h) * np.einsum("iq,iq->q", E, E)
    return bool(np.all(lhs >= rhs))


def configure_node_scn(state, X, config, rng, act=SIGMOID):
    """Pick the admissible candidate with the largest total score over the whole lambda grid."""
    d = X.shape[1]
    L = state.L + 1
    mu = contractive_mu(config.r, L)
    thr = 1.0 - config.r - mu
    empty = np.zeros((X.shape[0], 0))
    best = None
    best_xi = -math.inf
    for lam in config.lambda_grid:
        W, b = draw_candidates(rng, lam, config.T_max, d)
        _, _, xi = kernels.score_candidates(X, W, b, empty, np.zeros(0), state.residual, thr)
        xi_min = xi.min(axis=1)
        best_xi = max(best_xi, float(xi_min.max()))
        total = xi.sum(axis=1)
        k = pick_best(total, xi_min >= 0)
        if k is not None and (best is None or total[k] > best[0]):
            best = (total[k], xi_min[k], lam, W[k], b[k])
        if best is not None and config.selection == "first":
            break
    if best is None:
        raise ConfigurationFailure(
            f"no admissible candidate for node {L}", best_min_xi=best_xi, r=config.r
        )
    total, xi_min, lam, w, b = best
    node = HiddenNode(w, b)
    return CandidateRecord(node, hidden_output(node, X, act), float(total), float(xi_min), lam)


def update_weights_sc1(state, candidate):
    """Append the node and fit only its own weight to the current residual."""
    h = candidate.h
    beta_row = (state.residual.T @ h) / (h @ h)
    state.add_column(candidate.node, h)
    state.beta[-1] = beta_row
    state.residual = state.residual - np.outer(h, beta_row)
    return beta_row


def update_weights_sc2(state, candidate, window):
    """Append the node and refit the weights of the newest ``window`` nodes."""
    state.add_column(candidate.node, candidate.h)
    k = min(window, state.L)
    frozen = state.H[:, :-k] @ state.beta[:-k] if state.L > k else 0.0
    target = state.T - frozen
    block = lstsq_pinv(state.H[:, -k:], target)
    state.beta[-k:] = block
    state.residual = target - state.H[:, -k:] @ block
    return block


def update_weights_sc3(state, candidate):
    """Append the node and refit every output weight by global least squares."""
    state.add_column(candidate.node, candidate.h)
    state.beta = lstsq_pinv(state.H, state.T)
    state.residual = state.T - state.H @ state.beta
    return state.beta


def train_scn(ds, config, act=SIGMOID):
    """Grow an SCN until RMSE <= epsilon or L_max nodes (classification ignores epsilon)."""
    t0 = time.perf_counter()
    X, T = ds.X, ds.T
    rng = np.random.default_rng(config.seed)
    eps = 0.0 if ds.task == CLASSIFICATION else config.epsilon
    state = ScnState(T)
    report = TrialReport(config.scheme.lower(), config.seed)
    report.initial_rmse = rmse = residual_rmse(T)
    while state.L < config.L_max and rmse > eps:
        try:
            cand = configure_node_scn(state, X, config, rng, act)
        except ConfigurationFailure as exc:
            report.flags.append(f"configuration_failure:node {state.L + 1}")
            report.extras["failure"] = {"node": state.L + 1, **exc.diagnostics}
            log.warning("%s", exc)
            break
        if config.scheme == "SC1":
            update_weights_sc1(state, cand)
        elif config.scheme == "SC2":
            update_weights_sc2(state, cand, config.window)
        else:
            update_weights_sc3(state, cand)
        report.accepted_lambda.append(cand.lam)
        rmse = residual_rmse(state.residual)
        report.residual_history.append(rmse)
    model = NetworkModel.from_nodes(state.nodes, state.beta, X.shape[1], T.shape[1], act)
    report.nodes_used = state.L
    report.train_rmse = rmse
    report.wall_time_seconds = time.perf_counter() - t0
    return model, report
