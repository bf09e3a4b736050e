"""Orthogonal stochastic configuration network (OSCN).

Each candidate activation vector is Gram-Schmidt orthogonalized against the
accepted basis before scoring. Candidates whose orthogonal part is shorter
than ``sigma`` are discarded as redundant. Because the basis is orthogonal,
the one-column projection weight of each new node already gives the global
least-squares fit, so no refit is needed.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .common import ConfigurationFailure, TrialReport, draw_candidates, pick_best, residual_rmse
from .dataset import CLASSIFICATION
from .network import SIGMOID, ConsistencyError, HiddenNode, OrthoState, finalize, hidden_output

log = logging.getLogger(__name__)

R_CEILING = 1.0 - 1e-12
# a selected vector more coupled than this to the basis gets a second projection pass
REORTH_TOL = 1e-12
BASIS_TOL = 1e-9
RESIDUAL_TOL = 1e-8
# floating-point slack on the squared-residual contraction check
CONTRACTION_SLACK = 1e-10


@dataclass
class OscnConfig:
    L_max: int = 100
    T_max: int = 20
    epsilon: float = 0.05
    sigma: float = 1e-6
    lambda_grid: tuple = (1.0,)
    seed: int = 0
    max_r_retries: int = 8
    tau_sampler: str = "interval"  # or "two-point"
    selection: str = "pool"  # or "first": stop at the first lambda with an admissible candidate
    check_invariants: bool = True

    def __post_init__(self):
        self.lambda_grid = tuple(float(x) for x in np.atleast_1d(self.lambda_grid))
        if not self.lambda_grid or min(self.lambda_grid) <= 0:
            raise ValueError("lambda_grid must be non-empty and positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.L_max < 0 or self.T_max < 1:
            raise ValueError("need L_max >= 0 and T_max >= 1")
        if self.selection not in ("pool", "first"):
            raise ValueError(f"unknown selection {self.selection!r}")
        if self.tau_sampler not in ("interval", "two-point"):
            raise ValueError(f"unknown tau_sampler {self.tau_sampler!r}")


@dataclass(frozen=True)
class AdaptiveParams:
    L: int
    r: float
    mu: float

    @property
    def tau(self):
        return self.r + self.mu

    @property
    def threshold(self):
        """The factor 1 - r - mu multiplying ||e_q||^2 in the acceptance test."""
        return 1.0 - self.r - self.mu

    def with_r(self, r):
        r = min(r, R_CEILING)
        return AdaptiveParams(self.L, r, (1.0 - r) / (self.L + 1))


def adaptive_params(L):
    """Construction parameters for the L-th node: r = L/(L+1), mu = 1/(L+1)^2."""
    if L < 1:
        raise ValueError("L must be >= 1")
    r = L / (L + 1)
    return AdaptiveParams(L, r, (1.0 - r) / (L + 1))


def error_bound(L, e0_sq):
    """Ceiling on ||e_L||^2 implied by the adaptive schedule."""
    if L < 1:
        raise ValueError("L must be >= 1")
    if e0_sq < 0:
        raise ValueError("e0_sq must be non-negative")
    return 2.0 / (L + 2) * math.exp(L / (L + 1)) * e0_sq


def orthogonalize(h, V, vv=None):
    """Classical Gram-Schmidt: remove from h its projection on each column of V.

    Returns the orthogonal part and the projection coefficients (one per column).
    """
    h = np.asarray(h, dtype=np.float64).ravel()
    V = np.asarray(V, dtype=np.float64)
    if V.size == 0:
        return h.copy(), np.zeros(0)
    if V.ndim != 2 or V.shape[0] != h.size:
        raise ValueError(f"basis shape {V.shape} incompatible with length-{h.size} vector")
    if vv is None:
        vv = np.einsum("ij,ij->j", V, V)
    if np.any(vv <= 0):
        raise ConsistencyError("basis contains a zero vector")
    c = (V.T @ h) / vv
    return h - V @ c, c


def xi_score(v, residual, params):
    """Per-output supervisory scores and their sum for an orthogonal vector v.

    xi_q = <e_q, v>^2 / <v, v> - (1 - r - mu) <e_q, e_q>. The candidate passes
    when every xi_q is non-negative.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    E = np.asarray(residual, dtype=np.float64).reshape(v.size, -1)
    vn = v @ v
    if vn == 0:
        raise ValueError("zero vector cannot be scored")
    p = E.T @ v
    xi = p * p / vn - params.threshold * np.einsum("iq,iq->q", E, E)
    return xi, float(xi.sum())


def beta_update(residual, v):
    """Output-weight row <e_q, v>/<v, v> for each output q."""
    v = np.asarray(v, dtype=np.float64).ravel()
    vn = v @ v
    if vn == 0:
        raise ValueError("zero vector has no projection weight")
    E = np.asarray(residual, dtype=np.float64).reshape(v.size, -1)
    return (E.T @ v) / vn


@dataclass
class Accepted:
    node: HiddenNode
    v: np.ndarray
    coeffs: np.ndarray
    xi: np.ndarray
    params: AdaptiveParams
    lam: float
    escalations: int = 0


def _refine(h, c, state):
    """Orthogonal part of h given first-pass coefficients c, re-projected once if it drifted."""
    V, vv = state.basis, state.norms_sq
    if state.L == 0:
        return h.copy(), np.zeros(0)
    v = h - V @ c
    vn = math.sqrt(v @ v)
    if vn == 0:
        return v, c
    coupling = np.abs(V.T @ v) / (np.sqrt(vv) * vn)
    if coupling.max() > REORTH_TOL:
        c2 = (V.T @ v) / vv
        v = v - V @ c2
        c = c + c2
    return v, c


def configure_node_oscn(state, X, config, params, rng, act=SIGMOID):
    """Find the next hidden node.

    Every lambda in the grid contributes ``T_max`` candidates. Candidates with
    orthogonal norm below sigma are dropped; the survivor with all per-output
    scores non-negative and the largest total score wins. If none passes, r is
    raised and the grid retried, up to ``max_r_retries`` times.
    """
    d = X.shape[1]
    E = state.residual
    escalations = 0
    best_norm = 0.0
    best_xi = -math.inf
    while True:
        pool = []
        for lam in config.lambda_grid:
            W, b = draw_candidates(rng, lam, config.T_max, d)
            C, vn2, xi = kernels.score_candidates(X, W, b, state.basis, state.norms_sq, E, params.threshold)
            norms = np.sqrt(vn2)
            best_norm = max(best_norm, float(norms.max()))
            quality = norms >= config.sigma
            if quality.any():
                best_xi = max(best_xi, float(xi[quality].min(axis=1).max()))
            ok = quality & (xi.min(axis=1) >= 0)
            total = xi.sum(axis=1)
            for k in np.flatnonzero(ok):
                pool.append((total[k], lam, W[k], b[k], C[:, k]))
            if pool and config.selection == "first":
                break
        # highest score first; stable sort keeps draw order on ties
        order = sorted(range(len(pool)), key=lambda i: -pool[i][0])
        for i in order:
            _, lam, w, b, c = pool[i]
            node = HiddenNode(w, b)
            h = hidden_output(node, X, act)
            v, c = _refine(h, np.array(c), state)
            if math.sqrt(v @ v) < config.sigma:
                continue
            xi, _ = xi_score(v, E, params)
            return Accepted(node, v, c, xi, params, lam, escalations)
        if escalations >= config.max_r_retries:
            raise ConfigurationFailure(
                f"no admissible candidate for node {params.L} after {escalations} r escalations",
                best_norm=best_norm,
                best_min_xi=best_xi,
                r=params.r,
            )
        gap = 1.0 - params.r
        if config.tau_sampler == "interval":
            tau = rng.uniform(0.5 * gap, gap)
        else:
            tau = gap if rng.random() < 0.5 else 0.5 * gap
        params = params.with_r(params.r + tau)
        escalations += 1


def _check_step(state, v, prev_sq, params, T):
    """Per-node invariant checks; returns a list of violation messages."""
    problems = []
    L = state.L
    V = state.basis
    norms = np.sqrt(state.norms_sq)
    vn = norms[-1]
    if L > 1:
        coup = np.abs(V[:, :-1].T @ v) / (norms[:-1] * vn)
        if coup.max() > BASIS_TOL:
            problems.append(f"basis_orthogonality:{L}:{coup.max():.3e}")
    E = state.residual
    enorm = math.sqrt(np.sum(E * E))
    if enorm > 0:
        G = np.abs(E.T @ V) / (enorm * norms[None, :])
        if G.max() > RESIDUAL_TOL:
            problems.append(f"residual_orthogonality:{L}:{G.max():.3e}")
    cur_sq = enorm * enorm
    if cur_sq > params.tau * prev_sq + CONTRACTION_SLACK * max(prev_sq, 1e-300):
        problems.append(f"contraction:{L}:{cur_sq:.6e}>{params.tau * prev_sq:.6e}")
    return problems


def train_oscn(ds, config, act=SIGMOID, return_state=False):
    """Grow an OSCN on a normalized dataset until RMSE <= epsilon or L_max nodes.

    Classification datasets ignore epsilon and grow to L_max. With
    ``return_state`` the training-time :class:`OrthoState` is returned as a
    third element.
    """
    t0 = time.perf_counter()
    X, T = ds.X, ds.T
    rng = np.random.default_rng(config.seed)
    eps = 0.0 if ds.task == CLASSIFICATION else config.epsilon
    state = OrthoState.start(T, capacity=max(1, min(config.L_max, 64)))
    report = TrialReport("oscn", config.seed)
    report.initial_rmse = residual_rmse(T)
    e0_sq = float(np.sum(T * T))
    prev_sq = e0_sq
    nodes = []
    r_trace, tau_trace, bound_trace, sq_trace = [], [], [], []
    rmse = report.initial_rmse
    while len(nodes) < config.L_max and rmse > eps:
        L = len(nodes) + 1
        try:
            acc = configure_node_oscn(state, X, config, adaptive_params(L), rng, act)
        except ConfigurationFailure as exc:
            report.flags.append(f"configuration_failure:node {L}")
            report.extras["failure"] = {"node": L, **exc.diagnostics}
            log.warning("%s", exc)
            break
        beta = beta_update(state.residual, acc.v)
        state.append(acc.v, acc.coeffs, beta)
        nodes.append(acc.node)
        report.escalation_events += acc.escalations
        report.accepted_lambda.append(acc.lam)
        cur_sq = float(np.sum(state.residual ** 2))
        if config.check_invariants:
            for p in _check_step(state, acc.v, prev_sq, acc.params, T):
                report.flags.append(f"invariant:{p}")
        if report.escalation_events == 0:
            bound = error_bound(L, e0_sq)
            bound_trace.append(bound)
            if cur_sq > bound * (1 + 1e-12):
                report.flags.append(f"bound_exceeded:{L}")
                log.warning("residual %.4g above theoretical ceiling %.4g at L=%d", cur_sq, bound, L)
        r_trace.append(acc.params.r)
        tau_trace.append(acc.params.tau)
        sq_trace.append(cur_sq)
        prev_sq = cur_sq
        rmse = residual_rmse(state.residual)
        report.residual_history.append(rmse)
    model = finalize(state, nodes, act, d=ds.d)
    report.nodes_used = len(nodes)
    report.train_rmse = rmse
    report.extras.update(
        r=r_trace, tau=tau_trace, bound=bound_trace, residual_sq=sq_trace, e0_sq=e0_sq
    )
    report.wall_time_seconds = time.perf_counter() - t0
    if return_state:
        return model, report, state
    return model, report
