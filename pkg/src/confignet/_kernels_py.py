"""Pure numpy candidate scoring; used when the compiled extension is unavailable."""
import numpy as np
from scipy.special import expit


def score_candidates(X, W, b, V, vv, E, thr):
    """Score a batch of candidate nodes against the current basis and residual.

    Parameters
    ----------
    X : (N, d) inputs.
    W, b : (K, d) weights and (K,) biases of the candidates.
    V : (N, L) orthogonal basis, vv its squared column norms (L may be 0).
    E : (N, m) residual.
    thr : float, the acceptance threshold factor ``1 - r - mu``.

    Returns
    -------
    coeffs : (L, K) projection coefficients of each candidate onto V.
    vnorm2 : (K,) squared norm of each orthogonalized candidate.
    xi : (K, m) per-output supervisory scores.
    """
    H = expit(X @ W.T + b)
    L = V.shape[1]
    if L:
        C = (V.T @ H) / vv[:, None]
        H -= V @ C
    else:
        C = np.zeros((0, H.shape[1]))
    vnorm2 = np.einsum("ik,ik->k", H, H)
    P = E.T @ H
    ee = np.einsum("iq,iq->q", E, E)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = (P * P).T / vnorm2[:, None] - thr * ee[None, :]
    xi[vnorm2 == 0] = -np.inf
    return C, vnorm2, xi
