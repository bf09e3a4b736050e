"""Model representation shared by all builders, plus OSCN finalization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .core_math import frob_norm, solve_unit_upper

SIGMOID = "sigmoid"
ACTIVATIONS = {SIGMOID: expit}


class ConsistencyError(RuntimeError):
    """Internal training state violates an invariant it must hold."""


def activation(kind):
    try:
        return ACTIVATIONS[kind]
    except KeyError:
        raise ValueError(f"unsupported activation {kind!r}") from None


@dataclass(frozen=True)
class HiddenNode:
    w: np.ndarray
    b: float

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64).ravel()
        if not (np.all(np.isfinite(w)) and np.isfinite(self.b)):
            raise ValueError("node parameters must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", float(self.b))


def hidden_output(node, X, act=SIGMOID):
    """Activation vector g(X @ w + b) of one node over the rows of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != node.w.size:
        raise ValueError(f"node expects {node.w.size} inputs, X has shape {X.shape}")
    return activation(act)(X @ node.w + node.b)


def hidden_matrix(W, b, X, act=SIGMOID):
    """N x L activation matrix for stacked node weights W (L x d) and biases b (L,)."""
    return activation(act)(X @ W.T + b)


@dataclass
class NetworkModel:
    """Single-hidden-layer network with output weights in the raw-activation basis.

    ``W`` is L x d (one row per hidden node), ``b`` has length L and
    ``beta`` is L x m.
    """

    d: int
    m: int
    W: np.ndarray = None
    b: np.ndarray = None
    beta: np.ndarray = None
    activation: str = SIGMOID

    def __post_init__(self):
        self.W = np.zeros((0, self.d)) if self.W is None else np.asarray(self.W, dtype=np.float64).reshape(-1, self.d)
        self.b = np.zeros(0) if self.b is None else np.asarray(self.b, dtype=np.float64).ravel()
        L = self.W.shape[0]
        self.beta = np.zeros((L, self.m)) if self.beta is None else np.asarray(self.beta, dtype=np.float64).reshape(L, self.m)
        if self.b.size != L:
            raise ValueError(f"{L} weight rows but {self.b.size} biases")
        activation(self.activation)

    @classmethod
    def from_nodes(cls, nodes, beta, d, m, act=SIGMOID):
        nodes = list(nodes)
        W = np.array([n.w for n in nodes]).reshape(len(nodes), d)
        b = np.array([n.b for n in nodes], dtype=np.float64)
        return cls(d, m, W, b, beta, act)

    @property
    def n_nodes(self):
        return self.W.shape[0]

    @property
    def nodes(self):
        return [HiddenNode(w, b) for w, b in zip(self.W, self.b)]

    def hidden(self, X):
        return hidden_matrix(self.W, self.b, X, self.activation)

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if self.d == 1 else X.reshape(1, -1)
        if X.shape[1] != self.d:
            raise ValueError(f"model expects {self.d} inputs, X has {X.shape[1]} columns")
        if self.n_nodes == 0:
            return np.zeros((X.shape[0], self.m))
        return self.hidden(X) @ self.beta

    def to_dict(self):
        return {
            "d": self.d,
            "m": self.m,
            "activation": self.activation,
            "nodes": [{"w": w.tolist(), "b": float(b)} for w, b in zip(self.W, self.b)],
            "beta": self.beta.tolist(),
        }

    @classmethod
    def from_dict(cls, doc):
        nodes = doc.get("nodes", [])
        d, m = int(doc["d"]), int(doc["m"])
        W = np.array([n["w"] for n in nodes], dtype=np.float64).reshape(len(nodes), d)
        b = np.array([n["b"] for n in nodes], dtype=np.float64)
        beta = np.array(doc.get("beta", []), dtype=np.float64).reshape(len(nodes), m)
        return cls(d, m, W, b, beta, doc.get("activation", SIGMOID))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


def predict(model, X):
    return model.predict(X)


@dataclass
class OrthoState:
    """Training-time orthogonal basis.

    Columns of ``V`` are the orthogonalized activation vectors; ``R`` holds the
    Gram-Schmidt coefficients so that ``H = V @ R``; ``beta_ortho`` are output
    weights in the V basis and ``residual`` is ``T - V @ beta_ortho``.
    Storage is preallocated up to ``capacity`` columns.
    """

    n: int
    m: int
    capacity: int
    L: int = 0
    V: np.ndarray = field(init=False)
    R: np.ndarray = field(init=False)
    vv: np.ndarray = field(init=False)
    beta_ortho: np.ndarray = field(init=False)
    residual: np.ndarray = None

    def __post_init__(self):
        cap = max(self.capacity, 1)
        # column-major V so each basis vector is contiguous
        self.V = np.zeros((self.n, cap), order="F")
        self.R = np.zeros((cap, cap))
        self.vv = np.zeros(cap)
        self.beta_ortho = np.zeros((cap, self.m))
        if self.residual is None:
            self.residual = np.zeros((self.n, self.m))

    @classmethod
    def start(cls, T, capacity):
        T = np.asarray(T, dtype=np.float64)
        return cls(T.shape[0], T.shape[1], capacity, residual=T.copy())

    @property
    def basis(self):
        return self.V[:, : self.L]

    @property
    def coeffs(self):
        return self.R[: self.L, : self.L]

    @property
    def weights(self):
        return self.beta_ortho[: self.L]

    @property
    def norms_sq(self):
        return self.vv[: self.L]

    def append(self, v, coeffs, beta_row):
        """Store a new basis vector with its projection coefficients and weight row."""
        L = self.L
        if L >= self.V.shape[1]:
            self._grow()
        self.V[:, L] = v
        self.vv[L] = v @ v
        self.R[:L, L] = coeffs
        self.R[L, L] = 1.0
        self.beta_ortho[L] = beta_row
        self.residual -= np.outer(v, beta_row)
        self.L = L + 1

    def _grow(self):
        cap = 2 * self.V.shape[1]
        V = np.zeros((self.n, cap), order="F")
        V[:, : self.L] = self.basis
        R = np.zeros((cap, cap))
        R[: self.L, : self.L] = self.coeffs
        vv = np.zeros(cap)
        vv[: self.L] = self.norms_sq
        bo = np.zeros((cap, self.m))
        bo[: self.L] = self.weights
        self.V, self.R, self.vv, self.beta_ortho = V, R, vv, bo

    def check(self, H=None, T=None, tol=1e-9):
        """Raise ConsistencyError if the stored basis is not self-consistent."""
        V = self.basis
        if self.L == 0:
            return
        if np.any(self.norms_sq <= 0):
            raise ConsistencyError("zero-norm basis vector stored")
        R = self.coeffs
        if np.max(np.abs(np.diag(R) - 1.0)) > 1e-12 or np.any(np.tril(R, -1)):
            raise ConsistencyError("R is not unit upper triangular")
        norms = np.sqrt(self.norms_sq)
        G = np.abs(V.T @ V) / np.outer(norms, norms)
        np.fill_diagonal(G, 0.0)
        if G.max() > tol:
            raise ConsistencyError(f"basis orthogonality drift {G.max():.3e}")
        if H is not None:
            err = frob_norm(H - V @ R)
            if err > tol * max(frob_norm(H), 1.0):
                raise ConsistencyError(f"H != V R (error {err:.3e})")
        if T is not None:
            err = frob_norm(self.residual - (T - V @ self.weights))
            if err > 1e-8 * max(frob_norm(T), 1.0):
                raise ConsistencyError(f"residual out of sync (error {err:.3e})")


def finalize(ortho, nodes, act=SIGMOID, X=None, d=None):
    """Convert V-basis output weights to raw-activation weights.

    Since ``H = V @ R`` with R unit upper triangular, ``H @ (R^-1 beta_ortho)``
    reproduces ``V @ beta_ortho`` exactly. When ``X`` is given the basis is
    first checked against the activations of ``nodes`` on X.
    """
    nodes = list(nodes)
    if len(nodes) != ortho.L:
        raise ConsistencyError(f"{len(nodes)} nodes but {ortho.L} basis vectors")
    if d is None:
        d = nodes[0].w.size if nodes else (X.shape[1] if X is not None else 0)
    if X is not None and nodes:
        W = np.array([n.w for n in nodes])
        b = np.array([n.b for n in nodes])
        ortho.check(H=hidden_matrix(W, b, X, act))
    beta = solve_unit_upper(ortho.coeffs, ortho.weights) if ortho.L else np.zeros((0, ortho.m))
    return NetworkModel.from_nodes(nodes, beta, d, ortho.m, act)
