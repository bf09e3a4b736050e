"""Dense linear-algebra primitives shared by every learner.

Everything works on float64 numpy arrays. Vectors are 1-D, matrices 2-D.
"""
import numpy as np

#: Relative singular-value cutoff used by :func:`lstsq_pinv`.
PINV_RCOND = 1e-10


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array (1-D input becomes a column)."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf")
    return m


def inner(u, v):
    """Euclidean inner product of two equal-length vectors."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.size} vs {v.size}")
    return float(u @ v)


def frob_norm(M):
    """Frobenius norm, i.e. sqrt of the summed column self inner products."""
    M = np.asarray(M, dtype=np.float64)
    return float(np.sqrt(np.sum(M * M)))


def solve_unit_upper(R, B):
    """Solve ``R @ X = B`` by back-substitution for unit upper triangular R.

    Parameters
    ----------
    R : (L, L) array
        Upper triangular with ones on the diagonal.
    B : (L, m) array

    Returns
    -------
    X : (L, m) array
    """
    R = np.asarray(R, dtype=np.float64)
    B = as_matrix(B, "B")
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"R must be square, got shape {R.shape}")
    L = R.shape[0]
    if B.shape[0] != L:
        raise ValueError(f"B has {B.shape[0]} rows, R is {L}x{L}")
    if L and np.max(np.abs(np.diag(R) - 1.0)) > 1e-12:
        raise ValueError("R must have a unit diagonal")
    X = B.copy()
    for i in range(L - 2, -1, -1):
        X[i] -= R[i, i + 1:] @ X[i + 1:]
    return X


def lstsq_pinv(A, B, rcond=PINV_RCOND):
    """Minimum-norm least-squares solution ``pinv(A) @ B`` via thin SVD.

    Singular values below ``rcond`` times the largest are treated as zero.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"row mismatch: A has {A.shape[0]}, B has {B.shape[0]}")
    if A.size == 0:
        return np.zeros((A.shape[1], B.shape[1]))
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    keep = s > rcond * s[0] if s.size else s.astype(bool)
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return Vt.T @ (inv_s[:, None] * (U.T @ B))
