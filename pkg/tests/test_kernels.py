import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from confignet import kernels
from confignet.oscn import orthogonalize

pytestmark = pytest.mark.skipif(kernels.compiled_score_candidates is None, reason="compiled kernel not built")


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 120), st.integers(1, 4), st.integers(1, 70), st.integers(0, 12),
    st.integers(1, 3), st.floats(0.0, 0.9), st.integers(0, 2**32 - 1),
)
def test_backends_agree(N, d, K, L, m, thr, seed):
    rng = np.random.default_rng(seed)
    L = min(L, N)
    X = rng.uniform(size=(N, d))
    W = rng.uniform(-5, 5, size=(K, d))
    b = rng.uniform(-5, 5, size=K)
    V = np.linalg.qr(rng.normal(size=(N, L)))[0] * rng.uniform(0.5, 2.0, size=L) if L else np.zeros((N, 0))
    vv = np.einsum("ij,ij->j", V, V)
    E = rng.normal(size=(N, m))
    c1, n1, x1 = kernels.compiled_score_candidates(X, W, b, V, vv, E, thr)
    c2, n2, x2 = kernels.python_score_candidates(X, W, b, V, vv, E, thr)
    assert c1.shape == c2.shape == (L, K)
    np.testing.assert_allclose(c1, c2, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(n1, n2, rtol=1e-9, atol=1e-12)
    # candidates numerically inside span(V) have an orthogonal part made of rounding noise
    solid = n2 > 1e-20 * N
    np.testing.assert_allclose(x1[solid], x2[solid], rtol=1e-8, atol=1e-10)


def test_kernel_matches_reference_gram_schmidt(rng):
    from scipy.special import expit

    X = rng.uniform(size=(30, 2))
    W = rng.uniform(-3, 3, size=(5, 2))
    b = rng.uniform(-3, 3, size=5)
    V = np.linalg.qr(rng.normal(size=(30, 4)))[0]
    vv = np.ones(4)
    E = rng.normal(size=(30, 2))
    for fn in (kernels.compiled_score_candidates, kernels.python_score_candidates):
        C, vn2, xi = fn(X, W, b, V, vv, E, 0.3)
        for k in range(5):
            h = expit(X @ W[k] + b[k])
            v, c = orthogonalize(h, V)
            np.testing.assert_allclose(C[:, k], c, rtol=1e-12, atol=1e-14)
            assert vn2[k] == pytest.approx(v @ v, rel=1e-12)
            ref = (E.T @ v) ** 2 / (v @ v) - 0.3 * np.sum(E * E, axis=0)
            np.testing.assert_allclose(xi[k], ref, rtol=1e-10, atol=1e-12)


def test_selected_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
