import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from confignet.core_math import frob_norm, inner, lstsq_pinv, solve_unit_upper

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("u, v, expected", [
    ([1, 0], [0, 1], 0.0),
    ([1, 2], [1, 2], 5.0),
    ([2, 0], [1, 0], 2.0),
])
def test_inner_examples(u, v, expected):
    assert inner(u, v) == expected


def test_inner_rejects_length_mismatch():
    with pytest.raises(ValueError):
        inner([1, 2], [1, 2, 3])


@given(arrays(np.float64, (3, 7), elements=finite), st.floats(-10, 10), st.floats(-10, 10))
def test_inner_symmetric_bilinear(m, a, b):
    u, v, w = m
    assert inner(u, v) == pytest.approx(inner(v, u), rel=1e-12, abs=1e-12)
    lhs = inner(a * u + b * w, v)
    rhs = a * inner(u, v) + b * inner(w, v)
    scale = (abs(a) * np.abs(u) + abs(b) * np.abs(w)) @ np.abs(v)
    assert abs(lhs - rhs) <= 1e-12 * max(scale, 1.0)


@pytest.mark.parametrize("M, expected", [
    (np.zeros((3, 2)), 0.0),
    ([[3], [4]], 5.0),
    ([[1, 1], [1, 1]], 2.0),
])
def test_frob_norm_examples(M, expected):
    assert frob_norm(M) == expected


@given(arrays(np.float64, (6, 3), elements=finite))
def test_frob_norm_is_sum_of_column_inner_products(M):
    cols = sum(inner(M[:, q], M[:, q]) for q in range(M.shape[1]))
    assert frob_norm(M) ** 2 == pytest.approx(cols, rel=1e-12, abs=1e-300)


def test_solve_unit_upper_examples():
    np.testing.assert_array_equal(solve_unit_upper([[1, 1], [0, 1]], [[1], [1]]), [[0], [1]])
    np.testing.assert_array_equal(solve_unit_upper([[1, 2], [0, 1]], [[5], [2]]), [[1], [2]])
    B = np.arange(12.0).reshape(4, 3)
    np.testing.assert_array_equal(solve_unit_upper(np.eye(4), B), B)


def test_solve_unit_upper_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_unit_upper(np.ones((2, 3)), np.ones((2, 1)))
    with pytest.raises(ValueError):
        solve_unit_upper([[2, 0], [0, 1]], [[1], [1]])


@settings(max_examples=50)
@given(st.integers(1, 12), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_solve_unit_upper_recovers_rhs(L, m, seed):
    rng = np.random.default_rng(seed)
    R = np.triu(rng.uniform(-0.5, 0.5, size=(L, L)), 1) + np.eye(L)
    B = rng.normal(size=(L, m))
    X = solve_unit_upper(R, B)
    assert np.linalg.norm(R @ X - B) <= 1e-10 * np.linalg.norm(B)


def test_lstsq_pinv_examples():
    B = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(lstsq_pinv(np.eye(2), B), B, atol=1e-15)
    np.testing.assert_allclose(lstsq_pinv([[1.0], [1.0]], [[1.0], [3.0]]), [[2.0]], rtol=1e-14)


def test_lstsq_pinv_beats_random_probes(rng):
    A = rng.normal(size=(20, 5))
    B = rng.normal(size=(20, 2))
    X = lstsq_pinv(A, B)
    best = np.linalg.norm(A @ X - B)
    for _ in range(1000):
        Y = X + rng.normal(scale=rng.choice([1e-3, 1e-1, 1.0]), size=X.shape)
        assert best <= np.linalg.norm(A @ Y - B)


def test_lstsq_pinv_handles_rank_deficiency(rng):
    A = rng.normal(size=(10, 3))
    A = np.column_stack([A, A[:, 0]])
    B = rng.normal(size=(10, 1))
    X = lstsq_pinv(A, B)
    ref = np.linalg.lstsq(A, B, rcond=None)[0]
    np.testing.assert_allclose(A @ X, A @ ref, atol=1e-10)
    # minimum-norm: duplicated columns share the weight equally
    assert X[0, 0] == pytest.approx(X[3, 0], rel=1e-9)
