# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled candidate scoring.

Candidates are processed in fixed-size blocks: activations are written into an
N x BLOCK buffer, projected against the basis with dgemm (classical
Gram-Schmidt), then scored. Memory stays O(N * BLOCK) regardless of K.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, INFINITY
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

DEF BLOCK = 32


def score_candidates(X, W, b, V, vv, E, double thr):
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1, :] Vf = np.asfortranarray(V, dtype=np.float64)
    cdef const double[::1] vvv = np.ascontiguousarray(vv, dtype=np.float64)
    cdef double[::1, :] Ef = np.asfortranarray(E, dtype=np.float64)

    cdef int N = <int>Xv.shape[0], d = <int>Xv.shape[1], K = <int>Wv.shape[0]
    cdef int L = <int>Vf.shape[1], m = <int>Ef.shape[1]
    cdef int i, j, k, q, k0, nb
    cdef double z, nrm, p, acc
    cdef double dzero = 0.0, done = 1.0, dmone = -1.0
    cdef char trans = b'T', notrans = b'N'

    coeffs_a = np.zeros((max(L, 1), K), order="F")
    vnorm2_a = np.zeros(K)
    xi_a = np.zeros((K, m))
    cdef double[::1, :] C = coeffs_a
    cdef double[::1] vn = vnorm2_a
    cdef double[:, ::1] xi = xi_a
    cdef double[::1, :] Hb = np.empty((max(N, 1), BLOCK), order="F")
    cdef double[::1, :] P = np.empty((max(m, 1), BLOCK), order="F")
    cdef double[::1] ee = np.zeros(max(m, 1))

    with nogil:
        for q in range(m):
            acc = 0.0
            for i in range(N):
                acc = acc + Ef[i, q] * Ef[i, q]
            ee[q] = acc
        k0 = 0
        while k0 < K:
            nb = K - k0
            if nb > BLOCK:
                nb = BLOCK
            for k in range(nb):
                for i in range(N):
                    z = bv[k0 + k]
                    for j in range(d):
                        z = z + Xv[i, j] * Wv[k0 + k, j]
                    Hb[i, k] = 1.0 / (1.0 + exp(-z))
            if L > 0:
                # C[:, block] = V^T Hb, scaled by 1/<v_j, v_j>; then Hb -= V C
                dgemm(&trans, &notrans, &L, &nb, &N, &done, &Vf[0, 0], &N,
                      &Hb[0, 0], &N, &dzero, &C[0, k0], &L)
                for k in range(nb):
                    for j in range(L):
                        C[j, k0 + k] = C[j, k0 + k] / vvv[j]
                dgemm(&notrans, &notrans, &N, &nb, &L, &dmone, &Vf[0, 0], &N,
                      &C[0, k0], &L, &done, &Hb[0, 0], &N)
            if m > 0:
                dgemm(&trans, &notrans, &m, &nb, &N, &done, &Ef[0, 0], &N,
                      &Hb[0, 0], &N, &dzero, &P[0, 0], &m)
            for k in range(nb):
                nrm = 0.0
                for i in range(N):
                    nrm = nrm + Hb[i, k] * Hb[i, k]
                vn[k0 + k] = nrm
                for q in range(m):
                    if nrm == 0.0:
                        xi[k0 + k, q] = -INFINITY
                    else:
                        p = P[q, k]
                        xi[k0 + k, q] = p * p / nrm - thr * ee[q]
            k0 = k0 + nb
    return coeffs_a[:L], vnorm2_a, xi_a
