"""Time the compiled and numpy candidate-scoring kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from confignet import kernels

SIZES = [  # (N, d, m, L, K)
    (200, 1, 1, 5, 20),
    (800, 1, 1, 20, 20),
    (800, 1, 1, 60, 20),
    (600, 2, 2, 8, 10),
    (4000, 8, 3, 20, 20),
    (4000, 8, 3, 100, 20),
]


def make_inputs(N, d, m, L, K, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(N, d))
    V = np.asfortranarray(np.linalg.qr(rng.normal(size=(N, L)))[0])
    vv = np.einsum("ij,ij->j", V, V)
    W = rng.uniform(-5, 5, size=(K, d))
    b = rng.uniform(-5, 5, size=K)
    E = rng.normal(size=(N, m))
    return X, W, b, V, vv, E, 1e-3


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    fast = kernels.compiled_score_candidates
    print(f"{'N':>5} {'d':>2} {'m':>2} {'L':>4} {'K':>3}  {'numpy ms':>9}  {'compiled ms':>11}  speedup  max|diff|")
    for size in SIZES:
        inputs = make_inputs(*size)
        t_py = min(timeit.repeat(lambda: kernels.python_score_candidates(*inputs), number=1, repeat=args.repeat))
        if fast is None:
            print(f"{size[0]:5d} {size[1]:2d} {size[2]:2d} {size[3]:4d} {size[4]:3d}  {1e3 * t_py:9.3f}  {'n/a':>11}")
            continue
        t_c = min(timeit.repeat(lambda: fast(*inputs), number=1, repeat=args.repeat))
        a, b = kernels.python_score_candidates(*inputs), fast(*inputs)
        diff = max(float(np.max(np.abs(x - y), initial=0.0)) for x, y in zip(a, b))
        print(f"{size[0]:5d} {size[1]:2d} {size[2]:2d} {size[3]:4d} {size[4]:3d}  {1e3 * t_py:9.3f}  "
              f"{1e3 * t_c:11.3f}  {t_py / t_c:6.2f}x  {diff:.1e}")
    if fast is None:
        print("compiled extension not built; only the numpy path was timed")


if __name__ == "__main__":
    main()
