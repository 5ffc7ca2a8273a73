"""Time the batched 4x4 kernels on the numba and pure-numpy paths.

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 5]

The first numba call per kernel is a warmup and is excluded.
"""
import argparse
import time

import numpy as np

from spinfiber import _accel, decompose, mat4
from spinfiber.base_metric import DiagonalMetric


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n = args.n
    A = rng.normal(size=(n, 4, 4))
    S = A + A.transpose(0, 2, 1)
    G = 0.3 * A
    T = np.eye(4) + rng.uniform(-0.1, 0.1, size=(n, 4, 4))
    metrics = [DiagonalMetric((1, -1, -1, -1), tuple(x)) for x in rng.uniform(-3, 3, size=(min(n, 2000), 4))]
    Tf = T[: len(metrics)]

    cases = {
        "eig_sym4": lambda nb: mat4.eig_sym4_batch(S, use_numba=nb),
        "mat_exp": lambda nb: mat4.mat_exp_batch(G, use_numba=nb),
        "mat_log": lambda nb: mat4.mat_log_batch(T, use_numba=nb),
        f"factorize x{len(metrics)}": lambda nb: [decompose.factorize(t, d, use_numba=nb) for t, d in zip(Tf, metrics)],
    }
    backends = [False] + ([True] if _accel.HAVE_NUMBA else [])
    print(f"n={n} repeat={args.repeat} numba_available={_accel.HAVE_NUMBA}")
    print(f"{'kernel':<18}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, fn in cases.items():
        row = {}
        for nb in backends:
            fn(nb)
            row[nb] = best_of(lambda: fn(nb), args.repeat)
        if True in row:
            print(f"{name:<18}{row[False]:>12.4f}{row[True]:>12.4f}{row[False] / row[True]:>9.1f}x")
        else:
            print(f"{name:<18}{row[False]:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
