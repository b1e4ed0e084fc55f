"""Compare the numba kernels with their numpy fallbacks.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 20]

Prints per-kernel best wall time for both paths, the speedup and the
largest absolute difference between the two results.
"""
import argparse
import time

import numpy as np

from setcg import _kernels as K
from setcg.cone import disk_generators
from setcg.subproblem import _scalarized_gradients, min_norm_point


def best_time(fn, repeat):
    fn()  # warm-up (includes JIT compilation on the first call)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    Y = rng.normal(size=(100, 3))
    W = np.abs(rng.normal(size=(3, 3)))
    W /= W.sum(axis=1, keepdims=True)
    J = rng.normal(size=(3, 3, 2))
    _, v = min_norm_point(_scalarized_gradients(J, disk_generators(64)))
    d0 = -v
    yield ("pairwise_poly p=100", lambda: K.pairwise_gerstewitz_poly_numpy(Y, W),
           lambda: K.pairwise_gerstewitz_poly_numba(Y, W))
    yield ("pairwise_soc p=100", lambda: K.pairwise_gerstewitz_soc_numpy(Y),
           lambda: K.pairwise_gerstewitz_soc_numba(Y))
    yield ("soc_prox 5000 it", lambda: K.soc_prox_subgradient_numpy(J, d0, 5000, 0.0, 64.0)[0],
           lambda: K.soc_prox_subgradient_numba(J, d0, 5000, 0.0, 64.0)[0])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if not K._HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max |diff|':>13}")
    for name, f_np, f_nb in cases(rng):
        diff = float(np.max(np.abs(np.asarray(f_np()) - np.asarray(f_nb()))))
        t_np, t_nb = best_time(f_np, args.repeat), best_time(f_nb, args.repeat)
        print(f"{name:<22}{t_np:>12.3e}{t_nb:>12.3e}{t_np / t_nb:>10.1f}{diff:>13.2e}")


if __name__ == "__main__":
    main()
