"""Time the numba and numpy eigensolver kernels side by side.

    python benchmarks/bench_kernels.py [--repeat 3]

Chain cases are the tridiagonal blocks of the truncated Hamiltonian at the
default couplings; dense cases are random symmetric matrices.
"""

import argparse
import time

import numpy as np

from rabi2 import kernels
from rabi2.eigen import eigh_dense, eigh_tridiagonal
from rabi2.series import ModelParams
from rabi2.spectrum import build_hamiltonian

CHAIN_CUTOFFS = (200, 600, 1200)
DENSE_SIZES = (100, 300)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    params = ModelParams("1/10", 1, "7/10")

    # compile once so the timings below exclude JIT
    eigh_tridiagonal(np.arange(4.0), np.ones(3), backend=backends[-1])
    eigh_dense(np.eye(4) + 0.1, backend=backends[-1])

    print(f"{'case':<28}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for n_max in CHAIN_CUTOFFS:
        chains = build_hamiltonian(params, n_max).chains()
        row = [best_of(lambda b=b: [eigh_tridiagonal(c.diagonal, c.offdiagonal, backend=b)
                                    for c in chains], args.repeat) for b in backends]
        _print(f"chains n_max={n_max}", row)
    rng = np.random.default_rng(0)
    for n in DENSE_SIZES:
        a = rng.normal(size=(n, n))
        a = a + a.T
        row = [best_of(lambda b=b: eigh_dense(a, backend=b), args.repeat) for b in backends]
        _print(f"dense n={n}", row)


def _print(label, row):
    speed = f"{row[0] / row[-1]:>9.1f}x" if len(row) > 1 else ""
    print(f"{label:<28}" + "".join(f"{t:>11.4f}s" for t in row) + speed)


if __name__ == "__main__":
    main()
