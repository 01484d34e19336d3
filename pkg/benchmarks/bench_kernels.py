"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from orbitcx import _kernels
from orbitcx.groups import _LATTICE_CACHE, enumerate_subgroups, qd


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=200)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    A = rng.integers(0, 3, size=(args.size, args.size))
    G = qd(3)
    gens = np.array([G.index[g] for g in G.generators[:2]])

    cases = {
        f"rref_mod_p {args.size}x{args.size} over Z/3": lambda: _kernels.rref_mod_p(A, 3),
        "closure_mask in Qd(3)": lambda: _kernels.closure_mask(G.mul, gens),
        "subgroup lattice of Qd(3)": lambda: (_LATTICE_CACHE.clear(), enumerate_subgroups(G)),
    }
    backends = ["numpy"] + (["numba"] if _kernels.NUMBA_AVAILABLE else [])
    print(f"{'case':40s}" + "".join(f"{b:>12s}" for b in backends))
    for name, fn in cases.items():
        row = []
        for b in backends:
            with _kernels.use_backend(b):
                fn()  # warm up / compile
                row.append(best_of(fn, args.repeat))
        print(f"{name:40s}" + "".join(f"{t * 1e3:10.2f}ms" for t in row))
    with _kernels.use_backend("numpy"):
        R0, p0 = _kernels.rref_mod_p(A, 3)
    if _kernels.NUMBA_AVAILABLE:
        with _kernels.use_backend("numba"):
            R1, p1 = _kernels.rref_mod_p(A, 3)
        print("backends agree:", bool(np.array_equal(R0, R1) and np.array_equal(p0, p1)))


if __name__ == "__main__":
    main()
