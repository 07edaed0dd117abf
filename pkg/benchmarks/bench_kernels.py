"""Time the compiled kernels against the numpy/pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from qcomm import _kernels_py

try:
    from qcomm import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    n = 4096
    vals = rng.integers(0, n, size=2200)
    bits = _kernels_py.pack_fixed(vals, 12)
    f_a, f_b = rng.integers(0, n, size=n), rng.integers(0, n, size=n)
    # S_6 tree with n = 4: 4^6 paths
    arity, k = 4, 6
    levels = [rng.integers(0, arity, size=arity ** i) for i in range(k)]
    ptrs = np.concatenate(levels).astype(np.int64)
    offsets = np.concatenate([[0], np.cumsum([lv.size for lv in levels])]).astype(np.int64)
    arities = np.full(k, arity, dtype=np.int64)
    owners = np.array([(k - i) % 2 for i in range(k)], dtype=np.int64)
    leaves = rng.integers(0, 2, size=arity ** k).astype(np.uint8)
    return {
        "pack_fixed (2200 x 12 bits)": lambda m: m.pack_fixed(vals, 12),
        "unpack_fixed (2200 x 12 bits)": lambda m: m.unpack_fixed(bits, 12),
        "pointer_walk (n=4096, 2000 steps)": lambda m: m.pointer_walk(f_a, f_b, 0, 2000),
        "disj_membership (4^6 paths)": lambda m: m.disj_membership(ptrs, offsets, arities, owners, leaves),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=200)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} {'python us':>12s} {'cython us':>12s} {'speedup':>8s}")
    for name, fn in cases(rng).items():
        py = min(timeit.repeat(lambda: fn(_kernels_py), number=args.number, repeat=args.repeat))
        py_us = py / args.number * 1e6
        if _kernels is None:
            print(f"{name:36s} {py_us:12.2f} {'n/a':>12s} {'':>8s}")
            continue
        cy = min(timeit.repeat(lambda: fn(_kernels), number=args.number, repeat=args.repeat))
        cy_us = cy / args.number * 1e6
        print(f"{name:36s} {py_us:12.2f} {cy_us:12.2f} {py_us / cy_us:8.1f}x")


if __name__ == "__main__":
    main()
