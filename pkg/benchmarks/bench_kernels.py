"""Time the numba and pure-numpy kernel paths side by side.

    python benchmarks/bench_kernels.py [--repeat 5]

Both paths are called directly, so the ``QSVM_LAB_DISABLE_NUMBA`` flag does
not matter here, except that with it set (or numba missing) only the numpy
column is filled.  JIT compilation is excluded by a warm-up call.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from qsvm_lab import _kernels


def _apply_case(n_qubits, rng):
    amps = (rng.normal(size=(2**n_qubits, 1)) + 1j * rng.normal(size=(2**n_qubits, 1)))
    mat = np.array([[0.6, 0.8j], [0.8j, 0.6]])
    args = (mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1], n_qubits // 2, 1, 1)
    return amps, args


def bench_apply(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in (4, 8, 12):
        amps, args = _apply_case(n, rng)
        number = max(1, 20000 >> n)
        row = [f"apply_1q  n={n:<2}"]
        for fn in (_kernels.jit_apply_1q, _kernels.numpy_apply_1q):
            if fn is None:
                row.append(None)
                continue
            fn(amps, *args)
            t = min(timeit.repeat(lambda: fn(amps, *args), number=number, repeat=repeat))
            row.append(t / number)
        rows.append(row)
    return rows


def bench_assign(repeat):
    rng = np.random.default_rng(1)
    rows = []
    for m in (100, 1344, 20000):
        X = rng.normal(size=(m, 4))
        C = rng.normal(size=(2, 4))
        number = max(1, 200000 // m)
        row = [f"assign    m={m:<5}"]
        for fn in (_kernels.jit_assign, _kernels.numpy_assign):
            if fn is None:
                row.append(None)
                continue
            fn(X, C)
            t = min(timeit.repeat(lambda: fn(X, C), number=number, repeat=repeat))
            row.append(t / number)
        rows.append(row)
    return rows


def _fmt(t):
    return "       n/a" if t is None else f"{t * 1e6:10.2f}"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"numba enabled: {_kernels.USE_NUMBA}")
    print(f"{'case':<18}{'numba us':>10}{'numpy us':>10}{'speedup':>9}")
    for name, jit_t, np_t in bench_apply(args.repeat) + bench_assign(args.repeat):
        speed = "" if jit_t is None else f"{np_t / jit_t:8.1f}x"
        print(f"{name:<18}{_fmt(jit_t)}{_fmt(np_t)} {speed}")


if __name__ == "__main__":
    main()
