"""Compare the numba kernels with their pure-numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--pairs N] [--repeat R]

Both paths are called directly, so one process times both regardless of
HILBERT_DYN_DISABLE_NUMBA. The first jit call (compilation) is excluded.
"""

import argparse
import timeit

import numpy as np

from hilbert_dyn import kernels
from hilbert_dyn._accel import HAS_NUMBA
from hilbert_dyn.geometry import sample_interior
from hilbert_dyn.suites import PENTAGON, polygon_body
from hilbert_dyn.config import build_body


def cases(pairs, rng):
    pent = build_body(polygon_body(PENTAGON))
    X, Y = sample_interior(pent, pairs, rng), sample_interior(pent, pairs, rng)
    A, b = pent.raw_normals, pent.raw_offsets
    SX, SY = b[None, :] - X @ A.T, b[None, :] - Y @ A.T
    Q = np.eye(2)
    c = np.zeros(2)
    U = rng.dirichlet(np.ones(8), pairs)
    V = rng.dirichlet(np.ones(8), pairs)
    return {
        "slack_intervals (pentagon)": (kernels.slack_intervals_numpy, kernels.slack_intervals_jit, (SX, SY)),
        "quadric_intervals (disk)": (kernels.quadric_intervals_numpy, kernels.quadric_intervals_jit,
                                     (0.5 * X, 0.5 * Y, c, Q)),
        "simplex_spread (N=8)": (kernels.simplex_spread_numpy, kernels.simplex_spread_jit, (U, V)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAS_NUMBA:
        print("numba is not installed; only the numpy path exists")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':30s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, (f_np, f_jit, a) in cases(args.pairs, rng).items():
        f_jit(*a)  # compile
        r_np, r_jit = f_np(*a), f_jit(*a)
        if not isinstance(r_np, tuple):
            r_np, r_jit = (r_np,), (r_jit,)
        for u, v in zip(r_np, r_jit):
            assert np.allclose(u, v, rtol=1e-12), name
        t_np = min(timeit.repeat(lambda: f_np(*a), number=1, repeat=args.repeat)) * 1e3
        t_jit = min(timeit.repeat(lambda: f_jit(*a), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:30s} {t_np:10.2f} {t_jit:10.2f} {t_np / t_jit:7.1f}x")


if __name__ == "__main__":
    main()
