"""Time the compiled kernels against the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat R]``. Prints one
line per kernel with the best-of-R time for each backend, the speed-up and
the maximum difference between the two results.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from cornerscatter._kernels import _pykernels

try:
    from cornerscatter._kernels import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


def _cases():
    lams = np.linspace(-0.4, 12.3, 400)
    square = np.array([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])
    th = np.linspace(0, 1.5 * np.pi, 200)
    sector = np.vstack([[0, 0], np.stack([0.5 * np.cos(th), 0.5 * np.sin(th)], 1)])
    edges = np.linspace(-0.6, 0.6, 257)
    return {
        "legendre_p_many (400 degrees, m=2)": lambda mod: mod.legendre_p_many(lams, 2, -0.3),
        "legendre_p_dt_many (400 degrees, m=1)": lambda mod: mod.legendre_p_dt_many(lams, 1, 0.7),
        "polygon_fractions (square, 256^2)": lambda mod: mod.polygon_fractions(
            square[:, 0], square[:, 1], edges),
        "polygon_fractions (sector, 201 vertices, 256^2)": lambda mod: mod.polygon_fractions(
            sector[:, 0], sector[:, 1], edges),
        "disk_fractions (256^2)": lambda mod: mod.disk_fractions(0.05, -0.02, 0.5, edges),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; nothing to compare")
        return 1
    print(f"{'kernel':50s} {'python [s]':>11s} {'compiled [s]':>13s} {'speed-up':>9s} {'max diff':>10s}")
    for name, fn in _cases().items():
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(np.asarray(fn(_pykernels)) - np.asarray(fn(_ckernels)))))
        print(f"{name:50s} {tp:11.4f} {tc:13.4f} {tp / tc:9.1f} {diff:10.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
