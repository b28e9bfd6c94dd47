"""Compiled vs numpy kernel loops, plus one end-to-end transmission solve.

    python3 benchmarks/bench_kernels.py [--sizes 128,256,512] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from lametrans import _core
from lametrans.acceptance import SHEAR
from lametrans.freespace import solve_transmission
from lametrans.geometry import BoundaryGrid, make_curve
from lametrans.material import ContrastPair


def _grid(n):
    g = BoundaryGrid(make_curve("kite"), n)
    return g.points, g.normals, g.weights


def _cases(n):
    x, nrm, w = _grid(n)
    far = 3.0 * x + [6.0, 0.0]
    wphi = np.stack([np.cos(np.arange(n)), np.sin(np.arange(n))], 1) * w[:, None]
    return {
        "single_layer_matrix": lambda: _core.single_layer_matrix(0.5, 0.5, far, x, w),
        "traction_matrix": lambda: _core.traction_matrix(0.5, 0.5, far, nrm, x, w),
        "double_layer_matrix": lambda: _core.double_layer_matrix(0.5, 0.5, far, x, nrm, w),
        "single_layer_apply+grad": lambda: _core.single_layer_apply(0.5, 0.5, far, x, wphi, True),
        "transmission solve": lambda: solve_transmission(
            ContrastPair.make(0.5, 0.5, 1.0, 100.0), [BoundaryGrid(make_curve("kite"), n)], SHEAR
        ),
    }


def best(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="128,256,512")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    start = _core.BACKEND
    print(f"{'kernel':<26}{'N':>6}{'cython [ms]':>14}{'python [ms]':>14}{'speedup':>10}")
    try:
        for n in sizes:
            for name in _cases(n):
                times = {}
                for backend in ("cython", "python"):
                    _core.use_backend(backend)
                    times[backend] = best(_cases(n)[name], args.repeat)
                c, p = times["cython"], times["python"]
                print(f"{name:<26}{n:>6}{1e3 * c:>14.2f}{1e3 * p:>14.2f}{p / c:>10.1f}")
    finally:
        _core.use_backend(start)


if __name__ == "__main__":
    main()
