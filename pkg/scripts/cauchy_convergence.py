"""Grid refinement study for the solid Cauchy transform of the constant source.

For ``G = 1`` the exact particular solution is ``conj(z)``.  Prints the max
error over fixed test points for each method and grid, and the error ratio
between successive grids.

    python3 scripts/cauchy_convergence.py --levels 32x128 64x256 128x512
"""
from __future__ import annotations

import argparse

import numpy as np

from corona_lab.cauchy import cauchy_transform
from corona_lab.wirtinger import DiskGrid, GridFn, random_disk_points

METHODS = {"cell": {"method": "cell"}, "midpoint": {"method": "midpoint"},
           "midpoint+subdivide": {"method": "midpoint", "subdivide": True}}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", nargs="+", default=["32x128", "64x256", "128x512"])
    ap.add_argument("--rmax", type=float, default=0.995)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    z = random_disk_points(np.random.default_rng(args.seed), args.points, 0.9)
    print(f"{'method':<20} {'grid':>9} {'max error':>11} {'ratio':>7}")
    for name, kw in METHODS.items():
        prev = None
        for level in args.levels:
            n_r, n_theta = map(int, level.split("x"))
            g = DiskGrid(n_r, n_theta, args.rmax)
            T = cauchy_transform(GridFn(g, np.ones((n_r, n_theta), dtype=complex)), **kw)
            err = float(np.max(np.abs(T(z) - np.conj(z))))
            ratio = f"{prev / err:7.2f}" if prev and err > 0 else "      -"
            print(f"{name:<20} {level:>9} {err:11.3e} {ratio}")
            prev = err


if __name__ == "__main__":
    main()
