"""Grid refinement study for the end-to-end disk solver.

Generates a seeded problem, assembles the holomorphic solution on successive
grids and prints the Bezout residuals, the holomorphy proxy
``sup |dbar H_j| (1 - |z|)`` and the sup norms.

    python3 scripts/disk_refinement.py --n 2 --delta 0.3 --degree 4 --seed 7
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from corona_lab.corona_disk import (
    assemble_holomorphic,
    away_from_cell_edges,
    build_smooth_solution,
    holo_bezout_residuals,
    solution_holomorphy_proxy,
)
from corona_lab.problems import gen_random_problem
from corona_lab.wirtinger import DiskGrid, random_disk_points


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--delta", type=float, default=0.3)
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--levels", nargs="+", default=["32x128", "64x256", "128x512"])
    ap.add_argument("--rmax", type=float, default=0.995)
    args = ap.parse_args()
    p = gen_random_problem(args.n, args.delta, args.degree, args.seed)
    grids = [DiskGrid(*map(int, lv.split("x")), args.rmax) for lv in args.levels]
    z = random_disk_points(np.random.default_rng(0), 200, 0.95)
    zp = z[away_from_cell_edges(z, grids, 1e-4)][:50]
    print(f"{'grid':>9} {'bezout':>9} {'proxy':>10} {'ratio':>6} {'sup H,K':>8} {'time':>7}")
    prev = None
    for lv, g in zip(args.levels, grids):
        t0 = time.perf_counter()
        sol = assemble_holomorphic(build_smooth_solution(p, g), g, wolff=False)
        dt = time.perf_counter() - t0
        res = max(holo_bezout_residuals(sol, z))
        proxy = max(max(a) for a in solution_holomorphy_proxy(sol, zp))
        d = sol.diagnostics
        sup = max(d.sup_H + d.sup_K)
        ratio = f"{prev / proxy:6.2f}" if prev else "     -"
        print(f"{lv:>9} {res:9.1e} {proxy:10.3e} {ratio} {sup:8.3f} {dt:6.1f}s")
        prev = proxy


if __name__ == "__main__":
    main()
