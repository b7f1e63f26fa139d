"""Convergence of the Abel-regularized Fourier-Dirichlet sum towards the closed-form star exponential.

Prints the interior relative error against n_max for several Abel radii.
Usage: python scripts/dirichlet_convergence.py [--theta 1.5707963] [--extent 6] [--grid 64]
"""

import argparse
import math

import numpy as np

from moyalstar import PhaseGrid, fourier_dirichlet_sum, harmonic_symbol, star_exp_closed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--theta", type=float, default=math.pi / 2, help="Omega tau")
    ap.add_argument("--extent", type=float, default=6.0)
    ap.add_argument("--grid", type=int, default=64)
    args = ap.parse_args()

    grid = PhaseGrid.square(args.grid, args.extent)
    ref = star_exp_closed(harmonic_symbol(grid), args.theta).values
    mask = grid.interior(0.5)
    n_maxes = (50, 100, 200, 300, 400, 500)
    radii = (0.9, 0.99, 0.995, 0.999)
    print("interior max relative error |sum - closed| / |closed|")
    print(f"{'n_max':>6} " + " ".join(f"{'r=' + str(r):>11}" for r in radii))
    for n in n_maxes:
        errs = []
        for r in radii:
            f = fourier_dirichlet_sum(grid, args.theta, n, r).values
            errs.append(float((np.abs(f - ref) / np.abs(ref))[mask].max()))
        print(f"{n:6d} " + " ".join(f"{e:11.3e}" for e in errs))
    print("remainder scale r^(n_max+1) at n_max = 500: "
          + ", ".join(f"r={r}: {r ** 501:.2e}" for r in radii))


if __name__ == "__main__":
    main()
