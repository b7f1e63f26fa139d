"""Caldirola-Kanai oscillator: numerical rho, tau, invariant and phases against the closed forms.

Usage: python scripts/caldirola_kanai.py [--gamma0 0.6] [--omega0 1] [--m0 1] [--t1 10] [--csv out.csv]
"""

import argparse
import csv

import numpy as np

from moyalstar import InvariantSpec, build_model, classical_trajectory, invariant_eval, phase_function, solve_rho


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gamma0", type=float, default=0.6)
    ap.add_argument("--omega0", type=float, default=1.0)
    ap.add_argument("--m0", type=float, default=1.0)
    ap.add_argument("--t1", type=float, default=10.0)
    ap.add_argument("--tol", type=float, default=1e-11)
    ap.add_argument("--csv", help="write t, rho, rho_closed, tau, tau_closed")
    args = ap.parse_args()

    model = build_model("ck", gamma0=args.gamma0, omega0=args.omega0, m0=args.m0)
    cf = model.closed_forms
    sol = solve_rho(model, 0.0, args.t1, args.tol)
    ts = np.linspace(0.0, args.t1, 11)
    rho, tau = sol.rho(ts), sol.tau(ts)
    print(f"Omega0 = {cf['omega0_cap']:.12f}   residual_sup = {sol.residual_sup:.3e}")
    print(f"{'t':>6} {'rho':>16} {'rho err':>10} {'tau':>16} {'tau err':>10}")
    for t, r, s in zip(ts, rho, tau):
        print(f"{t:6.2f} {r:16.12f} {abs(r - cf['rho'](t)):10.2e} {s:16.12f} {abs(s - cf['tau'](t)):10.2e}")

    spec = InvariantSpec(model, sol)
    tr = classical_trajectory(model, 1.0, 0.0, 0.0, args.t1, args.tol)
    fine = np.linspace(0.0, args.t1, 201)
    inv = invariant_eval(spec, tr.x(fine), tr.p(fine), fine)
    print(f"invariant drift along x0 = 1 trajectory: {np.abs(inv - inv[0]).max() / inv[0]:.2e}")
    for n in range(4):
        ph = phase_function(sol, n, fine)
        ref = np.exp(-1j * cf["omega0_cap"] * fine * (n + 0.5))
        print(f"phase n={n}: max |arg error| = {np.abs(np.angle(ph / ref)).max():.2e}")

    if args.csv:
        fine_tau = sol.tau(fine)
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "rho", "rho_closed", "tau", "tau_closed"])
            for t, r, s in zip(fine, sol.rho(fine), fine_tau):
                w.writerow([repr(float(v)) for v in (t, r, cf["rho"](t), s, cf["tau"](t))])


if __name__ == "__main__":
    main()
