"""Frequency quench omega1 -> omega2: auxiliary solution, nonlinear time and a pulled-back W_0.

Usage: python scripts/tdf_quench.py [--omega1 1] [--omega2 2] [--t-on 2] [--duration 3] [--t1 12] [--out w0.json]
"""

import argparse

import numpy as np

from moyalstar import InvariantSpec, PhaseGrid, build_model, solve_rho, symbol_norms, wigner_n, write_symbol


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omega1", type=float, default=1.0)
    ap.add_argument("--omega2", type=float, default=2.0)
    ap.add_argument("--t-on", type=float, default=2.0)
    ap.add_argument("--duration", type=float, default=3.0)
    ap.add_argument("--t1", type=float, default=12.0)
    ap.add_argument("--tol", type=float, default=1e-11)
    ap.add_argument("--out", help="write W_0 in the (x, p) frame at t1")
    args = ap.parse_args()

    model = build_model("tdf", profile="quench", omega1=args.omega1, omega2=args.omega2,
                        t_on=args.t_on, duration=args.duration)
    pinney = solve_rho(model, 0.0, args.t1, args.tol, method="pinney")
    direct = solve_rho(model, 0.0, args.t1, args.tol, method="direct")
    ts = np.linspace(0.0, args.t1, 13)
    print(f"residual_sup: pinney {pinney.residual_sup:.2e}, direct {direct.residual_sup:.2e}")
    print(f"max |rho_pinney - rho_direct| = {np.abs(pinney.rho(ts) - direct.rho(ts)).max():.2e}")
    print(f"{'t':>6} {'omega':>8} {'rho':>14} {'rhodot':>14} {'tau':>14}")
    for t, r, rd, s in zip(ts, pinney.rho(ts), pinney.rhodot(ts), pinney.tau(ts)):
        print(f"{t:6.2f} {float(model.omega(t)):8.4f} {r:14.10f} {rd:14.10f} {s:14.10f}")
    # after the ramp rho oscillates about omega2^(-1/2)
    late = np.linspace(args.t_on + args.duration, args.t1, 400)
    print(f"post-ramp rho range [{pinney.rho(late).min():.6f}, {pinney.rho(late).max():.6f}], "
          f"omega2^(-1/2) = {args.omega2 ** -0.5:.6f}")

    spec = InvariantSpec(model, pinney)
    r, rd = float(pinney.rho(args.t1)), float(pinney.rhodot(args.t1))
    x_max = 9.0 * r
    grid = PhaseGrid(128, 128, x_max, (9.0 + x_max * abs(rd)) / r)
    W = wigner_n(0, grid, frame="x_p", spec=spec, t=args.t1)
    _, _, integral = symbol_norms(W)
    print(f"W_0 at t1 in (x, p): integral = {integral.real:.12f}")
    if args.out:
        write_symbol(W, args.out)


if __name__ == "__main__":
    main()
