"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
guard tripped.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .ermakov import export_rows, solve_rho
from .errors import GuardError
from .invariant import InvariantSpec, auto_grid, invariant_eval, wigner_n, xi_pi_of_xp
from .models import ModelPreset, build_model
from .starexp import (evolve_wigner, evolve_wigner_star, fourier_dirichlet_sum, harmonic_symbol,
                      star_exp_closed, star_exp_via_propagator)
from .symbols import PhaseGrid, read_symbol, symbol_norms, write_symbol
from .verify import SUITES, VerifyConfig, displaced_gaussian, run_suites

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3

# keys a config file may set besides model parameters
CONFIG_KEYS = ("hbar", "model", "grid", "format", "threads", "tol")


class UsageError(Exception):
    pass


def g17(v: float) -> str:
    return f"{v:.17g}"


def parse_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    return out


def _number(v: str):
    try:
        return float(v)
    except ValueError:
        return v


def parse_n_range(text: str) -> list[int]:
    """``"3"``, ``"0..3"`` or ``"0,2,5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            ns = list(range(int(lo), int(hi) + 1))
        else:
            ns = [int(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse --n {text!r}") from None
    if not ns or min(ns) < 0:
        raise UsageError("--n must name non-negative integers")
    return ns


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    g = c.add_argument_group("global options")
    g.add_argument("--config", help="flat key=value file; flags override it")
    g.add_argument("--hbar", type=float)
    g.add_argument("--model", choices=["sho", "ck", "tdf"])
    g.add_argument("--param", action="append", default=[], metavar="K=V", help="model parameter override")
    g.add_argument("--gamma0", type=float)
    g.add_argument("--omega0", type=float)
    g.add_argument("--m0", type=float)
    g.add_argument("--grid", type=int, metavar="N", help="grid nodes per axis")
    g.add_argument("--out", help="output file (suffix picks the format unless --format is given)")
    g.add_argument("--format", choices=["csv", "json"])
    g.add_argument("--threads", type=int, help="cap for BLAS/FFT thread pools")
    g.add_argument("--tol", type=float, help="ODE tolerance")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="moyalstar", description="Phase-space quantum mechanics of "
                                 "time-dependent oscillators.")
    sub = ap.add_subparsers(dest="command", required=True)

    w = sub.add_parser("wigner", parents=[common], help="write diagonal Wigner functions")
    w.add_argument("--n", default="0", help="level, range a..b or list a,b,c")
    w.add_argument("--frame", choices=["xi", "x"], default="xi")
    w.add_argument("--time", type=float, default=0.0)

    s = sub.add_parser("starexp", parents=[common], help="star exponential of the oscillator")
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--route", default="closed", help="closed, propagator, dirichlet or a comma list")
    s.add_argument("--nmax", type=int, default=400)
    s.add_argument("--abel-r", type=float, default=0.999)
    s.add_argument("--extent", type=float, help="half-extent of the (xi, pi) grid")
    s.add_argument("--diff", action="store_true", help="print max interior relative difference between routes")

    e = sub.add_parser("evolve", parents=[common], help="evolve a Wigner function in tau")
    e.add_argument("--tau", type=float, required=True)
    e.add_argument("--in", dest="infile", help="input symbol (csv/json); default: displaced Gaussian")
    e.add_argument("--x0", type=float, default=1.0)
    e.add_argument("--p0", type=float, default=0.0)
    e.add_argument("--route", choices=["rotation", "star"], default="rotation")

    t = sub.add_parser("tau", parents=[common], help="nonlinear time tau(t)")
    t.add_argument("--t", type=float, required=True)
    t.add_argument("--t0", type=float, default=0.0)
    t.add_argument("--samples", type=int, default=101, help="rows in the CSV export")

    i = sub.add_parser("invariant", parents=[common], help="Lewis-Riesenfeld invariant at a point")
    i.add_argument("--x", type=float, required=True)
    i.add_argument("--p", type=float, required=True)
    i.add_argument("--t", type=float, default=0.0)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", action="append", default=[], help=f"one of {', '.join(SUITES)} (repeatable)")
    v.add_argument("--inject-hbar-mismatch", type=float, default=0.0, metavar="DELTA",
                   help="hand the engine hbar*(1+DELTA) while references keep hbar")
    return ap


class Settings:
    """Flags merged over the config file over defaults."""

    def __init__(self, args: argparse.Namespace):
        cfg = parse_config(args.config) if args.config else {}
        params = {k: v for k, v in cfg.items() if k not in CONFIG_KEYS}

        def pick(name, default, conv=lambda x: x):
            val = getattr(args, name, None)
            if val is not None:
                return val
            if name in cfg:
                try:
                    return conv(cfg[name])
                except ValueError:
                    raise UsageError(f"config value {name} = {cfg[name]!r} is invalid") from None
            return default

        self.hbar = pick("hbar", 1.0, float)
        self.model_id = pick("model", "sho")
        self.grid = pick("grid", None, int)
        self.format = pick("format", None)
        self.threads = pick("threads", None, int)
        self.tol = pick("tol", 1e-11, float)
        for kv in args.param:
            if "=" not in kv:
                raise UsageError(f"--param expects key=value, got {kv!r}")
            k, v = kv.split("=", 1)
            params[k.strip()] = v.strip()
        for k in ("gamma0", "omega0", "m0"):
            if getattr(args, k, None) is not None:
                params[k] = getattr(args, k)
        if not self.hbar > 0:
            raise UsageError("--hbar must be positive")
        if self.grid is not None and (self.grid < 8 or self.grid & (self.grid - 1)):
            raise UsageError("--grid must be a power of two >= 8")
        try:
            self.preset = ModelPreset(self.model_id, {k: v if k == "profile" else _number(v)
                                                      for k, v in params.items()})
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def model(self):
        try:
            return build_model(self.preset)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def out_path(self, out: str | None, stem: str, tag: str | None = None) -> Path:
        fmt = self.format
        if out:
            p = Path(out)
            fmt = fmt or (p.suffix.lstrip(".") or "csv")
            base = p.with_suffix("")
        else:
            fmt = fmt or "csv"
            base = Path(stem)
        if fmt not in ("csv", "json"):
            raise UsageError(f"unknown output format {fmt!r}")
        name = f"{base.name}_{tag}" if tag else base.name
        return base.with_name(name).with_suffix("." + fmt)


def _negativity(values: np.ndarray) -> tuple[float, float]:
    v = values.real
    total = np.abs(v).sum()
    return float(v.min()), float(-v[v < 0].sum() / total) if total > 0 else 0.0


def cmd_wigner(args, st: Settings) -> int:
    ns = parse_n_range(args.n)
    for n in ns:
        if args.frame == "xi":
            grid = auto_grid(n, st.hbar, _omega_cap(st), st.grid)
            W = wigner_n(n, grid, st.hbar, _omega_cap(st))
        else:
            model = st.model()
            t = args.time
            sol = solve_rho(model, min(0.0, t), max(t, 0.0) + 1.0, st.tol)
            spec = InvariantSpec(model, sol, st.hbar)
            base = auto_grid(n, st.hbar, model.omega_cap, st.grid)
            r, rd, m = float(sol.rho(t)), float(sol.rhodot(t)), float(model.mass(t))
            x_max = base.x_max * r
            p_max = (base.p_max + m * x_max * abs(rd)) / r
            grid = PhaseGrid(base.n_x, base.n_p, x_max, p_max)
            W = wigner_n(n, grid, frame="x_p", spec=spec, t=t)
        path = st.out_path(args.out, "wigner", f"n{n}" if len(ns) > 1 or not args.out else None)
        write_symbol(W, path)
        _, _, integral = symbol_norms(W)
        vmin, neg = _negativity(W.values)
        print(f"n={n} file={path} integral={g17(integral.real)} min={g17(vmin)} negative_fraction={g17(neg)}")
    return EXIT_OK


def _omega_cap(st: Settings) -> float:
    return st.model().omega_cap


def cmd_starexp(args, st: Settings) -> int:
    routes = [r.strip() for r in args.route.split(",") if r.strip()]
    bad = [r for r in routes if r not in ("closed", "propagator", "dirichlet")]
    if bad or not routes:
        raise UsageError(f"unknown route(s) {bad}")
    omega = _omega_cap(st)
    n = st.grid or 64
    ext = args.extent or 6.0 * math.sqrt(st.hbar / omega)
    grid = PhaseGrid(n, n, ext, ext * omega)
    results = {}
    for r in routes:
        if r == "closed":
            results[r] = star_exp_closed(harmonic_symbol(grid, omega), args.tau, st.hbar, omega)
        elif r == "propagator":
            results[r] = star_exp_via_propagator(grid, args.tau, st.hbar, omega)
        else:
            results[r] = fourier_dirichlet_sum(grid, args.tau, args.nmax, args.abel_r, st.hbar, omega)
    for r, sym in results.items():
        path = st.out_path(args.out, "starexp", r if len(routes) > 1 or not args.out else None)
        write_symbol(sym, path)
        print(f"route={r} file={path}")
    if args.diff:
        if len(routes) < 2:
            raise UsageError("--diff needs at least two routes")
        ref = results[routes[0]].values
        mask = grid.interior(0.5)
        for r in routes[1:]:
            d = np.abs(results[r].values - ref)[mask].max() / np.abs(ref[mask]).max()
            print(f"max_rel_diff {routes[0]} {r} {g17(d)}")
    return EXIT_OK


def cmd_evolve(args, st: Settings) -> int:
    omega = _omega_cap(st)
    if args.infile:
        W0 = read_symbol(args.infile)
    else:
        n = st.grid or 128
        ext = 8.0 * math.sqrt(st.hbar)
        W0 = displaced_gaussian(PhaseGrid(n, n, ext / math.sqrt(omega), ext * math.sqrt(omega)),
                                args.x0, args.p0, st.hbar, omega)
    if args.route == "rotation":
        W = evolve_wigner(W0, args.tau, omega)
    else:
        W = evolve_wigner_star(W0, args.tau, st.hbar, omega)
    default = Path(args.infile).stem + "_evolved" if args.infile else "evolved"
    if args.infile and not args.out and not st.format:
        st.format = Path(args.infile).suffix.lstrip(".")
    path = st.out_path(args.out, default)
    write_symbol(W, path)
    _, _, i0 = symbol_norms(W0)
    _, _, i1 = symbol_norms(W)
    print(f"file={path} integral_before={g17(i0.real)} integral_after={g17(i1.real)}")
    return EXIT_OK


def cmd_tau(args, st: Settings) -> int:
    model = st.model()
    if args.t <= args.t0:
        raise UsageError("--t must exceed --t0")
    sol = solve_rho(model, args.t0, args.t, st.tol)
    print(g17(sol.tau(args.t)))
    if args.out:
        path = st.out_path(args.out, "tau")
        rows = export_rows(sol, np.linspace(args.t0, args.t, args.samples))
        if path.suffix == ".json":
            path.write_text(json.dumps({"columns": ["t", "rho", "rhodot", "tau"], "rows": rows}))
        else:
            with open(path, "w") as fh:
                fh.write("t,rho,rhodot,tau\n")
                for r in rows:
                    fh.write(",".join(g17(v) for v in r) + "\n")
    return EXIT_OK


def cmd_invariant(args, st: Settings) -> int:
    model = st.model()
    t = args.t
    sol = solve_rho(model, min(0.0, t), max(t, 0.0) + 1.0, st.tol)
    spec = InvariantSpec(model, sol, st.hbar)
    xi, pi = xi_pi_of_xp(spec, args.x, args.p, t)
    inv = invariant_eval(spec, args.x, args.p, t)
    print(f"xi={g17(xi)} pi={g17(pi)} I={g17(inv)}")
    return EXIT_OK


def cmd_verify(args, st: Settings) -> int:
    names = []
    for s in args.suite:
        names.extend(x.strip() for x in s.split(",") if x.strip())
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITES)}")
    engine = st.hbar * (1 + args.inject_hbar_mismatch) if args.inject_hbar_mismatch else None
    cfg = VerifyConfig(hbar=st.hbar, model=st.preset, engine_hbar=engine, tol=st.tol)
    report = run_suites(cfg, names or None)
    for r in report["rows"]:
        print(f"{'PASS' if r['pass'] else 'FAIL'} {r['suite']} {r['metric']} "
              f"value={g17(r['value'])} tol={g17(r['tolerance'])}")
    path = Path(args.out) if args.out else Path("verify_report.json")
    path.write_text(json.dumps(report, indent=1) + "\n")
    print(f"report={path} pass={report['pass']}")
    return EXIT_OK if report["pass"] else EXIT_VERIFY


COMMANDS = {"wigner": cmd_wigner, "starexp": cmd_starexp, "evolve": cmd_evolve,
            "tau": cmd_tau, "invariant": cmd_invariant, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        st = Settings(args)
        with threadpool_limits(limits=st.threads):
            return COMMANDS[args.command](args, st)
    except (UsageError, ValueError) as exc:
        print(f"moyalstar {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardError as exc:
        print(f"moyalstar {args.command}: guard '{exc.guard}' tripped: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
