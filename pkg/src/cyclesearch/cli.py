"""Command-line driver: sweeps, single solves, certificate checks, gallery.

Exit codes: 0 on success, 1 on usage errors, 2 when a sweep ends with more
inconclusive cells than the failure threshold allows (or a certificate
fails verification).
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import (
    DecisionThresholds,
    certificate_to_dict,
    load_certificate,
    run_cycle_search,
    verify_certificate,
)
from .builder import build_cycle_problem, lower_to_conic
from .heatmap import emit_heatmap
from .methods import (
    FunctionOracle,
    TrajectoryState,
    check_cycle_prefix,
    gallery_f_rho,
    heavy_ball,
    simulate,
)
from .sdpa import save_program, write_sdpa
from .solver import SolverOptions
from .sweep import (
    AxisSpec,
    SweepConfig,
    build_method,
    emit_csv,
    failure_fraction,
    run_sweep,
)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _axis_arg(text: str, name: str) -> AxisSpec:
    try:
        lo, hi, count = text.split(":")
        return AxisSpec(name, float(lo), float(hi), int(count))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI:COUNT, got {text!r}") from exc


def _add_common_method_args(p: argparse.ArgumentParser):
    p.add_argument("--method", required=True, choices=["hb", "nag", "igd", "tos"])
    p.add_argument("--L", type=float, default=1.0, help="smoothness constant")
    p.add_argument("--mu", type=float, default=0.0, help="strong convexity constant")
    p.add_argument("--beta-c", type=float, default=1.0, help="cocoercivity of B (tos)")
    p.add_argument("--alpha", type=float, default=None,
                   help="resolvent scale for tos (default: tied to gamma)")


def _add_tol_args(p: argparse.ArgumentParser):
    p.add_argument("--tol-feas", type=float, default=1e-8)
    p.add_argument("--tol-gap", type=float, default=1e-8)
    p.add_argument("--tol-cycle", type=float, default=1e-6)
    p.add_argument("--tol-separate", type=float, default=1e-4)
    p.add_argument("--tol-verify", type=float, default=1e-5)


def _thresholds(args) -> DecisionThresholds:
    return DecisionThresholds(
        delta_cycle=args.tol_cycle,
        delta_separate=args.tol_separate,
        verify_tol=args.tol_verify,
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="cyclesearch", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cyclesearch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("sweep", parents=[], help="grid sweep over method parameters")
    _add_common_method_args(ps)
    _add_tol_args(ps)
    ps.add_argument("--eps", type=float, default=None,
                    help="pin the error-bound axis of igd to one value")
    ps.add_argument("--kmin", type=int, default=2)
    ps.add_argument("--kmax", type=int, default=25)
    ps.add_argument("--grid", default="50x50", help="grid resolution N1xN2")
    ps.add_argument("--axis1", type=str, default=None, metavar="LO:HI:COUNT")
    ps.add_argument("--axis2", type=str, default=None, metavar="LO:HI:COUNT")
    ps.add_argument("--out", default=".", help="output directory")
    ps.add_argument("--jobs", type=int, default=1)
    ps.add_argument("--resume", action="store_true")
    ps.add_argument("--no-region-filter", action="store_true")
    ps.add_argument("--chunk", type=int, default=16)
    ps.add_argument("--max-failure-fraction", type=float, default=0.05)
    ps.add_argument("--config", default=None, help="load defaults from a config file")
    ps.add_argument("--print-config", action="store_true",
                    help="print the effective config and exit")

    p1 = sub.add_parser("solve-one", help="one (method, K) cycle search")
    _add_common_method_args(p1)
    _add_tol_args(p1)
    p1.add_argument("--gamma", type=float, required=True)
    p1.add_argument("--beta", type=float, default=0.0)
    p1.add_argument("--eps", type=float, default=0.0)
    p1.add_argument("--K", type=int, required=True)
    p1.add_argument("--out", default=None, help="write the certificate JSON here")
    p1.add_argument("--dump-sdpa", default=None, help="write the conic program (.dat-s)")
    p1.add_argument("--dump-program", default=None, help="write the conic program (JSON)")
    p1.add_argument("--log", action="store_true", help="stream solver iterations")

    pv = sub.add_parser("verify-certificate", help="re-verify a certificate document")
    pv.add_argument("path")
    pv.add_argument("--tol", type=float, default=1e-5)

    pg = sub.add_parser("gallery", help="trajectories of the piecewise-cubic family")
    pg.add_argument("--rho", type=float, required=True)
    pg.add_argument("--x0", type=float, default=0.3)
    pg.add_argument("--steps", type=int, default=500)
    pg.add_argument("--csv", default=None, help="write the trajectory as CSV")

    return parser


def _sweep_config_text(cfg: SweepConfig) -> str:
    ax1, ax2 = cfg.axes()
    cp = configparser.ConfigParser()
    cp["sweep"] = {
        "method": cfg.method,
        "L": repr(cfg.L),
        "mu": repr(cfg.mu),
        "beta_c": repr(cfg.beta_c),
        "alpha": "gamma" if cfg.alpha is None else repr(cfg.alpha),
        "axis1": f"{ax1.name}:{ax1.lo!r}:{ax1.hi!r}:{ax1.count}",
        "axis2": f"{ax2.name}:{ax2.lo!r}:{ax2.hi!r}:{ax2.count}",
        "k_min": str(cfg.k_min),
        "k_max": str(cfg.k_max),
        "delta_cycle": repr(cfg.thresholds.delta_cycle),
        "delta_separate": repr(cfg.thresholds.delta_separate),
        "verify_tol": repr(cfg.thresholds.verify_tol),
        "region_filter": str(cfg.region_filter),
        "jobs": str(cfg.jobs),
        "chunk": str(cfg.chunk),
    }
    from io import StringIO

    buf = StringIO()
    cp.write(buf)
    return buf.getvalue()


def _apply_config_file(args, path):
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise FileNotFoundError(path)
    sec = cp["sweep"]
    for key, cast in [
        ("L", float), ("mu", float), ("beta_c", float),
        ("kmin", int), ("kmax", int), ("jobs", int), ("chunk", int),
        ("grid", str), ("method", str),
    ]:
        name = {"kmin": "k_min", "kmax": "k_max"}.get(key, key)
        if sec.get(name) is not None or sec.get(key) is not None:
            raw = sec.get(name, sec.get(key))
            setattr(args, key, cast(raw))


def _cmd_sweep(args) -> int:
    if args.config:
        _apply_config_file(args, args.config)
    try:
        n1, n2 = (int(t) for t in str(args.grid).lower().split("x"))
    except ValueError:
        print(f"cyclesearch: error: bad --grid {args.grid!r}", file=sys.stderr)
        return 1
    cfg = SweepConfig(
        method=args.method,
        L=args.L,
        mu=args.mu,
        beta_c=args.beta_c,
        alpha=args.alpha,
        k_min=args.kmin,
        k_max=args.kmax,
        grid=max(n1, n2),
        thresholds=_thresholds(args),
        out_dir=args.out,
        jobs=args.jobs,
        resume=args.resume,
        region_filter=not args.no_region_filter,
        chunk=args.chunk,
        max_failure_fraction=args.max_failure_fraction,
    )
    ax1, ax2 = cfg.axes()
    cfg.axis1 = AxisSpec(ax1.name, ax1.lo, ax1.hi, n1) if args.axis1 is None else _axis_arg(args.axis1, ax1.name)
    cfg.axis2 = AxisSpec(ax2.name, ax2.lo, ax2.hi, n2) if args.axis2 is None else _axis_arg(args.axis2, ax2.name)
    if args.method == "igd" and args.eps is not None:
        cfg.axis2 = AxisSpec("eps", args.eps, args.eps, 1)

    if args.print_config:
        sys.stdout.write(_sweep_config_text(cfg))
        return 0

    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, f"sweep-{args.method}")
    csv_path = base + ".csv"
    svg_path = base + ".svg"
    with open(base + ".config", "w", encoding="ascii") as fh:
        fh.write(_sweep_config_text(cfg))

    def progress(done, total, cell):
        if done % 25 == 0 or done == total:
            print(f"[{done}/{total}] {cell.param1:.4g},{cell.param2:.4g} -> {cell.status}",
                  flush=True)

    region = run_sweep(cfg, csv_path=csv_path, progress=progress)
    emit_csv(region, csv_path)
    emit_heatmap(region, svg_path)
    frac = failure_fraction(region)
    print(f"wrote {csv_path} and {svg_path}; inconclusive fraction {frac:.3f}")
    return 2 if frac > cfg.max_failure_fraction else 0


def _cmd_solve_one(args) -> int:
    cfg = SweepConfig(
        method=args.method, L=args.L, mu=args.mu, beta_c=args.beta_c, alpha=args.alpha
    )
    p2 = {"hb": args.beta, "nag": args.beta, "igd": args.eps, "tos": args.beta}[args.method]
    built = build_method(cfg, args.gamma, p2)
    if built is None:
        print("degenerate parameters (zero update); nothing to solve", file=sys.stderr)
        return 1
    method, classes = built
    if args.dump_sdpa or args.dump_program:
        lowered = lower_to_conic(build_cycle_problem(method, classes, args.K))
        if args.dump_sdpa:
            write_sdpa(lowered.program, args.dump_sdpa)
        if args.dump_program:
            save_program(lowered.program, args.dump_program)
    opts = SolverOptions(
        feas_tol=args.tol_feas,
        gap_tol=args.tol_gap,
        log_fn=print if args.log else None,
    )
    cert = run_cycle_search(method, classes, args.K, thresholds=_thresholds(args), opts=opts)
    print(
        f"{method.name} K={args.K}: {cert.verdict} "
        f"(score {cert.score:.3e}, dimension {cert.dimension}, "
        f"solver {cert.solver_status})"
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(certificate_to_dict(cert), fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(f"certificate written to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    cert = load_certificate(args.path)
    report = verify_certificate(cert, tol=args.tol)
    print(f"verdict on file: {cert.verdict}")
    print(f"score {report['score']:.3e}  separation {report['normalization']:.6f}  "
          f"interpolation violation {report['interpolation_violation']:.3e}")
    if not np.isnan(report["replay_gap"]):
        print(f"replay gap {report['replay_gap']:.3e}")
    if report["problems"]:
        for p in report["problems"]:
            print(f"PROBLEM: {p}")
        return 2
    print("certificate consistent")
    return 0


def _cmd_gallery(args) -> int:
    f = gallery_f_rho(args.rho)
    method = heavy_ball(1.0, 0.0)
    oracle = FunctionOracle(
        gradient=lambda x: np.array([f.gradient(float(x[0]))]),
        value=lambda x: f.value(float(x[0])),
    )
    traj = simulate(method, oracle, [np.array([args.x0]), np.array([args.x0])], args.steps)
    xs = [float(p[0]) for p in traj.points]
    print(f"f_rho with rho={args.rho} (smoothness {f.smoothness}); "
          f"unit-step gradient descent from x0={args.x0}")
    print("last 8 iterates:", " ".join(f"{x:.6f}" for x in xs[-8:]))
    tail = TrajectoryState(traj.points[-24:], traj.infos[-24:])
    if max(xs[-24:]) - min(xs[-24:]) < 1e-6:
        print(f"trajectory converged to fixed point {xs[-1]:.6f}")
    else:
        for K in range(2, 9):
            if check_cycle_prefix(tail, K, 2, 1e-6):
                print(f"trajectory settled on a cycle of length {K} (tolerance 1e-6)")
                break
        else:
            print("no short cycle detected within K <= 8")
    if args.csv:
        with open(args.csv, "w", encoding="ascii") as fh:
            fh.write("t,x\n")
            for t, x in enumerate(xs):
                fh.write(f"{t},{x:.12g}\n")
        print(f"trajectory written to {args.csv}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "solve-one":
            return _cmd_solve_one(args)
        if args.command == "verify-certificate":
            return _cmd_verify(args)
        if args.command == "gallery":
            return _cmd_gallery(args)
    except FileNotFoundError as exc:
        print(f"cyclesearch: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"cyclesearch: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
