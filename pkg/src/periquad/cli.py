"""Command-line front end: single solves, convergence studies, verification.

Subcommands
-----------
solve           one configuration; prints the max-norm error and solver stats
study           one convergence regime; prints the table and optionally writes
                CSV, plot-ready data files and a matplotlib figure
geom-verify     randomized geometry invariant suite
forcing-verify  moment-based forcing against the quadrature oracle

Tables are serialized with 6 significant digits in scientific notation
as ``h,delta,m,error_inf,order`` (order blank on the first row).  The
environment variable ``PERIQUAD_THREADS`` caps the FFT worker count used
by the convolution-based operator; everything else is single-threaded.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys

import scipy.fft

from .errors import ConfigurationError, OracleConvergenceError, SolverError
from .manufactured import CaseId
from .quadrature import Scheme
from .study import FixedDelta, FixedH, FixedRatio, run_single, run_study
from .verify import forcing_suite, geometry_suite

__all__ = ["build_parser", "main"]


def _float_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--kernel", choices=("scalar", "tensor"), default="scalar")
    p.add_argument(
        "--case",
        choices=tuple(c.value for c in CaseId),
        default="1",
        help="manufactured solution (1, 2, 3 or tensor-quadratic)",
    )
    p.add_argument("--scheme", choices=tuple(s.value for s in Scheme), default="ipa-ac")
    p.add_argument("--kappa", type=float, default=1.0, help="tensor material constant")
    p.add_argument("--tol", type=float, default=1e-12, help="solver relative residual")
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument(
        "--constrained-at-quad-points",
        action="store_true",
        help="evaluate boundary data at kernel evaluation points instead of node positions",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="periquad",
        description="Meshfree one-point quadrature schemes for steady-state "
        "bond-based peridynamics on the unit square.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one configuration")
    _add_model_args(p_solve)
    p_solve.add_argument("--h", type=float, required=True)
    p_solve.add_argument("--delta", type=float, required=True)

    p_study = sub.add_parser("study", help="run a convergence study")
    _add_model_args(p_study)
    p_study.add_argument("--regime", choices=("h", "delta", "ac"), required=True)
    p_study.add_argument("--h", type=float, help="fixed mesh size (regime delta)")
    p_study.add_argument("--delta", type=float, help="fixed horizon (regime h)")
    p_study.add_argument("--m", type=float, help="fixed horizon-to-mesh ratio (regime ac)")
    p_study.add_argument("--h-list", type=_float_list, help="mesh sizes, decreasing")
    p_study.add_argument("--delta-list", type=_float_list, help="horizons, decreasing")
    p_study.add_argument("--out", help="write the table as CSV to this path")
    p_study.add_argument("--plot", help="render a log-log convergence figure (PNG) to this path")
    p_study.add_argument(
        "--plot-data", help="write a two-column (parameter, error) file to <prefix>.dat"
    )

    p_geom = sub.add_parser("geom-verify", help="randomized geometry invariants")
    p_geom.add_argument("--trials", type=int, default=1000, help="oracle-agreement pairs")
    p_geom.add_argument("--tiling-trials", type=int, default=200)
    p_geom.add_argument("--seed", type=int, default=7)
    p_geom.add_argument("--depth", type=int, default=6, help="quadtree refinement depth")

    p_force = sub.add_parser("forcing-verify", help="moment forcing vs quadrature oracle")
    p_force.add_argument("--points", type=int, default=100, help="sample points per combination")
    p_force.add_argument("--seed", type=int, default=11)
    p_force.add_argument("--tol", type=float, default=1e-10)

    return parser


def _fft_workers():
    raw = os.environ.get("PERIQUAD_THREADS", "")
    try:
        workers = int(raw)
    except ValueError:
        workers = 0
    if workers > 1:
        return scipy.fft.set_workers(workers)
    return contextlib.nullcontext()


def _regime_from_args(args):
    if args.regime == "h":
        if args.delta is None or args.h_list is None:
            raise ConfigurationError("regime h needs --delta and --h-list")
        return FixedDelta(args.delta, tuple(args.h_list))
    if args.regime == "delta":
        if args.h is None or args.delta_list is None:
            raise ConfigurationError("regime delta needs --h and --delta-list")
        return FixedH(args.h, tuple(args.delta_list))
    if args.h_list is None or args.m is None:
        raise ConfigurationError("regime ac needs --m and --h-list")
    return FixedRatio(args.m, tuple(args.h_list))


def _cmd_solve(args) -> int:
    with _fft_workers():
        run = run_single(
            args.h,
            args.delta,
            args.kernel,
            CaseId(args.case),
            Scheme(args.scheme),
            kappa=args.kappa,
            solver_tol=args.tol,
            max_iter=args.max_iter,
            constrained_at_quad_points=args.constrained_at_quad_points,
        )
    sol = run.solution
    print(
        f"kernel={args.kernel} case={args.case} scheme={args.scheme} "
        f"h={args.h:g} delta={args.delta:g} m={args.delta / args.h:g}"
    )
    print(f"dofs={run.system.dof_count} iterations={sol.iterations} residual={sol.residual:.5e}")
    print(f"error_inf={run.error:.5e}")
    return 0


def _cmd_study(args) -> int:
    regime = _regime_from_args(args)
    with _fft_workers():
        table = run_study(
            regime,
            args.kernel,
            CaseId(args.case),
            Scheme(args.scheme),
            kappa=args.kappa,
            solver_tol=args.tol,
            max_iter=args.max_iter,
            constrained_at_quad_points=args.constrained_at_quad_points,
        )
    sys.stdout.write(table.csv_text())
    if args.out:
        table.to_csv(args.out)
        print(f"wrote {args.out}", file=sys.stderr)
    if args.plot_data:
        path = f"{args.plot_data}.dat"
        swept = [r.h if regime.swept == "h" else r.delta for r in table.rows]
        with open(path, "w", newline="") as fh:
            for p, e in zip(swept, table.errors):
                fh.write(f"{p:.5e} {e:.5e}\n")
        print(f"wrote {path}", file=sys.stderr)
    if args.plot:
        from .plots import render_convergence_figure

        slope = None if args.regime == "ac" else 2.0
        render_convergence_figure(table, args.plot, reference_slope=slope)
        print(f"wrote {args.plot}", file=sys.stderr)
    return 0


def _cmd_geom_verify(args) -> int:
    results = geometry_suite(
        tiling_trials=args.tiling_trials,
        oracle_trials=args.trials,
        seed=args.seed,
        oracle_depth=args.depth,
    )
    failed = 0
    for res in results:
        print(res)
        failed += not res.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def _cmd_forcing_verify(args) -> int:
    results = forcing_suite(points=args.points, seed=args.seed, tol=args.tol)
    failed = 0
    for res in results:
        print(res)
        failed += not res.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


_COMMANDS = {
    "solve": _cmd_solve,
    "study": _cmd_study,
    "geom-verify": _cmd_geom_verify,
    "forcing-verify": _cmd_forcing_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigurationError, SolverError, OracleConvergenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
