"""Command-line interface.

Subcommands: ``error-map``, ``error-curves``, ``rho-contours``,
``param-isolines``, ``optimize`` (print p*, q*, rho*), ``solve`` (write the
final-time monodomain snapshot).  Flags given on the command line override
values from ``--config``.

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import NumericalError, ValidationError
from .experiments import (ExperimentConfig, load_config, run_error_curves,
                          run_error_map, run_param_isolines, run_rho_contours,
                          run_solve, write_gnuplot)
from .optim import optimize_transmission


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="oswr", description=__doc__.splitlines()[0],
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("error-map", "SWR error surface over a (p, q) grid"),
        ("error-curves", "per-iteration SWR error for the damping cases"),
        ("rho-contours", "predicted convergence-factor contour tables"),
        ("param-isolines", "optimized (p, q) along damping sweeps"),
        ("optimize", "print optimized p, q and the objective value"),
        ("solve", "write the final-time monodomain snapshot CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, metavar="FILE",
                       help="flat key = value config file")
        p.add_argument("--out", type=str, default=None, metavar="DIR",
                       help="output directory (default: config output_dir)")
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--nu", type=float, default=None)
        p.add_argument("--strategy", type=str, default=None,
                       choices=("linf", "l2", "both"))
        p.add_argument("--kmax", type=int, default=None)
        p.add_argument("--grid-scale", type=float, default=None)
    return parser


def _configure(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config is not None:
        cfg = load_config(args.config, cfg)
    overrides = {}
    if args.gamma is not None:
        overrides["gamma"] = args.gamma
    if args.nu is not None:
        overrides["nu"] = args.nu
    if args.strategy is not None:
        overrides["strategy"] = args.strategy
    if args.kmax is not None:
        overrides["kmax"] = args.kmax
    if args.grid_scale is not None:
        overrides["grid_scale"] = args.grid_scale
    if args.out is not None:
        overrides["output_dir"] = args.out
    return replace(cfg, **overrides) if overrides else cfg


def cli_main(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(parser.format_usage(), file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        cfg = _configure(args)
        out = Path(cfg.output_dir)
        if args.command == "optimize":
            phys = cfg.phys()
            grid = cfg.grid(phys)
            dec = cfg.dec(phys, grid)
            band = cfg.band()
            for strategy in cfg.strategies():
                r = optimize_transmission(strategy, phys, dec, band)
                print(f"{r.p_opt:.12g} {r.q_opt:.12g} {r.objective_value:.12g}")
            return 0
        if args.command == "solve":
            path = run_solve(cfg).write(out / "solution.csv")
            print(f"wrote {path}")
            return 0
        if args.command == "error-map":
            path = run_error_map(cfg).write(out / "error_map.csv")
            print(f"wrote {path}")
            print(f"wrote {write_gnuplot('error_map', out)}")
            return 0
        if args.command == "error-curves":
            cases = None
            if args.gamma is not None or args.nu is not None:
                cases = [(cfg.gamma, cfg.nu)]
            path = run_error_curves(cfg, cases).write(out / "error_curves.csv")
            print(f"wrote {path}")
            print(f"wrote {write_gnuplot('error_curves', out)}")
            return 0
        if args.command == "rho-contours":
            pq_tables, damping = run_rho_contours(cfg)
            for strategy, table in pq_tables.items():
                path = table.write(out / f"rho_pq_{strategy}.csv")
                print(f"wrote {path}")
            path = damping.write(out / "rho_damping.csv")
            print(f"wrote {path}")
            print(f"wrote {write_gnuplot('rho_contours', out)}")
            return 0
        if args.command == "param-isolines":
            path = run_param_isolines(cfg).write(out / "param_isolines.csv")
            print(f"wrote {path}")
            print(f"wrote {write_gnuplot('param_isolines', out)}")
            return 0
        raise ValidationError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
