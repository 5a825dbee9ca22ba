"""Command line interface: bench, solve and info subcommands."""

import argparse
import sys
import time

import numpy as np

from .bench import RunConfig, build_solver, load_config, run_benchmark
from .exceptions import AmgError
from .krylov import pcg
from .multivector import format_hierarchy_info

USAGE_ERROR = 1
NUMERICAL_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_ERROR)


def _build_parser():
    parser = _Parser(prog="mvamg", description="Multi-vector aggregation AMG benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run the benchmark protocol from a config file")
    bench.add_argument("--config", required=True, help="flat key = value config file")
    bench.add_argument("--grid", type=int, help="override the grid size")
    bench.add_argument("--nsv", help="override the nsv sweep, e.g. 3,4,5")
    bench.add_argument("--seed", type=int, help="override the RNG seed")
    bench.add_argument("--out", help="override the CSV output path")

    solve = sub.add_parser("solve", help="solve one Matrix Market system")
    solve.add_argument("--matrix", required=True, help="Matrix Market file")
    solve.add_argument("--nsv", type=int, default=5)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--rtol", type=float, default=1e-6)
    solve.add_argument("--itmax", type=int, default=1000)
    solve.add_argument("--out", help="write the solution vector to this file (one value per line)")

    info = sub.add_parser("info", help="print the hierarchy structure for a problem")
    grp = info.add_mutually_exclusive_group(required=True)
    grp.add_argument("--matrix", help="Matrix Market file")
    grp.add_argument("--problem", choices=["ani1", "ani2"], help="generated test problem")
    info.add_argument("--grid", type=int, default=64)
    info.add_argument("--nsv", type=int, default=5)
    info.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_bench(args):
    overrides = {}
    if args.grid is not None:
        overrides["grid_n"] = args.grid
    if args.nsv is not None:
        overrides["nsv"] = tuple(int(v) for v in args.nsv.split(","))
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out"] = args.out
    cfg = load_config(args.config, overrides)
    rows = run_benchmark(cfg)
    for row in rows:
        print(row.csv_line())
    if cfg.out:
        print(f"wrote {cfg.out}", file=sys.stderr)
    return 0


def _cmd_solve(args):
    cfg = RunConfig(problem=f"mtx:{args.matrix}", nsv=(args.nsv,), seed=args.seed)
    operator, hierarchy, _, tb, mvtb = build_solver(cfg)
    A = operator.matrices[0]
    b = np.ones(A.shape[0])
    t0 = time.perf_counter()
    x, report = pcg(A, b, operator.apply, rtol=args.rtol, itmax=args.itmax)
    ts = time.perf_counter() - t0
    print(f"n={A.shape[0]} nnz={A.nnz} levels={hierarchy.nl}")
    print(f"tb={tb:.3f}s mvtb={mvtb:.3f}s")
    print(
        f"nit={report.iterations} converged={report.converged} "
        f"relres={report.final_relative_residual:.3e} ts={ts:.3f}s"
    )
    if args.out:
        np.savetxt(args.out, x)
    if not report.converged:
        print("solver did not reach the requested tolerance", file=sys.stderr)
        return NUMERICAL_ERROR
    return 0


def _cmd_info(args):
    problem = f"mtx:{args.matrix}" if args.matrix else args.problem
    cfg = RunConfig(problem=problem, grid_n=args.grid, nsv=(args.nsv,), seed=args.seed)
    _, hierarchy, _, _, _ = build_solver(cfg)
    print(format_hierarchy_info(hierarchy))
    return 0


def cli_entry(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_info(args)
    except (AmgError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def main():
    raise SystemExit(cli_entry())


if __name__ == "__main__":
    main()
