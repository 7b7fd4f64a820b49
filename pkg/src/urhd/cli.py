"""Command-line entry point: ``urhd exact|evolve|converge --config run.json``.

Exit codes: 0 ok, 2 configuration error, 3 no exact solution (vacuum),
4 runtime abort of the evolution.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import time

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .core import UnphysicalStateError
from .exact import RiemannError, sample_profile, solve
from .fv import Grid, evolve, write_snapshot
from .harness import EvolutionFailure, convergence_sweep, format_table, init_riemann_grid

EXIT_OK, EXIT_CONFIG, EXIT_NO_SOLUTION, EXIT_RUNTIME = 0, 2, 3, 4

logger = logging.getLogger("urhd")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _open_out(path):
    return open(path, "w") if path else sys.stdout


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "time", None) is not None:
        if args.time < 0.0:
            raise ConfigError("--time must be non-negative")
        cfg = dataclasses.replace(cfg, t_end=float(args.time))
    if getattr(args, "out", None):
        cfg = dataclasses.replace(cfg, output=args.out)
    return cfg


def cmd_exact(cfg: RunConfig, samples: int, err=None) -> int:
    err = sys.stderr if err is None else err
    if samples < 1:
        raise ConfigError("--samples must be positive")
    sol = solve(cfg.left.to_state(), cfg.right.to_state(), cfg.eos)
    lh, lt, c, rt, rh = sol.wave_speeds()
    print(f"pattern {sol.pattern}  vx*={_fmt(sol.vx_star)} rho*={_fmt(sol.rho_star)} "
          f"vt_L*={_fmt(sol.vt_left_star)} vt_R*={_fmt(sol.vt_right_star)}", file=err)
    print(f"speeds left=({_fmt(lh)}, {_fmt(lt)}) contact={_fmt(c)} right=({_fmt(rt)}, {_fmt(rh)})",
          file=err)
    x = np.linspace(cfg.grid.x_bounds[0], cfg.grid.x_bounds[1], samples)
    prof = sample_profile(sol, x, cfg.t_end)
    out = _open_out(cfg.output)
    try:
        out.write("x,rho,p,vx,vt\n")
        for i in range(samples):
            out.write(",".join(_fmt(v) for v in (x[i], prof["rho"][i], prof["p"][i],
                                                   prof["vx"][i], prof["vt"][i])) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _initial_grid(cfg: RunConfig) -> Grid:
    zpu = cfg.grid.zones_per_unit
    # initial data does not depend on t_end, which TestSpec requires positive
    cfg = dataclasses.replace(cfg, t_end=1.0)
    if cfg.grid.dims == 3:
        lo, hi = cfg.grid.x_bounds
        nx = int(round((hi - lo) * zpu))
        h = (hi - lo) / nx
        n = cfg.grid.transverse_cells
        grid = Grid.uniform((nx, n, n), (lo, 0.0, 0.0), (hi, n * h, n * h))
        line = init_riemann_grid(cfg.test_spec((zpu,), dims=1), zpu)
        grid.physical[...] = line.physical[:, :, None, None]
        return grid
    return init_riemann_grid(cfg.test_spec((zpu,)), zpu)


def cmd_evolve(cfg: RunConfig, workers: int = 1, err=None) -> int:
    err = sys.stderr if err is None else err
    grid = _initial_grid(cfg)
    start = time.perf_counter()
    final = evolve(grid, cfg.scheme_config(), cfg.t_end, workers=workers)
    wall = time.perf_counter() - start
    out = _open_out(cfg.output)
    try:
        write_snapshot(final, cfg.k, out)
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"steps={final.steps} t={_fmt(final.time)} wall={wall:.3f}s", file=err)
    return EXIT_OK


def cmd_converge(cfg: RunConfig, workers: int = 1, err=None) -> int:
    err = sys.stderr if err is None else err
    if not cfg.t_end > 0.0:
        raise ConfigError("convergence runs need t_end > 0")
    rows = convergence_sweep(cfg.test_spec(), workers=workers)
    out = _open_out(cfg.output)
    try:
        out.write(format_table(rows))
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="urhd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default: config output or stdout)")
    common.add_argument("--time", type=float, metavar="T", help="override t_end")
    common.add_argument("--workers", type=int, default=1, metavar="N", help="number of grid tiles")
    common.add_argument("--print-config", action="store_true",
                        help="print the effective configuration as JSON and exit")
    p = sub.add_parser("exact", parents=[common], help="sample the exact solution")
    p.add_argument("--samples", type=int, default=1000, metavar="N")
    sub.add_parser("evolve", parents=[common], help="run the finite-volume evolution")
    sub.add_parser("converge", parents=[common], help="L1 convergence table")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        if args.print_config:
            print(cfg.dumps())
            return EXIT_OK
        if args.command == "exact":
            return cmd_exact(cfg, args.samples)
        if args.command == "evolve":
            return cmd_evolve(cfg, args.workers)
        return cmd_converge(cfg, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RiemannError as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except (UnphysicalStateError, EvolutionFailure) as exc:
        cell = getattr(exc, "index", None) or getattr(getattr(exc, "cause", None), "index", None)
        where = f" at cell {cell}" if cell is not None else ""
        print(f"evolution aborted{where}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
