"""Command-line entry point: ``lametrans {solve,emt,sweep,fit,check}``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .config import ConfigError, default_config, load_config


def _load(args, kind=None):
    cfg = load_config(args.config) if args.config else default_config(kind or "mu_sweep")
    if args.n is not None:
        cfg = cfg.with_n(args.n)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "out", None):
        cfg = replace(cfg, out=args.out)
    return cfg


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    """One free-space solve with the first configured inclusion parameters."""
    from .freespace import check_orthogonality, density_norm, energy_J, solve_transmission
    from .geometry import BoundaryGrid
    from .material import ContrastPair, LameParams

    cfg = _load(args)
    grids = [BoundaryGrid(c, cfg.n) for c in cfg.inclusions]
    pair = ContrastPair(cfg.background, LameParams(cfg.lam[0], cfg.mu[0]))
    sol = solve_transmission(pair, grids, cfg.data_field)
    lines = [
        f"background lambda0={cfg.lambda0:g} mu0={cfg.mu0:g}; inclusion lambda={cfg.lam[0]:g} mu={cfg.mu[0]:g}",
        f"curves: {len(grids)}, nodes per curve: {cfg.n}",
        f"condition estimate: {sol.cond:.3e}",
        f"||phi||_(-1/2): {density_norm(sol):.17g}",
        f"rigid orthogonality: {check_orthogonality(sol):.3e}",
        f"energy J: {energy_J(sol):.17g}",
    ]
    _write("\n".join(lines) + "\n", cfg.out)
    return 0


def cmd_emt(args) -> int:
    from .experiments import emt_text

    cfg = _load(args, "emt")
    _write(emt_text(cfg), cfg.out)
    return 0


def cmd_sweep(args) -> int:
    from .experiments import run_experiment

    cfg = _load(args)
    res = run_experiment(cfg)
    _write(res.to_csv(), cfg.out)
    print(res.summary(), file=sys.stderr if not cfg.out else sys.stdout)
    return 0 if res.passed else 1


def cmd_fit(args) -> int:
    from .experiments import fit_rate, read_csv

    with open(args.csv, encoding="utf-8") as fh:
        _, recs = read_csv(fh.read())
    slope, intercept = fit_rate(recs, args.x, args.y)
    print(f"slope {slope:.17g}\nintercept {intercept:.17g}")
    if args.min_slope is not None:
        return 0 if slope >= args.min_slope else 1
    return 0


def cmd_check(args) -> int:
    from .acceptance import run_all

    numbers = [int(v) for v in args.only.split(",")] if args.only else None
    results = run_all(numbers)
    for r in results:
        print(r.line(), flush=True)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lametrans", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="experiment config file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--n", type=int, help="nodes per boundary (overrides the config)")
        p.add_argument("--seed", type=int, help="seed for random test points")

    for name, fn, hlp in (
        ("solve", cmd_solve, "single free-space transmission solve"),
        ("emt", cmd_emt, "elastic moment tensor table"),
        ("sweep", cmd_sweep, "run the configured experiment and write CSV"),
    ):
        p = sub.add_parser(name, help=hlp)
        common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("fit", help="log-log rate fit of two CSV columns")
    p.add_argument("csv")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--min-slope", type=float)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("check", help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
