"""Command-line interface.

Exit codes: 0 success, 1 validation error (bad flags, config, data or a
failed ``verify``), 2 runtime/convergence error, 3 I/O error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .dataio import fmt, load_config, load_prices, write_results
from .deform import DeformParams, deformed_exp, deformed_log
from .errors import ConfigError, DataError, DomainError, GEGError
from .olps import backtest, run_baselines
from .search import grid_search, random_search

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3

KIND_FLAGS = {"tsallis": "q", "kaniadakis": "kappa", "amari": "alpha", "abe": "sigma", "gamma": "gamma"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run configuration file of section.key = value lines "
                        "(no default; required by backtest, baselines and search)")
    common.add_argument("--out", type=Path, help="output directory (default: output.dir from the config, which defaults to 'out')")
    common.add_argument("--seed", type=int, help="random seed (default: run.seed from the config, which defaults to 0)")

    parser = _Parser(prog="geg", description="Generalized exponentiated gradient toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    mt = sub.add_parser("math-table", parents=[common],
                        help="tabulate the deformed log/exp and the round-trip residual")
    mt.add_argument("--a", type=float, default=0.0, help="deformation a (default 0)")
    mt.add_argument("--b", type=float, default=0.0, help="deformation b (default 0)")
    mt.add_argument("--kind", choices=["general", "natural", *KIND_FLAGS], default="general",
                    help="named family; overrides --a/--b (default general)")
    for name in KIND_FLAGS.values():
        mt.add_argument(f"--{name}", type=float,
                        help=f"parameter of the family using '{name}' (no default; required by that --kind)")
    mt.add_argument("--axis", choices=["x", "y"], default="x",
                    help="tabulate over x (log side) or y (exp side); default x")
    mt.add_argument("--start", type=float, help="first grid value (default 0.1 for x, -2 for y)")
    mt.add_argument("--stop", type=float, help="last grid value (default 5 for x, 2 for y)")
    mt.add_argument("--step", type=float, default=0.1, help="grid spacing (default 0.1)")
    mt.set_defaults(func=cmd_math_table)

    bt = sub.add_parser("backtest", parents=[common], help="run one strategy and write result files")
    bt.set_defaults(func=cmd_backtest)

    bl = sub.add_parser("baselines", parents=[common],
                        help="uniform buy-and-hold, uniform CRP and classical EG")
    bl.set_defaults(func=cmd_baselines)

    se = sub.add_parser("search", parents=[common], help="grid or random hyperparameter search")
    se.set_defaults(func=cmd_search)

    ve = sub.add_parser("verify", parents=[common], help="run the fast invariant suite")
    ve.set_defaults(func=cmd_verify)
    return parser


def _params_from_args(args):
    if args.kind == "general":
        return DeformParams(args.a, args.b)
    if args.kind == "natural":
        return DeformParams.natural()
    return DeformParams.from_kind(args.kind, getattr(args, KIND_FLAGS[args.kind]))


def _grid(start, stop, step):
    if step <= 0 or stop < start:
        raise DomainError("need step > 0 and stop >= start")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def cmd_math_table(args, out):
    p = _params_from_args(args)
    if args.axis == "x":
        start = 0.1 if args.start is None else args.start
        stop = 5.0 if args.stop is None else args.stop
        x = _grid(start, stop, args.step)
        if np.any(x <= 0):
            raise DomainError("x grid must be strictly positive")
        log = np.asarray(deformed_log(p, x))
        residual = np.abs(np.asarray(deformed_exp(p, log)) - x) / x
        header, cols = ("x", "log_ab", "residual"), (x, log, residual)
    else:
        start = -2.0 if args.start is None else args.start
        stop = 2.0 if args.stop is None else args.stop
        y = _grid(start, stop, args.step)
        ex = np.asarray(deformed_exp(p, y))
        inside = (ex > 0) & np.isfinite(ex)
        back = np.full_like(y, np.nan)
        back[inside] = deformed_log(p, ex[inside])
        header, cols = ("y", "exp_ab", "residual"), (y, ex, np.abs(back - y))
    print(f"# a = {fmt(p.a)}  b = {fmt(p.b)}", file=out)
    print("\t".join(header), file=out)
    for row in zip(*cols):
        print("\t".join(fmt(float(v)) for v in row), file=out)
    return EXIT_OK


def _load_run(args):
    if args.config is None:
        raise ConfigError("--config is required for this command")
    cfg = load_config(args.config)
    out_dir = args.out if args.out is not None else cfg.output_dir
    seed = args.seed if args.seed is not None else cfg.seed
    prices = load_prices(cfg.dataset_path, cfg.dataset_format)
    return cfg, prices, Path(out_dir), seed


def cmd_backtest(args, out):
    cfg, prices, out_dir, _ = _load_run(args)
    result = backtest(prices, cfg.strategy, cfg.initial_wealth)
    write_results(result, out_dir, cfg.echo())
    for k, v in result.metrics().items():
        print(f"{k} = {fmt(v)}", file=out)
    return EXIT_OK


def cmd_baselines(args, out):
    cfg, prices, out_dir, _ = _load_run(args)
    results = run_baselines(prices, cfg.baseline_eta, cfg.initial_wealth)
    print("strategy\tfinal_wealth\tmax_drawdown", file=out)
    for name, res in results.items():
        m = res.metrics()
        print(f"{name}\t{fmt(m['final_wealth'])}\t{fmt(m['max_drawdown'])}", file=out)
    for name, res in results.items():
        write_results(res, out_dir / name, cfg.echo())
    return EXIT_OK


def cmd_search(args, out):
    cfg, prices, out_dir, seed = _load_run(args)
    block = cfg.search
    if block is None:
        raise ConfigError("config has no search block (search.* / split.* keys)")
    if block.method == "grid":
        result = grid_search(block.space, prices, block.scheme, block.objective, block.jobs)
    else:
        result = random_search(block.space, prices, block.scheme, block.objective,
                               block.samples, seed, block.jobs)
    write_results(result, out_dir, cfg.echo())
    best = result.best
    print(f"evaluated {result.evaluated} configurations ({result.invalid} invalid skipped)", file=out)
    print("best: " + ", ".join(f"{k}={fmt(v)}" for k, v in best.point.items())
          + f", score={fmt(float(best.score))}", file=out)
    return EXIT_OK


def cmd_verify(args, out):
    seed = 0 if args.seed is None else args.seed
    results = verify_mod.run_checks(seed=seed)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status}  {r.name}: max residual {r.residual:.3e} (tol {r.tol:.1e})"
        if r.error:
            line += f" [{r.error}]"
        print(line, file=out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: " + "; ".join(failed), file=out)
        return EXIT_VALIDATION
    print(f"all {len(results)} checks passed", file=out)
    return EXIT_OK


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ConfigError, DataError, DomainError) as exc:
        print(f"geg: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GEGError as exc:
        print(f"geg: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"geg: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
