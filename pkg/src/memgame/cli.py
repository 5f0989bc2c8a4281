"""Command-line interface: run experiment sweeps and classify strategy profiles.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analytic_2x2, experiments, markov_engine, mmga
from ._version import __version__
from .experiments import ConfigurationError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memgame",
        description="Learning dynamics in zero-sum games with asymmetric memories",
        exit_on_error=False,
    )
    parser.add_argument("--version", action="version", version=f"memgame {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or config-file experiment",
                         exit_on_error=False)
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="preset name (see list-presets)")
    src.add_argument("--config", help="path to a JSON config file")
    run.add_argument("--seed", type=int, default=None, help="override the master seed")
    run.add_argument("--samples", type=int, default=None, help="override the sample count")
    run.add_argument("--out", default=None, help="output directory (default: ./out/<name>)")

    analyze = sub.add_parser(
        "analyze", help="classify a 2-action (1,0)-memory strategy profile",
        exit_on_error=False)
    analyze.add_argument("--point", required=True,
                         help='JSON file with {"x": [x1..x4], "y": y, "payoff": [[..]]}')

    sub.add_parser("list-presets", help="list preset experiment names",
                   exit_on_error=False)
    return parser


def _cmd_run(args) -> int:
    if args.preset is not None:
        config = experiments.preset(args.preset)
    else:
        config = experiments.load_config(args.config)
    config = experiments.with_overrides(config, samples=args.samples, seed=args.seed)
    out_dir = args.out if args.out is not None else f"out/{config.name}"
    result = experiments.run_experiment(config, out_dir)
    if isinstance(result, dict):
        for name, stats in result.items():
            _print_stats(f"{config.name}/{name}", stats)
    else:
        _print_stats(config.name, result)
    print(f"wrote {out_dir}")
    return EXIT_OK


def _print_stats(name: str, stats: experiments.SweepStats):
    if stats.n_samples == 0:
        print(f"{name}: no samples")
        return
    conv = int(stats.converged.sum())
    print(f"{name}: {stats.n_samples} sample(s), {conv} converged, "
          f"final mean KL {stats.kl_mean[-1]:.3e}")


def _cmd_analyze(args) -> int:
    try:
        with open(args.point, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"point file is not valid JSON: {exc}") from exc
    try:
        x = np.asarray(raw["x"], dtype=float)
        y = float(raw["y"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f'point file needs "x" (4 numbers) and "y": {exc}') from exc
    if x.shape != (4,):
        raise ConfigurationError('"x" must hold exactly 4 probabilities')
    payoff = np.asarray(raw.get("payoff", [[1.0, -1.0], [-1.0, 1.0]]), dtype=float)
    u4 = analytic_2x2.Payoff4(payoff[0, 0], payoff[0, 1], payoff[1, 0], payoff[1, 1])
    nash = analytic_2x2.original_nash(u4)
    report = analytic_2x2.classify_fixed_point(x, y, u4)
    out = {
        "x_st": analytic_2x2.marginal_formula(x, y),
        "indicator": report.indicator,
        "classification": report.classification,
        "eigenvalues": [[lam.real, lam.imag] for lam in report.eigenvalues],
        "original_nash": {"x_o": nash.x_o, "y_o": nash.y_o, "u_o": nash.u_o},
    }
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    print()
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except (argparse.ArgumentError, SystemExit) as exc:
        if isinstance(exc, SystemExit):
            # argparse exits 0 for --help/--version
            return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "list-presets":
            for name in experiments.list_presets():
                print(name)
            return EXIT_OK
        raise ConfigurationError(f"unknown command {args.command!r}")
    except (ConfigurationError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (mmga.DynamicsError, markov_engine.ConvergenceError,
            np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
