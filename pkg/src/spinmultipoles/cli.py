"""Command-line front end.

Subcommands:

* ``run <config.json>``      -- execute a simulation config
* ``validate <config.json>`` -- check a config without running it
* ``selftest``               -- run the acceptance suite

Exit codes: 0 success, 2 validation error, 3 numeric failure,
4 consistency-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, validate_config
from .errors import NumericError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_CONSISTENCY = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinmultipoles",
        description="Spin precession and relaxation of state multipoles.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a simulation config")
    run_p.add_argument("config", help="path to the JSON config")
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument(
        "--tolerance", type=float, default=None,
        help="compare_oracle tolerance override (default from config, else 1e-8)",
    )
    run_p.add_argument(
        "--threads", type=int, default=1,
        help="worker threads for stochastic trajectories (speed only, never results)",
    )

    val_p = sub.add_parser("validate", help="validate a config and exit")
    val_p.add_argument("config", help="path to the JSON config")

    sub.add_parser("selftest", help="run the acceptance suite")
    return parser


def _load_config(path: str):
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config file: {err}") from err
    return validate_config(text)


def _cmd_run(args) -> int:
    from .runner import run

    config = _load_config(args.config)
    out_dir = args.out or config.out_directory or "."
    try:
        report = run(config, out_dir, tolerance=args.tolerance, threads=args.threads)
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as err:
        diagnostic = {"error": type(err).__name__, "message": str(err)}
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        Path(out_dir, "error.json").write_text(json.dumps(diagnostic, indent=2) + "\n")
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"mode {report.mode}: wrote {', '.join(report.files)} to {out_dir}")
    for key, value in report.results.items():
        if isinstance(value, float):
            print(f"  {key} = {value:.6g}")
    if not report.consistency_ok:
        print("consistency check FAILED", file=sys.stderr)
        return EXIT_CONSISTENCY
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = _load_config(args.config)
    print(
        f"valid: 2j = {config.twice_j}, mode = {config.run_mode}, "
        f"{config.n_points} time points to t_max = {config.t_max}"
    )
    return EXIT_OK


def _cmd_selftest() -> int:
    from .acceptance import run_all

    results = run_all()
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} acceptance criteria passed")
    return EXIT_OK if not failed else EXIT_CONSISTENCY


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_selftest()
    except ConfigError as err:
        print(f"invalid config: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
