"""secnet command-line interface.

Subcommands evaluate the closed forms (`analytic`), run the Monte Carlo
simulator (`simulate`), solve the density optimization (`optimize`), sweep
one parameter (`sweep`), or reproduce a preset experiment (`figure N`).
Tables go to --out (or stdout) as CSV or JSON; figure/sweep tables written
to a file are also rendered to a PNG next to it unless --no-plot is given.

Exit codes: 0 success, 2 configuration error, 3 infeasible target,
4 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import figures, montecarlo, plotting
from .errors import ConfigError, InfeasibleTargetError, NumericError, SecnetError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERIC = 4

_UNIT_BY_PREFIX = (
    ("lambda", "per-area"),
    ("p_t_dbm", "dBm"),
    ("p_h_dbm", "dBm"),
    ("p_f_dbm", "dBm"),
    ("d_f", "length"),
    ("d_h", "length"),
    ("t_s", "bit/s/Hz/area"),
    ("t_c", "bit/s/Hz/area"),
    ("r_t", "bit/s/Hz"),
    ("r_e", "bit/s/Hz"),
    ("r_s", "bit/s/Hz"),
)


def _unit(column: str) -> str:
    for prefix, unit in _UNIT_BY_PREFIX:
        if column.startswith(prefix):
            return unit
    return "1"


def _format_cell(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(columns, rows, stream, fmt: str, mode: str) -> None:
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow([f"{c}[{_unit(c)}]" for c in columns])
        for row in rows:
            writer.writerow([_format_cell(row.get(c, "")) for c in columns])
    else:
        payload = {
            "mode": mode,
            "columns": list(columns),
            "rows": [
                {c: (None if row.get(c, "") == "" else row.get(c)) for c in columns}
                for row in rows
            ],
        }
        json.dump(payload, stream, indent=2)
        stream.write("\n")


def _emit(args, columns, rows, mode: str) -> str | None:
    """Write the table; returns the output path when writing to a file."""
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_table(columns, rows, fh, args.format, mode)
        return args.out
    write_table(columns, rows, sys.stdout, args.format, mode)
    return None


# ---------------------------------------------------------------------------
# Config file
# ---------------------------------------------------------------------------

def load_config_file(path: str) -> dict:
    """Parse a flat key = value config file (TOML-style scalars, # comments)."""
    params: dict = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        text = text.strip()
        if key not in figures.KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown parameter {key!r}")
        if not text:
            raise ConfigError(f"{path}:{lineno}: missing value for {key!r}")
        params[key] = _parse_scalar(text, path, lineno)
    return params


def _parse_scalar(text: str, path: str, lineno: int):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{path}:{lineno}: cannot parse value {text!r}") from None


def _point_from_args(args) -> figures.ExperimentPoint:
    params = load_config_file(args.config) if args.config else {}
    return figures.build_point(params)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_analytic(args) -> int:
    point = _point_from_args(args)
    row = {"beta_t": point.beta_t, "beta_c": point.beta_c, "beta_e": point.beta_e}
    row.update(figures.analytic_record(point))
    _emit(args, list(row.keys()), [row], "analytic")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    point = _point_from_args(args)
    sim = montecarlo.SimSettings(trials=args.trials, seed=args.seed, workers=args.workers)
    row = {"beta_t": point.beta_t, "beta_c": point.beta_c, "beta_e": point.beta_e,
           "seed": args.seed}
    row.update(figures.simulate_record(point, sim))
    _emit(args, list(row.keys()), [row], "simulate")
    return EXIT_OK


def _cmd_optimize(args) -> int:
    point = _point_from_args(args)
    row = {"sigma": point.targets.sigma, "sigma_c": point.targets.sigma_c,
           "epsilon": point.targets.epsilon, "t_c": point.targets.t_c}
    row.update(figures.optimize_record(point))
    _emit(args, list(row.keys()), [row], "optimize")
    return EXIT_OK if row["feasible"] else EXIT_INFEASIBLE


def _sweep_values(args) -> np.ndarray:
    if args.points < 2:
        raise ConfigError("sweep needs at least 2 points")
    if args.start == args.stop:
        raise ConfigError("sweep range is empty (start == stop)")
    if args.scale == "log":
        if args.start <= 0 or args.stop <= 0:
            raise ConfigError("log-scale sweep needs positive endpoints")
        return np.geomspace(args.start, args.stop, args.points)
    return np.linspace(args.start, args.stop, args.points)


def _cmd_sweep(args) -> int:
    if args.param not in figures.SWEEPABLE_KEYS:
        raise ConfigError(
            f"unknown sweep parameter {args.param!r}; "
            f"valid names: {', '.join(sorted(figures.SWEEPABLE_KEYS))}"
        )
    base = load_config_file(args.config) if args.config else {}
    values = _sweep_values(args)
    int_param = args.param.startswith("n_")
    rows = []
    for idx, value in enumerate(values):
        value = int(round(value)) if int_param else float(value)
        point = figures.build_point({**base, args.param: value})
        row = {args.param: value}
        row.update(figures.analytic_record(point))
        if args.mc:
            sim = montecarlo.SimSettings(
                trials=args.trials, seed=args.seed * 1_000_003 + idx,
                workers=args.workers,
            )
            row.update(figures.simulate_record(point, sim))
        rows.append(row)
    columns = list(rows[0].keys())
    out = _emit(args, columns, rows, "sweep")
    if out and not args.no_plot:
        png = os.path.splitext(out)[0] + ".png"
        plotting.render_sweep(rows, args.param, args.scale == "log", png)
    return EXIT_OK


def _cmd_figure(args) -> int:
    data = figures.figure_data(
        args.number, trials=args.trials, seed=args.seed,
        points=args.points, workers=args.workers,
    )
    out = _emit(args, data.columns, data.rows, data.name)
    if out and not args.no_plot:
        png = os.path.splitext(out)[0] + ".png"
        plotting.render_figure(data, png)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser / entry point
# ---------------------------------------------------------------------------

def _add_io_args(sub, mc_default_trials=10_000):
    sub.add_argument("--config", help="flat key = value parameter file")
    sub.add_argument("--out", help="output file (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument("--trials", type=int, default=mc_default_trials)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--no-plot", action="store_true",
                     help="skip PNG rendering next to --out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secnet",
        description="Connection/secrecy analysis of two-tier Poisson networks "
                    "with full-duplex jamming receivers",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("analytic", help="closed forms at one parameter point")
    _add_io_args(sub)
    sub.set_defaults(func=_cmd_analytic)

    sub = subs.add_parser("simulate", help="Monte Carlo estimates at one parameter point")
    _add_io_args(sub)
    sub.set_defaults(func=_cmd_simulate)

    sub = subs.add_parser("optimize", help="maximize secrecy throughput over lambda_f")
    _add_io_args(sub)
    sub.set_defaults(func=_cmd_optimize)

    sub = subs.add_parser("sweep", help="sweep one parameter")
    _add_io_args(sub)
    sub.add_argument("--param", required=True)
    sub.add_argument("--start", type=float, required=True)
    sub.add_argument("--stop", type=float, required=True)
    sub.add_argument("--points", type=int, default=10)
    sub.add_argument("--scale", choices=("linear", "log"), default="linear")
    sub.add_argument("--mc", action="store_true", help="add Monte Carlo columns")
    sub.set_defaults(func=_cmd_sweep)

    sub = subs.add_parser("figure", help="preset experiment tables (2-9)")
    sub.add_argument("number", type=int)
    _add_io_args(sub, mc_default_trials=20_000)
    sub.add_argument("--points", type=int, default=None,
                     help="sweep points per curve (preset-specific default)")
    sub.set_defaults(func=_cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"secnet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleTargetError as exc:
        print(f"secnet: infeasible target: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericError as exc:
        print(f"secnet: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SecnetError as exc:
        print(f"secnet: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"secnet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
