"""``isac-edge`` command line: solve, sweep, gain, fit, remark.

Exit codes: 0 success, 1 I/O, schema or usage errors, 2 infeasible scenario.
Verbosity comes from ``ISAC_EDGE_LOG`` (a level name such as DEBUG or INFO).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import pipeline
from .errors import InfeasibleTaskError, IsacError
from .model import fit_error_model
from .scenario import load_scenario
from .timealloc import sweep_remark

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2
REMARK_COLUMNS = ("sinr_db", "t_s", "tau_1", "tau_2", "mu_star")

log = logging.getLogger("isac_edge")


def _setup_logging() -> None:
    level = os.environ.get("ISAC_EDGE_LOG", "WARNING").strip().upper() or "WARNING"
    value = int(level) if level.isdigit() else logging.getLevelName(level)
    if not isinstance(value, int):
        value = logging.WARNING
    logging.basicConfig(level=value, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def parse_grid(text: str) -> list[float]:
    """``0.1,0.2,0.5`` or ``logspace:START:STOP:N`` / ``linspace:START:STOP:N``.

    logspace bounds are the values themselves, not exponents. An empty string
    gives an empty grid.
    """
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        kind, *rest = text.split(":")
        if kind not in ("logspace", "linspace") or len(rest) != 3:
            raise ValueError(f"bad grid spec {text!r}")
        lo, hi, n = float(rest[0]), float(rest[1]), int(rest[2])
        if kind == "linspace":
            return [float(x) for x in np.linspace(lo, hi, n)]
        if lo <= 0 or hi <= 0:
            raise ValueError("logspace bounds must be positive")
        return [float(x) for x in np.logspace(math.log10(lo), math.log10(hi), n)]
    return [float(x) for x in text.split(",") if x.strip()]


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def cmd_solve(args) -> int:
    sc = load_scenario(args.scenario)
    rep = pipeline.compare(sc.cfg, sc.channels(), args.mode, target_error=args.target_error)
    log.info("solved %s: regime %s, gain %.4f", args.scenario, rep.regime, rep.gain_measured)
    doc = {"scenario": {"num_antennas": sc.cfg.num_antennas, "tasks": list(sc.task_names),
                        "seed": sc.seed},
           **pipeline.report_to_dict(rep)}
    _write_text(args.out, _dump_json(doc))
    return EXIT_OK


def cmd_sweep(args) -> int:
    sc = load_scenario(args.scenario)
    grid = parse_grid(args.grid)
    rows = pipeline.sweep(sc.cfg, sc.channels(), args.param, grid, args.mode,
                          target_error=args.target_error, jobs=args.jobs)
    _write_text(args.out, pipeline.sweep_csv(rows))
    return EXIT_OK


def cmd_gain(args) -> int:
    if args.x is not None:
        doc = {"x": args.x, "gain_analytic": pipeline.gain_from_ratio(args.x)}
    else:
        if args.scenario is None:
            raise ValueError("gain needs a scenario or --x")
        sc = load_scenario(args.scenario)
        cfg = sc.cfg
        h = sc.channels().h
        x = cfg.sensing_time * cfg.bandwidth * pipeline.mrc_rate(cfg, h) / cfg.sample_volume
        doc = {"x": x, "mrc_rate_bps_hz": pipeline.mrc_rate(cfg, h),
               "gain_analytic": pipeline.isac_gain_analytic(cfg, h)}
    _write_text(args.out, _dump_json(doc))
    return EXIT_OK


def read_fit_points(path: str) -> list[tuple[float, float]]:
    """Two-column CSV of (v, E); a non-numeric first row is taken as a header."""
    points = []
    with open(path, newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}: row {i + 1} needs two columns")
            try:
                points.append((float(row[0]), float(row[1])))
            except ValueError:
                if i == 0:
                    continue
                raise ValueError(f"{path}: row {i + 1} is not numeric") from None
    return points


def cmd_fit(args) -> int:
    a, b = fit_error_model(read_fit_points(args.csv))
    _write_text(args.out, f"{a!r} {b!r}\n")
    return EXIT_OK


def cmd_remark(args) -> int:
    rows = sweep_remark(parse_grid(args.sinr_db), parse_grid(args.t_s),
                        total_time=args.total_time)
    lines = [",".join(REMARK_COLUMNS)]
    lines += [",".join(repr(r[c]) for c in REMARK_COLUMNS) for r in rows]
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isac-edge",
                                 description="ISAC beamforming and time allocation for edge learning")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="design beamformers and phase times, compare to the baseline")
    p.add_argument("scenario")
    p.add_argument("--out", "-o", help="JSON report path (default: stdout)")
    p.add_argument("--mode", choices=pipeline.MODES, default="equal_samples")
    p.add_argument("--target-error", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="compare ISAC and baseline over a parameter grid")
    p.add_argument("scenario")
    p.add_argument("--param", required=True, help="t_s, B, P, T or target_error")
    p.add_argument("--grid", required=True,
                   help="comma list, logspace:START:STOP:N or linspace:START:STOP:N")
    p.add_argument("--mode", choices=pipeline.MODES, default="equal_samples")
    p.add_argument("--target-error", type=float)
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.add_argument("--out", "-o", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gain", help="closed-form ISAC gain under sensing dominance")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--x", type=float, help="evaluate 1/(x+1) directly")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_gain)

    p = sub.add_parser("fit", help="fit E = a v^-b to a CSV of (v, E) pairs")
    p.add_argument("csv")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("remark", help="two-task time split over SINR and t_S grids")
    p.add_argument("--sinr-db", default="linspace:0:30:7")
    p.add_argument("--t-s", default="linspace:0.05:0.5:10")
    p.add_argument("--total-time", type=float, default=200.0)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_remark)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse uses 2, which is reserved for infeasible
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    try:
        return args.func(args)
    except InfeasibleTaskError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, ValueError, IsacError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
