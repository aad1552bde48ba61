"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 numerical gate failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .approx import approx_cov, approx_matrix, approx_report, heuristic_cov, rms_lines
from .design import DesignMatrix, equispaced, format_csv, load_csv, polynomial_design
from .errors import (
    DegenerateDenominator,
    DomainError,
    IndexOutOfRange,
    InterceptMissing,
    InvalidConfig,
    InvalidCount,
    InvalidRange,
    IoError,
    ParseError,
    RankDeficient,
    RankDistortionError,
    SameIndex,
    TieDetected,
)
from .exact import _require_tie_free, exact_cov, exact_matrix, exact_var
from .montecarlo import SimulationConfig, simulate
from .projection import compute_hat_matrix

EXIT_OK, EXIT_USAGE, EXIT_GATE, EXIT_IO = 0, 1, 2, 3
Z_LIMIT = 4.0

_EXIT_FOR = (
    ((ParseError, IoError), EXIT_IO),
    ((InvalidCount, InvalidRange, InvalidConfig, IndexOutOfRange, SameIndex), EXIT_USAGE),
    ((RankDeficient, TieDetected, DegenerateDenominator, DomainError, InterceptMissing), EXIT_GATE),
)


class UsageError(Exception):
    pass


def parse_input(spec: str) -> DesignMatrix:
    """Resolve ``poly:<n>:<degree>[:<a>:<b>]`` or a CSV path to a design."""
    if spec.startswith("poly:"):
        parts = spec.split(":")[1:]
        if len(parts) not in (2, 4):
            raise UsageError(f"bad builder spec {spec!r}; expected poly:<n>:<degree>[:<a>:<b>]")
        try:
            n, degree = int(parts[0]), int(parts[1])
            a, b = (float(parts[2]), float(parts[3])) if len(parts) == 4 else (0.0, 1.0)
        except ValueError:
            raise UsageError(f"bad builder spec {spec!r}") from None
        return polynomial_design(equispaced(n, a, b), degree)
    return load_csv(spec)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, (int, np.integer)) else repr(float(v)) for v in row])
    return buf.getvalue()


def _json(payload: dict, args) -> str:
    payload = dict(payload)
    payload["provenance"] = {
        "subcommand": args.command,
        "input": args.input,
        "flags": {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "input", "output")},
        "seed": getattr(args, "seed", None),
        "version": __version__,
    }
    return json.dumps(payload, indent=1, allow_nan=True) + "\n"


def _fmt(args, default: str) -> str:
    return args.format or default


def cmd_hat(args):
    hat = compute_hat_matrix(parse_input(args.input))
    if _fmt(args, "csv") == "json":
        return _json({"n": hat.n, "p": hat.p, "eta": hat.eta, "H": hat.entries.tolist(),
                      "leverages": hat.leverages.tolist()}, args), EXIT_OK
    return format_csv(hat.entries), EXIT_OK


def cmd_exact(args):
    hat = compute_hat_matrix(parse_input(args.input))
    if args.i is not None or args.j is not None:
        i = args.i if args.i is not None else args.j
        j = args.j if args.j is not None else i
        value = exact_var(hat, i) if i == j else exact_cov(hat, i, j)
        if _fmt(args, "csv") == "json":
            return _json({"n": hat.n, "i": i, "j": j, "value": value}, args), EXIT_OK
        return format_csv([[value]]), EXIT_OK
    dm = exact_matrix(hat, workers=args.workers)
    if _fmt(args, "csv") == "json":
        return _json(dm.to_dict(), args), EXIT_OK
    return format_csv(dm.cov), EXIT_OK


def cmd_approx(args):
    hat = compute_hat_matrix(parse_input(args.input))
    report = approx_report(hat)
    if _fmt(args, "csv") == "json":
        return _json(report.to_dict(), args), EXIT_OK
    rows = zip(range(1, hat.n + 1), hat.leverages, report.rms_with_intercept, report.rms_raw)
    return _rows_csv(["i", "leverage", "rms_line1", "rms_line2"], rows), EXIT_OK


def cmd_simulate(args):
    design = parse_input(args.input)
    cfg = SimulationConfig(design, args.reps, seed=args.seed, sigma=args.sigma)
    result = simulate(cfg, workers=args.workers)
    if _fmt(args, "json") == "json":
        return _json(result.to_dict(), args), EXIT_OK
    return format_csv(result.mean_cov), EXIT_OK


def figure_rows(hat):
    _require_tie_free(hat)
    rms_exact = np.sqrt(np.maximum([exact_var(hat, i) for i in range(1, hat.n + 1)], 0.0))
    lines = rms_lines(hat)
    return list(zip(range(1, hat.n + 1), hat.leverages, rms_exact, lines.with_intercept, lines.raw))


FIGURE_HEADER = ["i", "leverage", "rms_exact", "rms_line1", "rms_line2"]


def cmd_figure(args):
    hat = compute_hat_matrix(parse_input(args.input))
    rows = figure_rows(hat)
    if _fmt(args, "csv") == "json":
        cols = list(zip(*rows))
        payload = {"n": hat.n, **{h: [float(v) for v in c] for h, c in zip(FIGURE_HEADER, cols)}}
        payload["i"] = list(range(1, hat.n + 1))
        return _json(payload, args), EXIT_OK
    return _rows_csv(FIGURE_HEADER, rows), EXIT_OK


def z_score(exact: float, mean: float, se: float) -> float:
    diff = exact - mean
    if se > 0:
        return diff / se
    return 0.0 if abs(diff) <= 1e-9 else math.copysign(math.inf, diff)


def compare_rows(hat, result, pairs):
    dm = exact_matrix(hat, workers=None)
    approx = approx_matrix(hat)
    rows = []
    for i, j in pairs:
        ex = dm.cov[i - 1, j - 1]
        mean = result.mean_cov[i - 1, j - 1]
        se = result.se_cov[i - 1, j - 1]
        rows.append((i, j, ex, approx[i - 1, j - 1], heuristic_cov(hat, i, j), mean, se,
                     z_score(ex, mean, se)))
    return rows


COMPARE_HEADER = ["i", "j", "exact", "approx", "heuristic", "mc_mean", "mc_se", "z"]


def cmd_compare(args):
    design = parse_input(args.input)
    hat = compute_hat_matrix(design)
    _require_tie_free(hat)
    n = hat.n
    if args.i is not None or args.j is not None:
        i = args.i if args.i is not None else args.j
        j = args.j if args.j is not None else i
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexOutOfRange(f"index outside 1..{n}")
        pairs = [(i, j)]
    else:
        pairs = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    cfg = SimulationConfig(design, args.reps, seed=args.seed)
    result = simulate(cfg, workers=args.workers, hat=hat)
    rows = compare_rows(hat, result, pairs)
    max_z = max(abs(r[-1]) for r in rows)
    status = EXIT_OK if max_z <= Z_LIMIT else EXIT_GATE
    if status != EXIT_OK:
        print(f"rankdistort: |z| = {max_z:.2f} exceeds {Z_LIMIT}", file=sys.stderr)
    if _fmt(args, "csv") == "json":
        payload = {"n": n, "replications": args.reps, "tie_events": result.tie_events,
                   "max_abs_z": max_z, "rows": [dict(zip(COMPARE_HEADER, map(_plain, r))) for r in rows]}
        return _json(payload, args), status
    return _rows_csv(COMPARE_HEADER, rows), status


def _plain(v):
    return int(v) if isinstance(v, (int, np.integer)) else float(v)


COMMANDS = {
    "hat": cmd_hat,
    "exact": cmd_exact,
    "approx": cmd_approx,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "figure": cmd_figure,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankdistort",
        description="Rank distortions between regression errors and least-squares residuals.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("input", help="CSV design file or builder spec poly:<n>:<degree>[:<a>:<b>]")
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--workers", type=int, default=None)
        if name in ("exact", "compare"):
            p.add_argument("--i", type=int)
            p.add_argument("--j", type=int)
        if name in ("simulate", "compare"):
            p.add_argument("--reps", type=int, default=200_000 if name == "compare" else 10_000)
            p.add_argument("--seed", type=int, default=0)
        if name == "simulate":
            p.add_argument("--sigma", type=float, default=1.0)
    return parser


def _exit_code(exc: Exception) -> int:
    for types, code in _EXIT_FOR:
        if isinstance(exc, types):
            return code
    return EXIT_GATE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        text, status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rankdistort: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RankDistortionError as exc:
        print(f"rankdistort: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"rankdistort: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
