"""Command-line front end: experiments as subcommands with CSV/JSON emission,
an on-disk angle-table cache, and a report path that renders figures.

Exit codes: 0 success, 2 parameter validation failure, 3 numeric integrity
violation (Weil bound or realness check tripped).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import counting, satotate
from .counting import SampleSet, Window, deviation_reports
from .kloosterman import (
    MAX_TABLE_PRIME,
    NumericIntegrityError,
    TableSource,
    angle as angle_of,
    kloosterman_sum,
)
from .modmath import euler_phi, is_prime, primes_up_to
from .satotate import AngleWindow

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTEGRITY = 3

MAX_PAIR_BOX = satotate.MAX_PAIR_BOX
MAX_MODULUS = counting.MAX_MODULUS


class UsageError(Exception):
    """Raised on invalid parameter combinations; mapped to exit code 2."""


# ---------------------------------------------------------------------------
# Emission: CSV (header always, LF, UTF-8) or one JSON object per run.
# Floats are formatted at 12 significant digits in both paths.
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _jsonable(value):
    if isinstance(value, float):
        return float(format(value, ".12g"))
    return value


def _render(fmt: str, command: str, params: dict, columns: list[str],
            rows: list[dict], t0: float) -> str:
    if fmt == "json":
        payload = {
            "command": command,
            "params": {k: _jsonable(v) for k, v in params.items()},
            "results": [{c: _jsonable(row.get(c)) for c in columns} for row in rows],
            "elapsed_ms": int((time.perf_counter() - t0) * 1000),
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _emit(args, command: str, params: dict, columns: list[str], rows: list[dict],
          t0: float) -> None:
    text = _render(args.format, command, params, columns, rows, t0)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str, columns: list[str], rows: list[dict]) -> str:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
    return path


# ---------------------------------------------------------------------------
# Shared validation and construction helpers
# ---------------------------------------------------------------------------

def _angle_value(text: str) -> float:
    t = text.strip().lower()
    if t == "pi":
        return math.pi
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")


def _window_arg(args) -> AngleWindow:
    try:
        return AngleWindow(args.alpha, args.beta)
    except ValueError as exc:
        raise UsageError(str(exc))


def _require_prime_arg(p: int) -> None:
    if not is_prime(p):
        raise UsageError(f"p = {p} is not prime")
    if p > MAX_TABLE_PRIME:
        raise UsageError(f"p = {p} exceeds the table cap {MAX_TABLE_PRIME}")


def _check_rs_box(R: int, S: int) -> None:
    if min(R, S) < 1:
        raise UsageError("R and S must be positive")
    if R * S > MAX_PAIR_BOX:
        raise UsageError(f"R*S = {R * S} exceeds the configured cap {MAX_PAIR_BOX}")


def _table_source(args) -> TableSource:
    cache = args.cache_dir or os.environ.get("KLOOSTLAB_CACHE") or None
    method = getattr(args, "method", "convolution")
    return TableSource(method=method, cache_dir=cache)


def _warn_rebuilt(source: TableSource) -> None:
    for p in source.rebuilt:
        print(f"warning: cache file for p={p} was corrupt and has been rebuilt",
              file=sys.stderr)


def _counting_inputs(args) -> tuple[SampleSet, Window]:
    if args.m < 2 or args.m > MAX_MODULUS:
        raise UsageError(f"m must be in [2, {MAX_MODULUS}], got {args.m}")
    if args.X < 1:
        raise UsageError(f"X must be >= 1, got {args.X}")
    if not 1 <= args.Y <= args.m:
        raise UsageError(f"Y must satisfy 1 <= Y <= m, got Y={args.Y}, m={args.m}")
    return SampleSet.full(args.X), Window(args.Z, args.Y, args.m)


# ---------------------------------------------------------------------------
# counts
# ---------------------------------------------------------------------------

COUNTS_COLUMNS = ["m", "X", "Y", "Z", "mode", "variance_sum", "expected_scale",
                  "ratio", "gamma", "exceptional_count", "corollary_scale"]
PER_A_COLUMNS = ["a", "observed", "expected", "deviation", "squared"]


def _counts_rows(args) -> tuple[list[str], list[dict]]:
    X, W = _counting_inputs(args)
    m = args.m
    if args.per_a:
        reports = deviation_reports(m, X, W, args.mode)
        return PER_A_COLUMNS, [
            {"a": r.a, "observed": r.observed, "expected": r.expected,
             "deviation": r.deviation, "squared": r.squared}
            for r in reports
        ]
    if args.mode == "inverse":
        variance = counting.variance_sum_inverse(m, X, W)
    elif args.mode == "multiple":
        variance = counting.variance_sum_multiple(m, X, W)
    else:
        variance = sum(r.squared for r in deviation_reports(m, X, W, args.mode))
    scale = len(X) * (args.X + args.Y)
    if args.mode in ("inverse", "multiple"):
        if not 0.0 < args.gamma < 1.0:
            raise UsageError(f"gamma must lie in (0, 1), got {args.gamma}")
        exceptional = counting.exceptional_count(m, X, W, args.gamma, args.mode)
        corollary = counting.exceptional_scale(m, args.X, args.Y, args.gamma)
    else:
        exceptional = None
        corollary = None
    row = {"m": m, "X": args.X, "Y": args.Y, "Z": args.Z, "mode": args.mode,
           "variance_sum": variance, "expected_scale": scale,
           "ratio": variance / scale if scale else None,
           "gamma": args.gamma if exceptional is not None else None,
           "exceptional_count": exceptional, "corollary_scale": corollary}
    return COUNTS_COLUMNS, [row]


def cmd_counts(args) -> int:
    t0 = time.perf_counter()
    columns, rows = _counts_rows(args)
    params = {"m": args.m, "X": args.X, "Y": args.Y, "Z": args.Z,
              "mode": args.mode, "gamma": args.gamma, "per_a": args.per_a}
    _emit(args, "counts", params, columns, rows, t0)
    return EXIT_OK


# ---------------------------------------------------------------------------
# kloosterman
# ---------------------------------------------------------------------------

def cmd_kloosterman_table(args) -> int:
    t0 = time.perf_counter()
    _require_prime_arg(args.p)
    source = _table_source(args)
    table = source(args.p)
    _warn_rebuilt(source)
    rows = [{"a": a, "K": float(table.values[a - 1]), "psi": float(table.angles[a - 1])}
            for a in range(1, args.p)]
    params = {"p": args.p, "method": table.method}
    _emit(args, "kloosterman table", params, ["a", "K", "psi"], rows, t0)
    return EXIT_OK


def cmd_kloosterman_sum(args) -> int:
    t0 = time.perf_counter()
    _require_prime_arg(args.p)
    K = kloosterman_sum(args.r, args.s, args.p)
    psi = angle_of(K, args.p) if (args.r * args.s) % args.p != 0 else None
    rows = [{"p": args.p, "r": args.r, "s": args.s, "K": K, "psi": psi}]
    params = {"p": args.p, "r": args.r, "s": args.s}
    _emit(args, "kloosterman sum", params, ["p", "r", "s", "K", "psi"], rows, t0)
    return EXIT_OK


# ---------------------------------------------------------------------------
# satotate
# ---------------------------------------------------------------------------

def cmd_satotate_mu(args) -> int:
    t0 = time.perf_counter()
    w = _window_arg(args)
    rows = [{"alpha": w.alpha, "beta": w.beta, "mu": satotate.mu_st(w)}]
    _emit(args, "satotate mu", {"alpha": w.alpha, "beta": w.beta},
          ["alpha", "beta", "mu"], rows, t0)
    return EXIT_OK


def cmd_satotate_discrepancy(args) -> int:
    t0 = time.perf_counter()
    _require_prime_arg(args.p)
    source = _table_source(args)
    table = source(args.p)
    _warn_rebuilt(source)
    d = satotate.discrepancy(args.p, table)
    scale = args.p ** -0.25
    rows = [{"p": args.p, "discrepancy": d, "niederreiter_scale": scale,
             "ratio": d / scale}]
    _emit(args, "satotate discrepancy", {"p": args.p},
          ["p", "discrepancy", "niederreiter_scale", "ratio"], rows, t0)
    return EXIT_OK


def cmd_satotate_qcount(args) -> int:
    t0 = time.perf_counter()
    _require_prime_arg(args.p)
    _check_rs_box(args.R, args.S)
    w = _window_arg(args)
    source = _table_source(args)
    table = source(args.p)
    _warn_rebuilt(source)
    q = satotate.q_count(args.p, args.R, args.S, w, table)
    expected = 4.0 * satotate.mu_st(w) * args.R * args.S
    bound3 = satotate.bound_theorem3(args.p, args.R, args.S)
    dev = q - expected
    rows = [{"p": args.p, "R": args.R, "S": args.S, "alpha": w.alpha, "beta": w.beta,
             "q_count": q, "expected": expected, "deviation": dev,
             "bound3": bound3, "ratio": abs(dev) / bound3}]
    _emit(args, "satotate qcount",
          {"p": args.p, "R": args.R, "S": args.S, "alpha": w.alpha, "beta": w.beta},
          ["p", "R", "S", "alpha", "beta", "q_count", "expected", "deviation",
           "bound3", "ratio"], rows, t0)
    return EXIT_OK


def _parallel_q_sum(primes, R: int, S: int, w: AngleWindow, source, jobs: int) -> int:
    if jobs <= 1:
        return sum(satotate.q_count(p, R, S, w, source(p)) for p in primes)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return sum(pool.map(lambda p: satotate.q_count(p, R, S, w, source(p)), primes))


def cmd_satotate_average(args) -> int:
    t0 = time.perf_counter()
    _check_rs_box(args.R, args.S)
    if args.T < 1:
        raise UsageError(f"T must be >= 1, got {args.T}")
    w = _window_arg(args)
    source = _table_source(args)
    primes = primes_up_to(args.T)
    total = _parallel_q_sum(primes, args.R, args.S, w, source, args.jobs)
    _warn_rebuilt(source)
    Pi = total / (4 * args.R * args.S)
    mu = satotate.mu_st(w)
    prediction = mu * len(primes)
    bound4 = satotate.bound_theorem4(args.R, args.S, args.T)
    dev = Pi - prediction
    rows = [{"R": args.R, "S": args.S, "T": args.T, "alpha": w.alpha, "beta": w.beta,
             "pi_T": len(primes), "mu": mu, "Pi": Pi, "prediction": prediction,
             "deviation": dev, "bound4": bound4, "ratio": abs(dev) / bound4}]
    _emit(args, "satotate average",
          {"R": args.R, "S": args.S, "T": args.T, "alpha": w.alpha, "beta": w.beta},
          ["R", "S", "T", "alpha", "beta", "pi_T", "mu", "Pi", "prediction",
           "deviation", "bound4", "ratio"], rows, t0)
    return EXIT_OK


def cmd_satotate_dispersion(args) -> int:
    t0 = time.perf_counter()
    _check_rs_box(args.R, args.S)
    if args.T < 1:
        raise UsageError(f"T must be >= 1, got {args.T}")
    w = _window_arg(args)
    source = _table_source(args)
    primes = list(primes_up_to(args.T))
    if args.jobs <= 1 or len(primes) < 2 * args.jobs:
        counts = satotate.pair_counts_over(primes, args.R, args.S, w, source)
    else:
        chunks = [primes[i:: args.jobs] for i in range(args.jobs)]
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            partials = list(pool.map(
                lambda ch: satotate.pair_counts_over(ch, args.R, args.S, w, source),
                chunks))
        counts = np.sum(partials, axis=0)
    _warn_rebuilt(source)
    mu = satotate.mu_st(w)
    prediction = mu * len(primes)
    dev = counts.astype(np.float64) - prediction
    Delta = float((dev * dev).sum() / (4 * args.R * args.S))
    Pi = float(counts.sum()) / (4 * args.R * args.S)
    bound5 = satotate.bound_theorem5(args.R, args.S, args.T)
    rows = [{"R": args.R, "S": args.S, "T": args.T, "alpha": w.alpha, "beta": w.beta,
             "pi_T": len(primes), "mu": mu, "Pi": Pi, "Delta": Delta,
             "bound5": bound5, "ratio": Delta / bound5}]
    _emit(args, "satotate dispersion",
          {"R": args.R, "S": args.S, "T": args.T, "alpha": w.alpha, "beta": w.beta},
          ["R", "S", "T", "alpha", "beta", "pi_T", "mu", "Pi", "Delta",
           "bound5", "ratio"], rows, t0)
    return EXIT_OK


# ---------------------------------------------------------------------------
# report: delimited output plus rendered figures in --out-dir
# ---------------------------------------------------------------------------

def _report_paths(args, names: list[str]) -> list[str]:
    os.makedirs(args.out_dir, exist_ok=True)
    return [os.path.join(args.out_dir, n) for n in names]


def cmd_report_counts(args) -> int:
    from . import plotting

    X, W = _counting_inputs(args)
    m = args.m
    reports = deviation_reports(m, X, W, args.mode)
    summary_columns, summary_rows = _counts_rows(
        argparse.Namespace(**{**vars(args), "per_a": False}))
    per_a_rows = [{"a": r.a, "observed": r.observed, "expected": r.expected,
                   "deviation": r.deviation, "squared": r.squared} for r in reports]
    summary_path, per_a_path, fig_path = _report_paths(
        args, ["counts_summary.csv", "counts_per_a.csv", "counts_deviations.png"])
    _write_csv(summary_path, summary_columns, summary_rows)
    _write_csv(per_a_path, PER_A_COLUMNS, per_a_rows)
    threshold = None
    if args.mode == "inverse":
        threshold = args.gamma * (2 * args.X * args.Y * euler_phi(m) / (m * m))
    elif args.mode == "multiple":
        threshold = args.gamma * (2 * args.X * args.Y / m)
    label = f"m={m} X={args.X} Y={args.Y} Z={args.Z} mode={args.mode}"
    plotting.save_deviation_figure(reports, threshold, label, fig_path)
    for path in (summary_path, per_a_path, fig_path):
        print(path)
    return EXIT_OK


def cmd_report_angles(args) -> int:
    from . import plotting

    _require_prime_arg(args.p)
    source = _table_source(args)
    table = source(args.p)
    _warn_rebuilt(source)
    d = satotate.discrepancy(args.p, table)
    scale = args.p ** -0.25
    table_path, summary_path, density_path, cdf_path = _report_paths(
        args, ["angles.csv", "angles_summary.csv", "angle_density.png",
               "angle_cdf.png"])
    _write_csv(table_path, ["a", "K", "psi"],
               [{"a": a, "K": float(table.values[a - 1]), "psi": float(table.angles[a - 1])}
                for a in range(1, args.p)])
    _write_csv(summary_path,
               ["p", "method", "discrepancy", "niederreiter_scale", "ratio"],
               [{"p": args.p, "method": table.method, "discrepancy": d,
                 "niederreiter_scale": scale, "ratio": d / scale}])
    plotting.save_angle_density_figure(table, args.bins, density_path)
    plotting.save_angle_cdf_figure(table, d, cdf_path)
    for path in (table_path, summary_path, density_path, cdf_path):
        print(path)
    return EXIT_OK


def cmd_report_average(args) -> int:
    from . import plotting

    _check_rs_box(args.R, args.S)
    if args.T < 2:
        raise UsageError(f"the convergence report needs at least one prime, so T >= 2; got {args.T}")
    w = _window_arg(args)
    source = _table_source(args)
    mu = satotate.mu_st(w)
    series = []
    running = 0
    count = 0
    for p in primes_up_to(args.T):
        running += satotate.q_count(p, args.R, args.S, w, source(p))
        count += 1
        series.append({"p": p, "q_count": running, "Pi_partial": running / (4 * args.R * args.S),
                       "prediction": mu * count})
    _warn_rebuilt(source)
    stats = series[-1]
    Pi = stats["Pi_partial"]
    prediction = mu * count
    bound4 = satotate.bound_theorem4(args.R, args.S, args.T)
    series_path, summary_path, fig_path = _report_paths(
        args, ["average_series.csv", "average_summary.csv", "average_convergence.png"])
    _write_csv(series_path, ["p", "q_count", "Pi_partial", "prediction"], series)
    _write_csv(summary_path,
               ["R", "S", "T", "alpha", "beta", "pi_T", "mu", "Pi", "prediction",
                "deviation", "bound4", "ratio"],
               [{"R": args.R, "S": args.S, "T": args.T, "alpha": w.alpha,
                 "beta": w.beta, "pi_T": count, "mu": mu, "Pi": Pi,
                 "prediction": prediction, "deviation": Pi - prediction,
                 "bound4": bound4, "ratio": abs(Pi - prediction) / bound4}])
    plotting.save_average_figure(series, fig_path)
    for path in (series_path, summary_path, fig_path):
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format (default csv)")
    common.add_argument("--json", dest="format", action="store_const", const="json",
                        help="shorthand for --format json")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--cache-dir",
                        help="angle-table cache directory (overrides KLOOSTLAB_CACHE)")
    common.add_argument("--jobs", type=int, default=1,
                        help="parallel per-prime workers (default 1)")

    parser = argparse.ArgumentParser(
        prog="kloostlab",
        description="experiments on residue-window counts and Kloosterman angle statistics")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_counts = sub.add_parser("counts", parents=[common],
                              help="window-count deviations, variance sums, exceptional sets")
    p_counts.add_argument("--m", type=int, required=True, help="modulus")
    p_counts.add_argument("--X", type=int, required=True, help="sample interval bound")
    p_counts.add_argument("--Y", type=int, required=True, help="window length")
    p_counts.add_argument("--Z", type=int, default=0, help="window offset (default 0)")
    p_counts.add_argument("--mode", choices=counting.MODES, default="inverse")
    p_counts.add_argument("--gamma", type=float, default=0.5,
                          help="exceptional-set threshold fraction (default 0.5)")
    p_counts.add_argument("--per-a", action="store_true",
                          help="emit one deviation row per residue a")
    p_counts.set_defaults(func=cmd_counts)

    p_kl = sub.add_parser("kloosterman", help="Kloosterman sums and tables")
    kl_sub = p_kl.add_subparsers(dest="kl_command", required=True)
    p_table = kl_sub.add_parser("table", parents=[common], help="full K_{1,a} table")
    p_table.add_argument("--p", type=int, required=True)
    p_table.add_argument("--method", choices=("naive", "convolution"),
                         default="convolution")
    p_table.set_defaults(func=cmd_kloosterman_table)
    p_sum = kl_sub.add_parser("sum", parents=[common], help="one sum K_{r,s}(p)")
    p_sum.add_argument("--p", type=int, required=True)
    p_sum.add_argument("--r", type=int, required=True)
    p_sum.add_argument("--s", type=int, required=True)
    p_sum.set_defaults(func=cmd_kloosterman_sum)

    p_st = sub.add_parser("satotate", help="angle statistics and averaged counts")
    st_sub = p_st.add_subparsers(dest="st_command", required=True)

    def add_window(sp):
        sp.add_argument("--alpha", type=_angle_value, required=True)
        sp.add_argument("--beta", type=_angle_value, required=True)

    p_mu = st_sub.add_parser("mu", parents=[common], help="Sato-Tate mass of a window")
    add_window(p_mu)
    p_mu.set_defaults(func=cmd_satotate_mu)

    p_disc = st_sub.add_parser("discrepancy", parents=[common],
                               help="star discrepancy of the angle table")
    p_disc.add_argument("--p", type=int, required=True)
    p_disc.add_argument("--method", choices=("naive", "convolution"),
                        default="convolution")
    p_disc.set_defaults(func=cmd_satotate_discrepancy)

    p_q = st_sub.add_parser("qcount", parents=[common],
                            help="window pair count over |r|<=R, |s|<=S")
    p_q.add_argument("--p", type=int, required=True)
    p_q.add_argument("--R", type=int, required=True)
    p_q.add_argument("--S", type=int, required=True)
    add_window(p_q)
    p_q.set_defaults(func=cmd_satotate_qcount)

    p_avg = st_sub.add_parser("average", parents=[common],
                              help="averaged prime count over the parameter box")
    p_avg.add_argument("--R", type=int, required=True)
    p_avg.add_argument("--S", type=int, required=True)
    p_avg.add_argument("--T", type=int, required=True)
    add_window(p_avg)
    p_avg.set_defaults(func=cmd_satotate_average)

    p_disp = st_sub.add_parser("dispersion", parents=[common],
                               help="dispersion of per-pair prime counts")
    p_disp.add_argument("--R", type=int, required=True)
    p_disp.add_argument("--S", type=int, required=True)
    p_disp.add_argument("--T", type=int, required=True)
    add_window(p_disp)
    p_disp.set_defaults(func=cmd_satotate_dispersion)

    p_rep = sub.add_parser("report", help="CSV output plus rendered figures")
    rep_sub = p_rep.add_subparsers(dest="report_command", required=True)

    r_counts = rep_sub.add_parser("counts", parents=[common])
    r_counts.add_argument("--m", type=int, required=True)
    r_counts.add_argument("--X", type=int, required=True)
    r_counts.add_argument("--Y", type=int, required=True)
    r_counts.add_argument("--Z", type=int, default=0)
    r_counts.add_argument("--mode", choices=counting.MODES, default="inverse")
    r_counts.add_argument("--gamma", type=float, default=0.5)
    r_counts.add_argument("--out-dir", default=".")
    r_counts.set_defaults(func=cmd_report_counts, per_a=False)

    r_angles = rep_sub.add_parser("angles", parents=[common])
    r_angles.add_argument("--p", type=int, required=True)
    r_angles.add_argument("--method", choices=("naive", "convolution"),
                          default="convolution")
    r_angles.add_argument("--bins", type=int, default=40)
    r_angles.add_argument("--out-dir", default=".")
    r_angles.set_defaults(func=cmd_report_angles)

    r_avg = rep_sub.add_parser("average", parents=[common])
    r_avg.add_argument("--R", type=int, required=True)
    r_avg.add_argument("--S", type=int, required=True)
    r_avg.add_argument("--T", type=int, required=True)
    add_window(r_avg)
    r_avg.add_argument("--out-dir", default=".")
    r_avg.set_defaults(func=cmd_report_average)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericIntegrityError as exc:
        print(f"numeric integrity violation: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
