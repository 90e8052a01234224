"""Command-line interface.

Subcommands: ``generate`` (synthetic blobs), ``cluster`` (baseline or
two-stage k-means on a CSV), ``bench`` (speed-up grid) and ``trace-plot``
(SVG figures from trace CSVs or bench reports).

Exit codes: 0 success (non-convergence included), 1 usage error, 2 data
error.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
import time
import warnings
from dataclasses import asdict

from . import plots
from .bench import (
    BenchConfigError,
    config_from_mapping,
    emit_report,
    parse_config_lines,
    parse_report_json,
    run_benchmark,
)
from .dataset import (
    BlobSpec,
    DatasetError,
    generate_blobs,
    load_csv,
    save_csv,
    save_labels_csv,
)
from .engine import StageParams, write_trace_csv
from .two_stage import TwoStageConfig, run_baseline, run_two_stage

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(32)
        print(f"seed: {args.seed} (auto-chosen)")
    else:
        print(f"seed: {args.seed}")
    return args.seed


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _out(args, name):
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, f"{args.prefix}{name}")


# --------------------------------------------------------------------------


def cmd_generate(args) -> int:
    seed = _seed(args)
    try:
        spec = BlobSpec(n=args.n, d=args.d, k=args.k, spread=args.spread,
                        separation=args.separation, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print("spec:", json.dumps(asdict(spec)))
    try:
        ds, labels, centers = generate_blobs(spec)
    except DatasetError as exc:
        raise DataError(str(exc)) from None
    paths = [_out(args, ".csv"), _out(args, "_labels.csv"), _out(args, "_centers.csv")]
    save_csv(ds, paths[0])
    save_labels_csv(labels, paths[1])
    save_csv(centers, paths[2])
    for p in paths:
        print("wrote", p)
    return EXIT_OK


def _stage_line(res):
    flag = "converged" if res.converged else "max_iters reached"
    return (f"{res.stage:>8}: iters={res.iters} wcss={res.wcss:.6g} "
            f"distances={res.distance_count} {flag}")


def cmd_cluster(args) -> int:
    try:
        ds = load_csv(args.data, has_header=args.header)
    except DatasetError as exc:
        raise DataError(str(exc)) from None
    if args.k > ds.n:
        raise DataError(f"k={args.k} exceeds the {ds.n} points in {args.data}")
    seed = _seed(args)
    print(f"data: {args.data} n={ds.n} d={ds.d}  mode: {args.mode}  k={args.k}")

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            if args.mode == "baseline":
                params = StageParams(args.tol_slow, args.max_iters)
                t0 = time.perf_counter()
                res = run_baseline(ds, args.k, params, seed=seed, n_workers=args.workers)
                elapsed = time.perf_counter() - t0
                stages, trace = [res], res.trace
                centers, labels, total = res.centers, res.labels, res.wcss
                distances, empty = res.distance_count, res.empty_clusters
            else:
                cfg = TwoStageConfig(
                    k=args.k,
                    sample_fraction=args.fraction,
                    fast=StageParams(args.tol_fast, args.max_iters),
                    slow=StageParams(args.tol_slow, args.max_iters),
                    seed=seed,
                )
                t0 = time.perf_counter()
                res = run_two_stage(ds, cfg, n_workers=args.workers)
                elapsed = time.perf_counter() - t0
                stages, trace = [res.fast, res.slow], res.trace
                centers, labels, total = res.centers, res.labels, res.wcss
                distances, empty = res.distance_count, res.slow.empty_clusters
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    for st in stages:
        print(_stage_line(st))
    for w in caught:
        print(f"warning: {w.message}")
    if empty:
        print(f"warning: final clustering has empty clusters {list(empty)}")
    print(f"wcss: {total!r}")
    print(f"distance computations: {distances}")
    print(f"wall time: {elapsed:.3f} s  workers: {args.workers}")

    save_labels_csv(labels, _out(args, "_labels.csv"))
    save_csv(centers, _out(args, "_centers.csv"))
    write_trace_csv(trace, _out(args, "_trace_centers.csv"), _out(args, "_trace_stats.csv"))
    print("wrote", _out(args, "_{labels,centers,trace_centers,trace_stats}.csv"))
    return EXIT_OK


BENCH_FLAGS = {
    "k": "k", "data": "data", "header": "header", "n": "n", "d": "d", "blob_k": "blob_k",
    "spread": "spread", "separation": "separation", "data_seed": "data_seed",
    "fractions": "fractions", "tolerances": "tolerances", "repetitions": "repetitions",
    "seed": "seed", "fast_tol": "fast_tolerance", "max_iters": "max_iters",
    "workers": "workers",
}


def cmd_bench(args) -> int:
    raw = {}
    try:
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    raw.update(parse_config_lines(fh.read()))
            except OSError as exc:
                raise UsageError(f"cannot read config: {exc}") from None
        for attr, key in BENCH_FLAGS.items():
            value = getattr(args, attr)
            if value is not None:
                raw[key] = str(value)
        if "seed" not in raw:
            raw["seed"] = str(secrets.randbits(32))
            print(f"seed: {raw['seed']} (auto-chosen)")
        cfg = config_from_mapping(raw)
    except BenchConfigError as exc:
        raise UsageError(f"bad bench config: {exc}") from None

    def progress(cell):
        print(f"cell fraction={cell.fraction:g} tolerance={cell.tolerance:g}: "
              f"speedup={cell.speedup:.2g}", flush=True)

    try:
        report = run_benchmark(cfg, progress=progress)
    except DatasetError as exc:
        raise DataError(str(exc)) from None
    table = emit_report(report, "table")
    for fmt, ext in (("json", ".json"), ("csv", ".csv"), ("table", ".txt")):
        with open(_out(args, ext), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(emit_report(report, fmt))
    print(table, end="")
    print("wrote", _out(args, ".{json,csv,txt}"))
    return EXIT_OK


def _parse_dims(text):
    try:
        dims = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated integers, got {text!r}")
    if len(dims) != 2:
        raise argparse.ArgumentTypeError(f"expected two dims, got {text!r}")
    return dims


def cmd_trace_plot(args) -> int:
    try:
        if args.view == "timing":
            reports = []
            for path in args.inputs:
                with open(path, encoding="utf-8") as fh:
                    reports.append(parse_report_json(fh.read()))
            plots.plot_timing(reports, args.output, args.fraction, args.tolerance)
        else:
            if len(args.inputs) != 1:
                raise UsageError(f"view {args.view!r} takes exactly one input file")
            path = args.inputs[0]
            if args.view == "shift":
                plots.plot_shift(plots.read_stats_trace(path), args.output)
            elif args.view == "path":
                plots.plot_center_path(plots.read_center_trace(path), args.output,
                                       dims=args.dims, center=args.center)
            else:
                plots.plot_coordinate(plots.read_center_trace(path), args.output,
                                      center=args.center or 0, dim=args.dim)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(str(exc)) from None
    print("wrote", args.output)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twostage-kmeans",
                     description="Baseline and two-stage k-means clustering tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic Gaussian blob dataset")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--d", type=_positive_int, required=True)
    g.add_argument("--k", type=_positive_int, required=True)
    g.add_argument("--spread", type=float, default=1.0)
    g.add_argument("--separation", type=float, default=10.0)
    g.add_argument("--seed", type=int)
    g.add_argument("--out-dir", default=".")
    g.add_argument("--prefix", default="blobs")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("cluster", help="run baseline or two-stage k-means on a CSV")
    c.add_argument("data")
    c.add_argument("--header", action="store_true", help="skip the first line")
    c.add_argument("--k", type=_positive_int, required=True)
    c.add_argument("--mode", choices=("baseline", "two-stage"), default="two-stage")
    c.add_argument("--fraction", type=float, default=0.10)
    c.add_argument("--tol-fast", type=float, default=1e-3)
    c.add_argument("--tol-slow", type=float, default=1e-6,
                   help="slow-stage tolerance; also the baseline tolerance")
    c.add_argument("--max-iters", type=_positive_int, default=300)
    c.add_argument("--seed", type=int)
    c.add_argument("--workers", type=_positive_int, default=1)
    c.add_argument("--out-dir", default=".")
    c.add_argument("--prefix", default="result")
    c.set_defaults(func=cmd_cluster)

    b = sub.add_parser("bench", help="time baseline vs two-stage over a grid")
    b.add_argument("--config", help="key = value config file; flags override it")
    b.add_argument("--k", type=int)
    b.add_argument("--data")
    b.add_argument("--header", choices=("true", "false"))
    b.add_argument("--n", type=int)
    b.add_argument("--d", type=int)
    b.add_argument("--blob-k", type=int)
    b.add_argument("--spread", type=float)
    b.add_argument("--separation", type=float)
    b.add_argument("--data-seed", type=int)
    b.add_argument("--fractions", help="comma-separated, e.g. 0.1,0.15,0.2")
    b.add_argument("--tolerances", help="comma-separated, descending, e.g. 1e-1,1e-2")
    b.add_argument("--repetitions", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--fast-tol", help="fast-stage tolerance floor, or 'none'")
    b.add_argument("--max-iters", type=int)
    b.add_argument("--workers", type=int)
    b.add_argument("--out-dir", default=".")
    b.add_argument("--prefix", default="bench")
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("trace-plot", help="render an SVG from a trace CSV or bench reports")
    t.add_argument("inputs", nargs="+",
                   help="coordinate trace CSV (coordinate, path), stats trace CSV (shift), "
                        "or bench JSON reports (timing)")
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--view", choices=("coordinate", "path", "shift", "timing"),
                   default="coordinate")
    t.add_argument("--center", type=int)
    t.add_argument("--dim", type=int, default=0)
    t.add_argument("--dims", type=_parse_dims, default=(0, 1))
    t.add_argument("--fraction", type=float)
    t.add_argument("--tolerance", type=float)
    t.set_defaults(func=cmd_trace_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
