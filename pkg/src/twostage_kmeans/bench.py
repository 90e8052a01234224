"""Operation-count cost model and the wall-clock benchmark harness.

The harness times plain k-means against the two-stage variant over a grid of
(sample fraction, tolerance) cells and renders the result in the layout of a
speed-up table: tolerances as rows (loosest first), fractions as columns.
"""

from __future__ import annotations

import csv
import io
import json
import platform
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .dataset import BlobSpec, Dataset, generate_blobs, load_csv
from .engine import StageParams
from .two_stage import TwoStageConfig, run_baseline, run_two_stage

INT64_MAX = 2**63 - 1


# --------------------------------------------------------------------------
# cost model


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")


def _checked(total: int) -> int:
    if total > INT64_MAX:
        raise OverflowError(f"distance count {total} exceeds the 64-bit range")
    return total


def predicted_cost(k: int, q: int, n: int) -> int:
    """Distance computations for ``q`` passes of ``k`` centers over ``n`` points."""
    _check_positive(k=k, q=q, n=n)
    return _checked(int(k) * int(q) * int(n))


def predicted_two_stage_cost(k: int, q_fast: int, n_fast: int, q_slow: int, n: int) -> int:
    """Fast-stage cost on ``n_fast`` points plus slow-stage cost on ``n``."""
    _check_positive(k=k, q_fast=q_fast, n_fast=n_fast, q_slow=q_slow, n=n)
    return _checked(int(k) * int(q_fast) * int(n_fast) + int(k) * int(q_slow) * int(n))


def observed_cost(result, n: int, n_fast: int | None = None) -> int:
    """Cost-model prediction with the iteration counts a run actually used.

    Each run makes one assignment pass per iteration plus one final pass,
    so the observed ``q`` is ``result.assign_passes``. Pass ``n_fast`` for a
    two-stage result.
    """
    if n_fast is None:
        return predicted_cost(result.k, result.assign_passes, n)
    return predicted_two_stage_cost(
        result.slow.k, result.fast.assign_passes, n_fast, result.slow.assign_passes, n
    )


# --------------------------------------------------------------------------
# configuration


class BenchConfigError(ValueError):
    """Invalid benchmark configuration; ``key`` names the offending setting."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class BenchConfig:
    """A benchmark grid.

    Exactly one of ``blobs`` and ``data_path`` gives the dataset. Per cell,
    the baseline and the slow stage stop at the cell tolerance; the fast
    stage stops at ``max(fast_tolerance, cell tolerance)``, or at the cell
    tolerance when ``fast_tolerance`` is None.
    """

    k: int
    sample_fractions: tuple = (0.10, 0.15, 0.20, 0.30, 0.40)
    tolerances: tuple = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    repetitions: int = 5
    seed: int = 0
    blobs: BlobSpec | None = None
    data_path: str | None = None
    has_header: bool = False
    fast_tolerance: float | None = 1e-3
    max_iters: int = 300
    n_workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sample_fractions", tuple(float(f) for f in self.sample_fractions))
        object.__setattr__(self, "tolerances", tuple(float(t) for t in self.tolerances))
        if self.k < 1:
            raise BenchConfigError("k", f"must be >= 1, got {self.k}")
        if (self.blobs is None) == (self.data_path is None):
            raise BenchConfigError("data", "give exactly one of a blob spec or a data path")
        if self.repetitions < 1:
            raise BenchConfigError("repetitions", f"must be >= 1, got {self.repetitions}")
        if not self.sample_fractions:
            raise BenchConfigError("fractions", "at least one fraction is required")
        for f in self.sample_fractions:
            if not 0 < f <= 1:
                raise BenchConfigError("fractions", f"{f} is outside (0, 1]")
        if not self.tolerances:
            raise BenchConfigError("tolerances", "at least one tolerance is required")
        if any(t <= 0 for t in self.tolerances):
            raise BenchConfigError("tolerances", "every tolerance must be > 0")
        if any(a <= b for a, b in zip(self.tolerances, self.tolerances[1:])):
            raise BenchConfigError("tolerances", "must be listed in strictly descending order")
        if self.fast_tolerance is not None and self.fast_tolerance <= 0:
            raise BenchConfigError("fast_tolerance", "must be > 0")
        if self.max_iters < 1:
            raise BenchConfigError("max_iters", "must be >= 1")
        if self.n_workers < 1:
            raise BenchConfigError("workers", "must be >= 1")

    def dataset_descriptor(self) -> dict:
        if self.blobs is not None:
            return {"source": "blobs", **asdict(self.blobs)}
        return {"source": "file", "path": str(self.data_path), "has_header": self.has_header}

    def load_dataset(self) -> Dataset:
        if self.blobs is not None:
            return generate_blobs(self.blobs)[0]
        return load_csv(self.data_path, has_header=self.has_header)


def _parse_bool(key, value):
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise BenchConfigError(key, f"expected a boolean, got {value!r}")


def _parse_list(key, value):
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise BenchConfigError(key, f"expected comma-separated numbers, got {value!r}") from None


def _scalar(kind):
    def parse(key, value):
        try:
            return kind(value)
        except ValueError:
            raise BenchConfigError(key, f"expected {kind.__name__}, got {value!r}") from None
    return parse


CONFIG_KEYS = {
    "k": _scalar(int),
    "data": _scalar(str),
    "header": _parse_bool,
    "n": _scalar(int),
    "d": _scalar(int),
    "blob_k": _scalar(int),
    "spread": _scalar(float),
    "separation": _scalar(float),
    "data_seed": _scalar(int),
    "fractions": _parse_list,
    "tolerances": _parse_list,
    "repetitions": _scalar(int),
    "seed": _scalar(int),
    "fast_tolerance": lambda key, v: None if v.lower() == "none" else _scalar(float)(key, v),
    "max_iters": _scalar(int),
    "workers": _scalar(int),
}


def parse_config_lines(text: str) -> dict:
    """Split ``key = value`` lines into a dict of raw strings.

    Blank lines and ``#`` comments are ignored; unknown keys are rejected.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BenchConfigError(line, f"line {lineno} is not of the form key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise BenchConfigError(key, f"unknown key on line {lineno}")
        values[key] = value
    return values


def config_from_mapping(raw: dict) -> BenchConfig:
    """Build a BenchConfig from raw string settings keyed as in ``CONFIG_KEYS``.

    A synthetic dataset is described by ``n`` and ``d`` plus optional
    ``blob_k``, ``spread``, ``separation`` and ``data_seed``; a file by
    ``data`` and ``header``.
    """
    values = {}
    for key, value in raw.items():
        if key not in CONFIG_KEYS:
            raise BenchConfigError(key, "unknown key")
        values[key] = CONFIG_KEYS[key](key, str(value))

    if "k" not in values:
        raise BenchConfigError("k", "missing required key")
    k = values.pop("k")
    blob_keys = {"n", "d", "blob_k", "spread", "separation", "data_seed"}
    blobs = None
    if blob_keys & values.keys():
        for req in ("n", "d"):
            if req not in values:
                raise BenchConfigError(req, "required for a synthetic dataset")
        try:
            blobs = BlobSpec(
                n=values.pop("n"),
                d=values.pop("d"),
                k=values.pop("blob_k", k),
                spread=values.pop("spread", 1.0),
                separation=values.pop("separation", 10.0),
                seed=values.pop("data_seed", values.get("seed", 0)),
            )
        except ValueError as exc:
            raise BenchConfigError("blobs", str(exc)) from None

    kwargs = {"k": k, "blobs": blobs}
    rename = {"data": "data_path", "header": "has_header", "fractions": "sample_fractions",
              "workers": "n_workers"}
    for key, value in values.items():
        kwargs[rename.get(key, key)] = value
    return BenchConfig(**kwargs)


def parse_bench_config(text: str) -> BenchConfig:
    """Build a BenchConfig from the text of a ``key = value`` config file."""
    return config_from_mapping(parse_config_lines(text))


def load_bench_config(path) -> BenchConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_bench_config(fh.read())


# --------------------------------------------------------------------------
# report


@dataclass
class BenchCell:
    fraction: float
    tolerance: float
    median_time_two_stage: float
    median_time_baseline: float
    speedup: float
    fast_iters: float
    slow_iters: float
    baseline_iters: float
    wcss_ratio: float
    two_stage_converged: bool = True
    baseline_converged: bool = True
    fast_empty_clusters: bool = False
    two_stage_times: list = field(default_factory=list)
    baseline_times: list = field(default_factory=list)


@dataclass
class BenchReport:
    cells: list
    machine: dict

    def cell(self, fraction: float, tolerance: float) -> BenchCell:
        for c in self.cells:
            if c.fraction == fraction and c.tolerance == tolerance:
                return c
        raise KeyError((fraction, tolerance))

    @property
    def fractions(self) -> list:
        return sorted({c.fraction for c in self.cells})

    @property
    def tolerances(self) -> list:
        return sorted({c.tolerance for c in self.cells}, reverse=True)

    def to_dict(self) -> dict:
        return {"machine": self.machine, "cells": [asdict(c) for c in self.cells]}

    @classmethod
    def from_dict(cls, data: dict) -> "BenchReport":
        return cls(cells=[BenchCell(**c) for c in data["cells"]], machine=data["machine"])


def machine_descriptor(cfg: BenchConfig, n: int, d: int) -> dict:
    return {
        "workers": cfg.n_workers,
        "dataset": cfg.dataset_descriptor(),
        "n": n,
        "d": d,
        "k": cfg.k,
        "seed": cfg.seed,
        "repetitions": cfg.repetitions,
        "fast_tolerance": cfg.fast_tolerance,
        "max_iters": cfg.max_iters,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "platform": platform.platform(),
        "processor": platform.processor() or platform.machine(),
    }


def _rep_seeds(seed: int, repetitions: int) -> list:
    # one init seed per repetition, shared by the baseline and the two-stage run
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(repetitions)]


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def run_benchmark(cfg: BenchConfig, progress=None) -> BenchReport:
    """Time baseline and two-stage k-means over every (fraction, tolerance) cell.

    Repetition ``r`` gives both variants the same init seed, so both start
    from identical centers. The baseline does not depend on the fraction and
    is timed once per (tolerance, repetition), then shared across that row.
    Only the clustering calls are timed. Cells that did not converge stay in
    the report with their flags cleared.
    """
    ds = cfg.load_dataset()
    seeds = _rep_seeds(cfg.seed, cfg.repetitions)
    cells = []
    for tol in cfg.tolerances:
        params = StageParams(tolerance=tol, max_iters=cfg.max_iters)
        baselines = []
        for s in seeds:
            res, dt = _timed(lambda: run_baseline(ds, cfg.k, params, seed=s, n_workers=cfg.n_workers))
            baselines.append((res, dt))
        fast_tol = tol if cfg.fast_tolerance is None else max(cfg.fast_tolerance, tol)
        for frac in sorted(cfg.sample_fractions):
            tcfg_args = dict(
                k=cfg.k,
                sample_fraction=frac,
                fast=StageParams(tolerance=fast_tol, max_iters=cfg.max_iters),
                slow=params,
            )
            runs = []
            for s in seeds:
                tcfg = TwoStageConfig(seed=s, **tcfg_args)
                res, dt = _timed(lambda: run_two_stage(ds, tcfg, n_workers=cfg.n_workers))
                runs.append((res, dt))
            t_two = [dt for _, dt in runs]
            t_base = [dt for _, dt in baselines]
            cell = BenchCell(
                fraction=frac,
                tolerance=tol,
                median_time_two_stage=float(np.median(t_two)),
                median_time_baseline=float(np.median(t_base)),
                speedup=float(np.median(t_base) / np.median(t_two)),
                fast_iters=float(np.median([r.fast.iters for r, _ in runs])),
                slow_iters=float(np.median([r.slow.iters for r, _ in runs])),
                baseline_iters=float(np.median([b.iters for b, _ in baselines])),
                wcss_ratio=float(np.median(
                    [r.wcss / b.wcss if b.wcss > 0 else 1.0
                     for (r, _), (b, _) in zip(runs, baselines)]
                )),
                two_stage_converged=all(r.converged for r, _ in runs),
                baseline_converged=all(b.converged for b, _ in baselines),
                fast_empty_clusters=any(r.empty_cluster_warning for r, _ in runs),
                two_stage_times=t_two,
                baseline_times=t_base,
            )
            cells.append(cell)
            if progress is not None:
                progress(cell)
    return BenchReport(cells=cells, machine=machine_descriptor(cfg, ds.n, ds.d))


# --------------------------------------------------------------------------
# rendering

CSV_FIELDS = [f.name for f in fields(BenchCell) if not f.name.endswith("_times")]
MACHINE_CSV_FIELDS = ["workers", "seed", "n", "d", "k"]


def _fraction_label(f: float) -> str:
    return f"{100 * f:g}%"


def _two_sig(x: float) -> str:
    return f"{x:#.2g}".rstrip(".")


def _tol_label(t: float) -> str:
    return f"{t:.0e}"


def _render_table(report: BenchReport) -> str:
    fracs, tols = report.fractions, report.tolerances
    lines = [f"# {key}: {json.dumps(value)}" for key, value in report.machine.items()]
    lines.append("# speed-up = median baseline time / median two-stage time")
    header = ["tolerance"] + [_fraction_label(f) for f in fracs]
    rows = []
    for t in tols:
        row = [_tol_label(t)]
        for f in fracs:
            try:
                c = report.cell(f, t)
            except KeyError:
                row.append("-")
                continue
            mark = "" if (c.two_stage_converged and c.baseline_converged) else "*"
            row.append(f"{_two_sig(c.speedup)}{mark}")
        rows.append(row)
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    for r in [header] + rows:
        lines.append("  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip())
    if any(not (c.two_stage_converged and c.baseline_converged) for c in report.cells):
        lines.append("# * a run in this cell hit max_iters")
    return "\n".join(lines) + "\n"


def _render_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS + MACHINE_CSV_FIELDS)
    order = {t: i for i, t in enumerate(report.tolerances)}
    for c in sorted(report.cells, key=lambda c: (order[c.tolerance], c.fraction)):
        d = asdict(c)
        writer.writerow([d[name] for name in CSV_FIELDS]
                        + [report.machine.get(name, "") for name in MACHINE_CSV_FIELDS])
    return buf.getvalue()


def emit_report(report: BenchReport, fmt: str = "table") -> str:
    """Render a report as ``"table"``, ``"json"`` or ``"csv"`` text."""
    if fmt == "table":
        return _render_table(report)
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if fmt == "csv":
        return _render_csv(report)
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report_json(text: str) -> BenchReport:
    return BenchReport.from_dict(json.loads(text))
