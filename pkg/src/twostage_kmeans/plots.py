"""Static SVG plots of clustering traces and benchmark timings."""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .engine import CENTER_TRACE_HEADER, STATS_TRACE_HEADER  # noqa: E402

STAGE_STYLE = {
    "fast": dict(color="tab:blue", marker="s", label="fast stage"),
    "slow": dict(color="tab:red", marker="D", label="slow stage"),
    "baseline": dict(color="black", marker="o", label="k-means"),
}
# fixed ids and no timestamp, so identical input gives identical bytes
_RC = {"svg.hashsalt": "twostage-kmeans", "svg.fonttype": "path"}


class TraceError(ValueError):
    pass


def _read_rows(path, header, converters):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or ",".join(first) != header:
            raise TraceError(f"{path}: expected header {header!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(converters):
                raise TraceError(f"{path}: line {lineno} has {len(row)} fields")
            try:
                rows.append(tuple(conv(v) for conv, v in zip(converters, row)))
            except ValueError:
                raise TraceError(f"{path}: bad value on line {lineno}") from None
    if not rows:
        raise TraceError(f"{path}: trace is empty")
    return rows


def read_center_trace(path):
    """Rows of (stage, iteration, center_id, dim, value)."""
    return _read_rows(path, CENTER_TRACE_HEADER, (str, int, int, int, float))


def read_stats_trace(path):
    """Rows of (stage, iteration, wcss, max_shift)."""
    return _read_rows(path, STATS_TRACE_HEADER, (str, int, float, float))


def _stages(rows):
    seen = []
    for r in rows:
        if r[0] not in seen:
            seen.append(r[0])
    return seen


def coordinate_series(rows, center: int, dim: int) -> dict:
    """Per-stage (x, y) series for one center coordinate.

    x counts iterations across stages. Each later stage is prefixed with
    the previous stage's last point, so the hand-off is a shared point.
    """
    n_centers = 1 + max(r[2] for r in rows)
    n_dims = 1 + max(r[3] for r in rows)
    if not 0 <= center < n_centers:
        raise TraceError(f"center {center} out of range [0, {n_centers})")
    if not 0 <= dim < n_dims:
        raise TraceError(f"dim {dim} out of range [0, {n_dims})")
    series = {}
    offset = 0
    last = None
    for stage in _stages(rows):
        pts = sorted((r[1], r[4]) for r in rows if r[0] == stage and r[2] == center and r[3] == dim)
        x = [offset + it for it, _ in pts]
        y = [v for _, v in pts]
        if last is not None:
            x, y = [last[0]] + x, [last[1]] + y
        series[stage] = (np.array(x, dtype=float), np.array(y))
        offset = x[-1]
        last = (x[-1], y[-1])
    return series


def _save(fig, out):
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_coordinate(rows, out, center: int = 0, dim: int = 0):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        for stage, (x, y) in coordinate_series(rows, center, dim).items():
            ax.plot(x, y, linewidth=1.2, markersize=3, **STAGE_STYLE[stage])
        ax.set_xlabel("iteration")
        ax.set_ylabel(f"center {center}, coordinate {dim}")
        ax.legend()
        _save(fig, out)


def plot_center_path(rows, out, dims=(0, 1), center: int | None = None):
    n_dims = 1 + max(r[3] for r in rows)
    n_centers = 1 + max(r[2] for r in rows)
    if len(dims) != 2 or not all(0 <= j < n_dims for j in dims):
        raise TraceError(f"dims {dims} out of range [0, {n_dims})")
    centers = range(n_centers) if center is None else [center]
    if center is not None and not 0 <= center < n_centers:
        raise TraceError(f"center {center} out of range [0, {n_centers})")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        for c in centers:
            xs = coordinate_series(rows, c, dims[0])
            ys = coordinate_series(rows, c, dims[1])
            for stage in xs:
                style = dict(STAGE_STYLE[stage])
                if c != centers[0]:
                    style.pop("label")
                ax.plot(xs[stage][1], ys[stage][1], linewidth=0.8, markersize=4,
                        markerfacecolor="none", **style)
        ax.set_xlabel(f"coordinate {dims[0]}")
        ax.set_ylabel(f"coordinate {dims[1]}")
        ax.legend()
        _save(fig, out)


def plot_shift(stats_rows, out):
    """Largest squared center shift per iteration on a log axis."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        offset = 0
        for stage in _stages(stats_rows):
            pts = sorted((r[1], r[3]) for r in stats_rows if r[0] == stage)
            x = np.array([offset + it for it, _ in pts], dtype=float)
            y = np.array([v for _, v in pts])
            keep = y > 0  # a zero shift has no place on a log axis
            ax.plot(x[keep], y[keep], linewidth=1.2, markersize=3, **STAGE_STYLE[stage])
            offset = int(x[-1])
        ax.set_yscale("log")
        ax.set_xlabel("iteration")
        ax.set_ylabel("max squared center shift")
        ax.legend()
        _save(fig, out)


def timing_series(reports, fraction=None, tolerance=None):
    """(n, baseline seconds, two-stage seconds) per report, sorted by n."""
    out = []
    for rep in reports:
        if fraction is None and tolerance is None:
            cell = rep.cells[0]
        else:
            f = rep.fractions[0] if fraction is None else fraction
            t = rep.tolerances[-1] if tolerance is None else tolerance
            cell = rep.cell(f, t)
        out.append((rep.machine["n"], cell.median_time_baseline, cell.median_time_two_stage))
    return sorted(out)


def plot_timing(reports, out, fraction=None, tolerance=None):
    data = timing_series(reports, fraction, tolerance)
    if not data:
        raise TraceError("no benchmark reports given")
    n, base, two = (np.array(v) for v in zip(*data))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(n, base, "o", color="tab:red", label="k-means")
        ax.plot(n, two, "o", color="tab:blue", label="two-stage k-means")
        ax.set_xlabel("points")
        ax.set_ylabel("median wall time (s)")
        ax.legend()
        _save(fig, out)
