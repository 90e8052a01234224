"""Lloyd's k-means: assignment, center update, WCSS and the iteration loop.

All distances are squared Euclidean, so tolerances are in squared feature
units. Large point sets are processed in fixed-size chunks; partial results
are always combined in ascending chunk order, which makes every output
bitwise identical whatever the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .dataset import as_points

CHUNK_SIZE = 1 << 15
STAGES = ("fast", "slow", "baseline")


@dataclass(frozen=True)
class StageParams:
    """Stopping rule for one Lloyd run.

    The run stops once the largest squared center shift of an iteration is
    ``<= tolerance``, or after ``max_iters`` iterations.
    """

    tolerance: float = 1e-6
    max_iters: int = 300

    def __post_init__(self):
        if not self.tolerance >= 0:
            raise ValueError(f"tolerance must be >= 0, got {self.tolerance}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")


@dataclass(frozen=True)
class IterationRecord:
    """One traced Lloyd iteration.

    ``start_centers`` are the centers the points were assigned to and
    ``centers`` the means computed from that assignment. ``wcss`` is the
    within-cluster sum of squares of that assignment against
    ``start_centers``.
    """

    stage: str
    iteration: int
    start_centers: np.ndarray
    centers: np.ndarray
    wcss: float
    max_shift: float
    n_empty: int = 0


@dataclass
class ClusterResult:
    centers: np.ndarray
    labels: np.ndarray
    wcss: float
    iters: int
    converged: bool
    trace: list = field(default_factory=list)
    stage: str = "baseline"
    distance_count: int = 0
    empty_clusters: tuple = ()

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def assign_passes(self) -> int:
        """Assignment passes made: one per iteration plus the final relabel."""
        return self.iters + 1


class DistanceCounter:
    """Counts point-to-center distance evaluations."""

    def __init__(self):
        self.count = 0

    def add(self, m: int) -> None:
        self.count += int(m)


# --------------------------------------------------------------------------
# chunked helpers


def _chunks(n: int):
    return [(s, min(s + CHUNK_SIZE, n)) for s in range(0, n, CHUNK_SIZE)]


def _map_chunks(fn, n: int, n_workers: int):
    chunks = _chunks(n)
    if n_workers <= 1 or len(chunks) == 1:
        return [fn(s, e) for s, e in chunks]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(lambda se: fn(*se), chunks))


def _check_centers(pts: np.ndarray, centers) -> np.ndarray:
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    if centers.ndim != 2 or centers.shape[0] < 1:
        raise ValueError(f"centers must have shape (k, d) with k >= 1, got {centers.shape}")
    if centers.shape[1] != pts.shape[1]:
        raise ValueError(
            f"dimension mismatch: data has d={pts.shape[1]}, centers have d={centers.shape[1]}"
        )
    if not np.all(np.isfinite(centers)):
        raise ValueError("centers contain NaN or infinite values")
    return centers


def _check_labels(pts: np.ndarray, labels, k: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (pts.shape[0],):
        raise ValueError(f"labels must have shape ({pts.shape[0]},), got {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    return labels.astype(np.intp, copy=False)


@njit(nogil=True, cache=True)
def _assign_kernel(x, centers, labels, accumulate, sums, counts):
    # Distances are summed over dimensions in ascending order; strict "<"
    # keeps the lowest index on ties. Returns the chunk's WCSS.
    m, d = x.shape
    k = centers.shape[0]
    total = 0.0
    for i in range(m):
        best = 0
        best_d = 0.0
        for c in range(k):
            acc = 0.0
            for j in range(d):
                diff = x[i, j] - centers[c, j]
                acc += diff * diff
            if c == 0 or acc < best_d:
                best = c
                best_d = acc
        labels[i] = best
        total += best_d
        if accumulate:
            counts[best] += 1
            for j in range(d):
                sums[best, j] += x[i, j]
    return total


@njit(nogil=True, cache=True)
def _sums_kernel(x, labels, sums, counts):
    m, d = x.shape
    for i in range(m):
        lab = labels[i]
        counts[lab] += 1
        for j in range(d):
            sums[lab, j] += x[i, j]


@njit(nogil=True, cache=True)
def _wcss_kernel(x, centers, labels):
    m, d = x.shape
    total = 0.0
    for i in range(m):
        for j in range(d):
            diff = x[i, j] - centers[labels[i], j]
            total += diff * diff
    return total


def _assign(pts, centers, n_workers=1, counter=None, accumulate=False):
    """Label every point; optionally also gather per-cluster sums and counts.

    Returns ``(labels, wcss, sums, counts)``; the last two are None unless
    ``accumulate`` is set.
    """
    k, d = centers.shape
    n = pts.shape[0]
    labels = np.empty(n, dtype=np.intp)

    def work(start, stop):
        sums = np.zeros((k, d))
        counts = np.zeros(k, dtype=np.int64)
        cost = _assign_kernel(pts[start:stop], centers, labels[start:stop],
                              accumulate, sums, counts)
        return cost, sums, counts

    parts = _map_chunks(work, n, n_workers)
    if counter is not None:
        counter.add(k * n)
    total = 0.0
    sums = np.zeros((k, d)) if accumulate else None
    counts = np.zeros(k, dtype=np.int64) if accumulate else None
    for cost, s, c in parts:
        total += cost
        if accumulate:
            sums += s
            counts += c
    return labels, total, sums, counts


def _cluster_sums(pts, labels, k, n_workers=1):
    d = pts.shape[1]

    def work(start, stop):
        sums = np.zeros((k, d))
        counts = np.zeros(k, dtype=np.int64)
        _sums_kernel(pts[start:stop], labels[start:stop], sums, counts)
        return sums, counts

    sums = np.zeros((k, d))
    counts = np.zeros(k, dtype=np.int64)
    for s, c in _map_chunks(work, pts.shape[0], n_workers):
        sums += s
        counts += c
    return sums, counts


def _max_shift(old: np.ndarray, new: np.ndarray) -> float:
    diff = new - old
    return float(np.max(np.einsum("ij,ij->i", diff, diff)))


# --------------------------------------------------------------------------
# public operations


def squared_distance(x, c) -> float:
    """Squared Euclidean distance between two vectors."""
    x = np.asarray(x, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if x.shape != c.shape or x.ndim != 1:
        raise ValueError(f"dimension mismatch: {x.shape} vs {c.shape}")
    diff = x - c
    return float(np.dot(diff, diff))


def assign_points(ds, centers, n_workers: int = 1, counter=None) -> np.ndarray:
    """Label each point with the index of its nearest center.

    Ties go to the lowest center index.
    """
    pts = as_points(ds)
    centers = _check_centers(pts, centers)
    return _assign(pts, centers, n_workers, counter)[0]


def update_centers(ds, labels, k: int, prev, n_workers: int = 1) -> np.ndarray:
    """Mean of each cluster's points.

    A cluster with no points keeps its previous center, so ``k`` stays
    fixed.
    """
    pts = as_points(ds)
    prev = _check_centers(pts, prev)
    if prev.shape[0] != k:
        raise ValueError(f"prev has {prev.shape[0]} centers, expected {k}")
    labels = _check_labels(pts, labels, k)
    sums, counts = _cluster_sums(pts, labels, k, n_workers)
    new = prev.copy()
    alive = counts > 0
    new[alive] = sums[alive] / counts[alive, None]
    return new


def wcss(ds, centers, labels, n_workers: int = 1) -> float:
    """Within-cluster sum of squared distances to the assigned centers."""
    pts = as_points(ds)
    centers = _check_centers(pts, centers)
    labels = _check_labels(pts, labels, centers.shape[0])

    def work(start, stop):
        return _wcss_kernel(pts[start:stop], centers, labels[start:stop])

    total = 0.0
    for part in _map_chunks(work, pts.shape[0], n_workers):
        total += float(part)
    return total


def _step(pts, centers, n_workers, counter):
    labels, cost, sums, counts = _assign(pts, centers, n_workers, counter, accumulate=True)
    new = centers.copy()
    alive = counts > 0
    new[alive] = sums[alive] / counts[alive, None]
    return new, labels, _max_shift(centers, new), cost, int(np.sum(~alive))


def lloyd_step(ds, centers, n_workers: int = 1, counter=None):
    """One assign-then-update iteration.

    Returns
    -------
    new_centers : ndarray of shape (k, d)
    labels : ndarray of shape (n,)
        Assignment to the *input* centers.
    max_shift : float
        Largest squared distance any center moved.
    """
    pts = as_points(ds)
    centers = _check_centers(pts, centers)
    new, labels, shift, _, _ = _step(pts, centers, n_workers, counter)
    return new, labels, shift


def run_lloyd(ds, init, params: StageParams = StageParams(), stage: str = "baseline",
              n_workers: int = 1) -> ClusterResult:
    """Iterate Lloyd steps from ``init`` until the center shift is small.

    Every iteration is recorded in the returned trace. Hitting
    ``params.max_iters`` is not an error; the result is flagged with
    ``converged=False``. The returned labels and WCSS come from a final
    assignment against the returned centers.
    """
    if stage not in STAGES:
        raise ValueError(f"stage must be one of {STAGES}, got {stage!r}")
    pts = as_points(ds)
    centers = _check_centers(pts, init).copy()
    counter = DistanceCounter()
    trace = []
    converged = False
    it = 0
    for it in range(1, params.max_iters + 1):
        new, _, shift, cost, n_empty = _step(pts, centers, n_workers, counter)
        trace.append(IterationRecord(stage, it, centers, new, cost, shift, n_empty))
        centers = new
        if shift <= params.tolerance:
            converged = True
            break

    labels, cost, _, _ = _assign(pts, centers, n_workers, counter)
    counts = np.bincount(labels, minlength=centers.shape[0])
    return ClusterResult(
        centers=centers,
        labels=labels,
        wcss=cost,
        iters=it,
        converged=converged,
        trace=trace,
        stage=stage,
        distance_count=counter.count,
        empty_clusters=tuple(int(c) for c in np.flatnonzero(counts == 0)),
    )


# --------------------------------------------------------------------------
# trace export

CENTER_TRACE_HEADER = "stage,iteration,center_id,dim,value"
STATS_TRACE_HEADER = "stage,iteration,wcss,max_shift"


def write_trace_csv(trace, centers_path, stats_path) -> None:
    """Export a trace as two CSV files.

    ``centers_path`` gets one row per (iteration, center, dimension) holding
    the centers *after* that iteration's update; ``stats_path`` gets one row
    per iteration.
    """
    with open(centers_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CENTER_TRACE_HEADER + "\n")
        for rec in trace:
            for c, row in enumerate(rec.centers.tolist()):
                for j, v in enumerate(row):
                    fh.write(f"{rec.stage},{rec.iteration},{c},{j},{v!r}\n")
    with open(stats_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(STATS_TRACE_HEADER + "\n")
        for rec in trace:
            fh.write(f"{rec.stage},{rec.iteration},{rec.wcss!r},{rec.max_shift!r}\n")
