"""Two-stage k-means: a fast Lloyd run on a random sample, then a slow run
on the full data starting from the sample's centers."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dataset import Dataset, as_points
from .engine import ClusterResult, StageParams, run_lloyd


class EmptyClusterWarning(UserWarning):
    """The fast stage finished with at least one cluster holding no points."""


def _permutation(n: int, seed) -> np.ndarray:
    # Single source of randomness for both sampling and seeding: the sample
    # is a prefix of this permutation and the initial centers a shorter
    # prefix, so a baseline run with the same seed starts from the same
    # centers as the fast stage.
    return np.random.default_rng(seed).permutation(n)


def sample_size(n: int, fraction: float) -> int:
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    return int(math.floor(fraction * n))


def sample_subset(ds, fraction: float, seed):
    """Uniform sample of ``floor(fraction * n)`` points without replacement.

    Returns the sub-dataset and its sorted row indices in ``ds``.
    """
    ds = ds if isinstance(ds, Dataset) else Dataset(ds)
    m = sample_size(ds.n, fraction)
    if m < 1:
        raise ValueError(f"fraction {fraction} of {ds.n} points selects no points")
    idx = np.sort(_permutation(ds.n, seed)[:m])
    return ds.subset(idx), idx


def init_centers_random(ds, k: int, seed, allow_duplicates: bool = False) -> np.ndarray:
    """Pick ``k`` distinct dataset rows as initial centers.

    Raises if the rows picked are not distinct points, unless
    ``allow_duplicates`` is set; duplicate centers leave a cluster empty
    from the first iteration.
    """
    pts = as_points(ds)
    n = pts.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < k:
        raise ValueError(f"need at least k={k} points, dataset has {n}")
    centers = pts[_permutation(n, seed)[:k]].copy()
    if not allow_duplicates and np.unique(centers, axis=0).shape[0] < k:
        raise ValueError(
            "initial centers contain duplicate points; the dataset has fewer than "
            "k distinct points near this draw (pass allow_duplicates=True to accept)"
        )
    return centers


@dataclass(frozen=True)
class TwoStageConfig:
    """Settings for :func:`run_two_stage`.

    Defaults follow the published setup: a 10% sample, fast-stage
    tolerance 1e-3 and slow-stage tolerance 1e-6 (squared shift units).
    """

    k: int
    sample_fraction: float = 0.10
    fast: StageParams = StageParams(tolerance=1e-3)
    slow: StageParams = StageParams(tolerance=1e-6)
    seed: int = 0
    allow_duplicates: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0 < self.sample_fraction <= 1:
            raise ValueError(f"sample_fraction must lie in (0, 1], got {self.sample_fraction}")
        if self.fast.tolerance < self.slow.tolerance:
            raise ValueError(
                f"fast tolerance {self.fast.tolerance} is tighter than slow "
                f"tolerance {self.slow.tolerance}"
            )


@dataclass
class TwoStageResult:
    fast: ClusterResult
    slow: ClusterResult
    sample_indices: np.ndarray
    warnings: list = field(default_factory=list)

    @property
    def centers(self) -> np.ndarray:
        return self.slow.centers

    @property
    def labels(self) -> np.ndarray:
        return self.slow.labels

    @property
    def wcss(self) -> float:
        return self.slow.wcss

    @property
    def trace(self) -> list:
        return self.fast.trace + self.slow.trace

    @property
    def distance_count(self) -> int:
        return self.fast.distance_count + self.slow.distance_count

    @property
    def converged(self) -> bool:
        return self.fast.converged and self.slow.converged

    @property
    def empty_cluster_warning(self) -> bool:
        return bool(self.fast.empty_clusters)


def run_two_stage(ds, cfg: TwoStageConfig, n_workers: int = 1) -> TwoStageResult:
    """Cluster ``ds`` with a fast stage on a sample and a slow stage on all of it.

    The fast stage starts from ``k`` random rows of the sample; the slow
    stage starts from exactly the fast stage's final centers. If the fast
    stage ends with empty clusters an :class:`EmptyClusterWarning` is issued
    and recorded on the result; the slow stage still runs.
    """
    ds = ds if isinstance(ds, Dataset) else Dataset(ds)
    if ds.n < cfg.k:
        raise ValueError(f"need at least k={cfg.k} points, dataset has {ds.n}")
    m = sample_size(ds.n, cfg.sample_fraction)
    if m < cfg.k:
        raise ValueError(
            f"sample of {m} points (fraction {cfg.sample_fraction} of {ds.n}) "
            f"cannot seed k={cfg.k} centers"
        )

    perm = _permutation(ds.n, cfg.seed)
    idx = np.sort(perm[:m])
    sample = ds.points[idx]
    init = ds.points[perm[: cfg.k]].copy()
    if not cfg.allow_duplicates and np.unique(init, axis=0).shape[0] < cfg.k:
        raise ValueError("initial centers contain duplicate points")

    fast = run_lloyd(sample, init, cfg.fast, stage="fast", n_workers=n_workers)
    notes = []
    if fast.empty_clusters:
        msg = f"fast stage ended with empty clusters {list(fast.empty_clusters)}"
        warnings.warn(msg, EmptyClusterWarning, stacklevel=2)
        notes.append(msg)
    slow = run_lloyd(ds, fast.centers, cfg.slow, stage="slow", n_workers=n_workers)
    return TwoStageResult(fast=fast, slow=slow, sample_indices=idx, warnings=notes)


def run_baseline(ds, k: int, params: StageParams = StageParams(), seed=0,
                 n_workers: int = 1, allow_duplicates: bool = False) -> ClusterResult:
    """Plain Lloyd k-means on the full data from random dataset rows."""
    init = init_centers_random(ds, k, seed, allow_duplicates=allow_duplicates)
    return run_lloyd(ds, init, params, stage="baseline", n_workers=n_workers)


def match_centers(a, b):
    """Minimum-cost matching of two center sets.

    Returns ``(perm, dist)`` where ``b[perm]`` is aligned row-by-row with
    ``a`` and ``dist`` is the largest Euclidean distance between matched
    rows.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    cost = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=-1))
    rows, cols = linear_sum_assignment(cost)
    perm = cols[np.argsort(rows)]
    return perm, float(cost[np.arange(len(a)), perm].max())
