"""Point-matrix data model, CSV persistence and synthetic blob generation."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np


class DatasetError(ValueError):
    """Raised when a dataset cannot be parsed or built.

    ``line`` holds the 1-based line number of the offending CSV row, when
    there is one.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message}, line {line}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Dataset:
    """An immutable ``n x d`` matrix of finite points.

    Row ``i`` is point ``i`` for the lifetime of the object; every operation
    in the package keeps that indexing.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, order="C", copy=True)
        if pts.ndim != 2:
            raise DatasetError(f"points must be 2-d, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DatasetError(f"dataset needs n >= 1 and d >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DatasetError("dataset contains NaN or infinite values")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def subset(self, indices) -> "Dataset":
        return Dataset(self.points[np.asarray(indices, dtype=np.intp)])

    def __len__(self):
        return self.n


def as_points(data) -> np.ndarray:
    """Return the float64 point matrix behind a Dataset or array-like."""
    if isinstance(data, Dataset):
        return data.points
    pts = np.ascontiguousarray(data, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError(f"expected an (n, d) array, got shape {pts.shape}")
    return pts


# --------------------------------------------------------------------------
# CSV


def load_csv(path, has_header: bool = False) -> Dataset:
    """Read a comma-separated numeric file, one point per row.

    Accepts LF or CRLF line endings and skips blank lines. Errors carry the
    1-based line number of the bad row.
    """
    if not os.path.exists(path):
        raise DatasetError(f"no such file: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()

    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if has_header and lineno == 1:
            continue
        line = raw.strip()
        if not line:
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise DatasetError(
                f"ragged row: expected {width} fields, got {len(fields)}", lineno
            )
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise DatasetError("non-numeric field", lineno) from None
        if not all(np.isfinite(row)):
            raise DatasetError("non-finite field", lineno)
        rows.append(row)

    if not rows:
        raise DatasetError(f"no data rows in {path}")
    return Dataset(np.array(rows, dtype=np.float64))


def _format_row(row) -> str:
    # repr() gives the shortest string that parses back to the same double
    return ",".join(map(repr, row))


def save_csv(ds, path, header=None) -> None:
    """Write points as CSV with exact round-trip decimal rendering."""
    pts = as_points(ds)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header is not None:
            fh.write(",".join(header) + "\n")
        for row in pts.tolist():
            fh.write(_format_row(row) + "\n")


def save_labels_csv(labels, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in np.asarray(labels).tolist():
            fh.write(f"{int(v)}\n")


def load_labels_csv(path) -> np.ndarray:
    return load_csv(path).points[:, 0].astype(np.int64)


# --------------------------------------------------------------------------
# Synthetic data


@dataclass(frozen=True)
class BlobSpec:
    """Parameters for an isotropic Gaussian blob dataset.

    Attributes
    ----------
    n, d, k : int
        Point count, dimension and number of generating clusters.
    spread : float
        Per-cluster standard deviation.
    separation : float
        Minimum distance between any two generating centers.
    seed : int
        Seed for the PCG64 generator behind every random draw.
    """

    n: int
    d: int
    k: int
    spread: float = 1.0
    separation: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.n < self.k:
            raise ValueError(f"n must be >= k, got n={self.n}, k={self.k}")
        if not self.spread > 0:
            raise ValueError(f"spread must be > 0, got {self.spread}")
        if not self.separation >= 0:
            raise ValueError(f"separation must be >= 0, got {self.separation}")


MAX_PLACEMENT_ATTEMPTS = 10_000


def _place_centers(spec: BlobSpec, rng: np.random.Generator) -> np.ndarray:
    side = 10.0 * spec.separation if spec.separation > 0 else 1.0
    sep2 = spec.separation**2
    centers = []
    attempts = 0
    while len(centers) < spec.k:
        if attempts >= MAX_PLACEMENT_ATTEMPTS:
            raise DatasetError(
                f"could not place {spec.k} centers {spec.separation} apart "
                f"after {MAX_PLACEMENT_ATTEMPTS} attempts"
            )
        attempts += 1
        cand = rng.uniform(0.0, side, size=spec.d)
        if all(np.sum((cand - c) ** 2) >= sep2 for c in centers):
            centers.append(cand)
    return np.array(centers)


def generate_blobs(spec: BlobSpec):
    """Draw a labelled Gaussian blob dataset.

    Centers are placed by rejection sampling in the box
    ``[0, 10 * separation]^d``; cluster sizes differ by at most one and the
    labels are shuffled. Centers, labels and noise come from three
    independent child streams of ``SeedSequence(spec.seed)``, so the output
    is bit-for-bit reproducible.

    Returns
    -------
    ds : Dataset
    true_labels : ndarray of shape (n,)
    true_centers : ndarray of shape (k, d)
    """
    center_ss, label_ss, noise_ss = np.random.SeedSequence(spec.seed).spawn(3)
    centers = _place_centers(spec, np.random.Generator(np.random.PCG64(center_ss)))
    labels = np.arange(spec.n, dtype=np.int64) % spec.k
    labels = np.random.Generator(np.random.PCG64(label_ss)).permutation(labels)
    noise = np.random.Generator(np.random.PCG64(noise_ss)).standard_normal(
        (spec.n, spec.d)
    )
    points = centers[labels] + spec.spread * noise
    return Dataset(points), labels, centers
