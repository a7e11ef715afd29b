"""Point-set loading, generation, subsampling, and persistence.

Datasets are plain text: one point per line, coordinates separated by
whitespace, blank lines ignored. Every point carries a stable integer id
(its original row number), so points removed later in a pipeline can still
be reported against the original file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

__all__ = [
    "DataSet",
    "GroundTruth",
    "GenSpec",
    "DatasetFormatError",
    "load_dataset",
    "load_ground_truth",
    "save_points",
    "generate",
    "subsample",
    "remove_points",
]


class DatasetFormatError(ValueError):
    """A dataset file could not be parsed; carries the offending line number."""

    def __init__(self, path, line_no: int | None, message: str):
        self.path = str(path)
        self.line_no = line_no
        if line_no:
            super().__init__(f"{path}:{line_no}: {message}")
        else:
            super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class DataSet:
    """An ordered collection of real-valued points with stable integer ids.

    ``points`` is an (n, dim) float array; ``ids[i]`` is the id of row i.
    Ids survive removals unchanged, so they always refer back to the rows of
    the originally loaded or generated set.
    """

    points: np.ndarray
    ids: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        ids = np.array(self.ids, dtype=np.int64, copy=True)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got shape {pts.shape}")
        if pts.shape[0] > 0 and pts.shape[1] < 1:
            raise ValueError("points must have dimension >= 1")
        if ids.ndim != 1 or ids.shape[0] != pts.shape[0]:
            raise ValueError("ids must be a 1-D array with one entry per point")
        if pts.size and not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite coordinates")
        if np.unique(ids).size != ids.size:
            raise ValueError("point ids must be unique")
        pts.setflags(write=False)
        ids.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_points(cls, points) -> "DataSet":
        """Wrap an array of points, assigning fresh ids 0..n-1."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return cls(pts, np.arange(pts.shape[0]))


@dataclass(frozen=True)
class GroundTruth:
    """The true generative centers a clustering is scored against."""

    centroids: np.ndarray

    def __post_init__(self):
        c = np.array(self.centroids, dtype=np.float64, copy=True)
        if c.ndim != 2 or c.shape[0] < 1:
            raise ValueError("ground truth must hold at least one centroid")
        if not np.all(np.isfinite(c)):
            raise ValueError("ground-truth centroids contain non-finite coordinates")
        c.setflags(write=False)
        object.__setattr__(self, "centroids", c)

    @property
    def count(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


@dataclass(frozen=True)
class GenSpec:
    """Parameters for the synthetic blob generator.

    ``num_clusters`` centers are drawn uniformly inside ``box`` (applied per
    coordinate), each receiving ``points_per_cluster`` isotropic-normal points
    of standard deviation ``spread``. ``floor(outlier_fraction * n_inliers)``
    extra points are drawn uniformly from the box inflated to twice its side
    length and appended after the inliers.
    """

    num_clusters: int
    points_per_cluster: int
    dimension: int = 2
    spread: float = 1.0
    box: tuple[float, float] = (0.0, 100.0)
    outlier_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.num_clusters < 1:
            raise ValueError("num_clusters must be positive")
        if self.points_per_cluster < 1:
            raise ValueError("points_per_cluster must be positive")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if not self.spread > 0:
            raise ValueError("spread must be positive")
        lo, hi = self.box
        if not lo < hi:
            raise ValueError("box must be a nonempty interval (lo, hi)")
        if not 0.0 <= self.outlier_fraction < 1.0:
            raise ValueError("outlier_fraction must lie in [0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


def _parse_points_file(path) -> np.ndarray:
    path = Path(path)
    rows: list[list[float]] = []
    dim = None
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if dim is None:
                dim = len(tokens)
            elif len(tokens) != dim:
                raise DatasetFormatError(
                    path, line_no,
                    f"expected {dim} values per row, got {len(tokens)}",
                )
            values = []
            for tok in tokens:
                try:
                    v = float(tok)
                except ValueError:
                    raise DatasetFormatError(
                        path, line_no, f"non-numeric value {tok!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DatasetFormatError(
                        path, line_no, f"non-finite value {tok!r}"
                    )
                values.append(v)
            rows.append(values)
    if not rows:
        raise DatasetFormatError(path, None, "file contains no data rows")
    return np.array(rows, dtype=np.float64)


def load_dataset(path) -> DataSet:
    """Load a whitespace-separated text file, one point per non-blank line.

    Raises ``FileNotFoundError`` for a missing file and
    ``DatasetFormatError`` (with the line number) for ragged rows,
    non-numeric tokens, or an empty file. Dimension is inferred from the
    first data row.
    """
    return DataSet.from_points(_parse_points_file(path))


def load_ground_truth(path, expected_dim: int) -> GroundTruth:
    """Load true centroids from the same text format as :func:`load_dataset`.

    ``expected_dim`` guards against pairing a truth file with the wrong
    dataset; a mismatch raises ``DatasetFormatError``.
    """
    arr = _parse_points_file(path)
    if arr.shape[1] != expected_dim:
        raise DatasetFormatError(
            path, None,
            f"dimension mismatch: file has {arr.shape[1]}, expected {expected_dim}",
        )
    return GroundTruth(arr)


def save_points(path, points) -> None:
    """Write points one per line, space separated, at full round-trip precision."""
    arr = np.atleast_2d(np.asarray(points, dtype=np.float64))
    lines = [" ".join(repr(float(v)) for v in row) for row in arr]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def generate(spec: GenSpec) -> tuple[DataSet, GroundTruth]:
    """Generate a blob dataset plus its true centers, deterministically per seed."""
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.box
    centers = rng.uniform(lo, hi, size=(spec.num_clusters, spec.dimension))
    n_inliers = spec.num_clusters * spec.points_per_cluster
    pts = (
        np.repeat(centers, spec.points_per_cluster, axis=0)
        + rng.normal(0.0, spec.spread, size=(n_inliers, spec.dimension))
    )
    n_outliers = int(spec.outlier_fraction * n_inliers)
    if n_outliers:
        mid = (lo + hi) / 2.0
        half = (hi - lo) / 2.0
        outliers = rng.uniform(
            mid - 2.0 * half, mid + 2.0 * half, size=(n_outliers, spec.dimension)
        )
        pts = np.vstack([pts, outliers])
    return DataSet(pts, np.arange(pts.shape[0])), GroundTruth(centers)


def subsample(data: DataSet, count_j: int, fraction: float, seed: int) -> list[DataSet]:
    """Draw ``count_j`` independent subsamples of ``ceil(fraction * n)`` points.

    Each subsample is drawn without replacement and keeps the original ids
    and relative row order of its points.
    """
    if count_j < 1:
        raise ValueError("count_j must be positive")
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    size = math.ceil(fraction * data.n)
    if size < 1:
        raise ValueError("subsample would be empty")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count_j):
        rows = np.sort(rng.choice(data.n, size=size, replace=False))
        out.append(DataSet(data.points[rows], data.ids[rows]))
    return out


def remove_points(data: DataSet, ids: Iterable[int]) -> DataSet:
    """Return the dataset without the given ids; survivors keep id and order."""
    drop = np.asarray(sorted(set(int(i) for i in ids)), dtype=np.int64)
    if drop.size:
        unknown = np.setdiff1d(drop, data.ids)
        if unknown.size:
            raise ValueError(f"unknown point ids: {unknown.tolist()[:10]}")
    keep = ~np.isin(data.ids, drop)
    return DataSet(data.points[keep], data.ids[keep])
