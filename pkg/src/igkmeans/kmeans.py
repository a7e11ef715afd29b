"""Partitional clustering primitives built on the squared-error criterion.

Provides nearest-centroid assignment, mean updates with farthest-point repair
for emptied clusters, Lloyd iteration, and seeded multi-restart k-means. All
randomness flows through explicit seeds; identical inputs give identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import DataSet

__all__ = [
    "Partition",
    "ClusteringResult",
    "assign",
    "update_centroids",
    "squared_error",
    "lloyd",
    "kmeans_multistart",
]

DEFAULT_MAX_ITERS = 100
DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class Partition:
    """Cluster membership for one dataset: ``labels[i]`` is the cluster of
    the point with id ``ids[i]``."""

    ids: np.ndarray
    labels: np.ndarray
    n_clusters: int

    def __post_init__(self):
        ids = np.array(self.ids, dtype=np.int64, copy=True)
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        if ids.shape != labels.shape or ids.ndim != 1:
            raise ValueError("ids and labels must be 1-D arrays of equal length")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_clusters):
            raise ValueError("labels must lie in [0, n_clusters)")
        ids.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "labels", labels)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_clusters)

    def label_of(self, point_id: int) -> int:
        pos = np.flatnonzero(self.ids == point_id)
        if pos.size != 1:
            raise KeyError(f"unknown point id {point_id}")
        return int(self.labels[pos[0]])


@dataclass(frozen=True)
class ClusteringResult:
    """Centroids, partition, and squared error of one clustering run.

    ``jc_history`` records the squared error after each assign/update pair
    (Lloyd) or the best value after each generation (genetic search).
    """

    centroids: np.ndarray
    partition: Partition
    jc: float
    iterations_run: int
    jc_history: tuple[float, ...] = field(default=())

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def _points_of(data) -> np.ndarray:
    return data.points if isinstance(data, DataSet) else np.asarray(data, dtype=np.float64)


def _assign_points(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # argmin takes the first minimum, so distance ties go to the lowest index
    return np.argmin(cdist(points, centers, "sqeuclidean"), axis=1)


def _update_points(points: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    n, dim = points.shape
    sums = np.zeros((k, dim))
    np.add.at(sums, labels, points)
    counts = np.bincount(labels, minlength=k)
    centers = np.divide(sums, np.maximum(counts, 1)[:, None])
    empties = list(np.flatnonzero(counts == 0))
    if empties:
        if k > n:
            raise ValueError(f"cannot maintain {k} clusters with {n} points")
        labels = labels.copy()
        counts = counts.copy()
        d2 = ((points - centers[labels]) ** 2).sum(axis=1)
        # each point may be re-seeded at most once per update, which bounds
        # the repair loop even on duplicate-heavy data
        eligible = np.ones(n, dtype=bool)
        while empties:
            j = empties.pop(0)
            if counts[j] > 0:
                continue
            masked = np.where(eligible, d2, -np.inf)
            idx = int(np.argmax(masked))
            if not np.isfinite(masked[idx]):
                raise ValueError("ran out of points while repairing empty clusters")
            old = int(labels[idx])
            labels[idx] = j
            centers[j] = points[idx]
            counts[j] += 1
            counts[old] -= 1
            d2[idx] = 0.0
            eligible[idx] = False
            if counts[old] == 0:
                empties.append(old)
    return centers, labels


def assign(data: DataSet, centroids: np.ndarray) -> np.ndarray:
    """Label each point with the index of its nearest centroid.

    Distance ties break toward the lowest centroid index.
    """
    pts = _points_of(data)
    centers = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    if centers.shape[0] < 1:
        raise ValueError("centroids must be nonempty")
    if pts.shape[1] != centers.shape[1]:
        raise ValueError(
            f"dimension mismatch: points have {pts.shape[1]}, centroids {centers.shape[1]}"
        )
    return _assign_points(pts, centers)


def update_centroids(data: DataSet, partition: Partition, k: int) -> tuple[np.ndarray, Partition]:
    """Recompute each center as the mean of its members.

    A cluster left empty is re-seeded at the point currently farthest from
    its own center, and that point is relabeled to the empty cluster; the
    possibly-adjusted partition is returned alongside the centers.
    """
    pts = _points_of(data)
    centers, labels = _update_points(pts, np.asarray(partition.labels), k)
    return centers, Partition(partition.ids, labels, k)


def squared_error(data: DataSet, centroids: np.ndarray, partition) -> float:
    """Sum of squared Euclidean distances from each point to its assigned center."""
    pts = _points_of(data)
    labels = partition.labels if isinstance(partition, Partition) else np.asarray(partition)
    centers = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    return float(((pts - centers[labels]) ** 2).sum())


def lloyd(
    data: DataSet,
    init: np.ndarray,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> ClusteringResult:
    """Run Lloyd iteration from the given initial centers.

    Alternates assignment and mean update until the largest centroid shift
    is at most ``tol`` or ``max_iters`` pairs have run. The returned
    partition is the nearest-centroid assignment of the final centers, so
    the reported squared error is consistent with them.
    """
    pts = _points_of(data)
    if pts.shape[0] < 1:
        raise ValueError("dataset is empty")
    centers = np.atleast_2d(np.array(init, dtype=np.float64, copy=True))
    if centers.shape[0] < 1:
        raise ValueError("initial centroids must be nonempty")
    if pts.shape[1] != centers.shape[1]:
        raise ValueError(
            f"dimension mismatch: points have {pts.shape[1]}, centroids {centers.shape[1]}"
        )
    k = centers.shape[0]
    n = pts.shape[0]
    rows = np.arange(n)
    labels = None
    history: list[float] = []
    iters = 0
    for _ in range(max_iters):
        dists = cdist(pts, centers, "sqeuclidean")
        if labels is not None:
            history.append(float(dists[rows, labels].sum()))
        new_labels = np.argmin(dists, axis=1)
        new_centers, new_labels = _update_points(pts, new_labels, k)
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers, labels = new_centers, new_labels
        iters += 1
        if shift <= tol:
            break
    dists = cdist(pts, centers, "sqeuclidean")
    if labels is not None:
        history.append(float(dists[rows, labels].sum()))
    final_labels = np.argmin(dists, axis=1)
    jc = float(dists[rows, final_labels].sum())
    return ClusteringResult(
        centroids=centers,
        partition=Partition(data.ids, final_labels, k),
        jc=jc,
        iterations_run=iters,
        jc_history=tuple(history),
    )


def kmeans_multistart(
    data: DataSet,
    k: int,
    restarts: int = 10,
    seed: int = 0,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> ClusteringResult:
    """Best-of-``restarts`` Lloyd runs from uniformly sampled point initializations.

    Each restart seeds its centers at ``k`` distinct data points; the run
    with the lowest squared error wins, ties going to the earliest restart.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k > data.n:
        raise ValueError(f"k={k} exceeds dataset size {data.n}")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    rng = np.random.default_rng(seed)
    best: ClusteringResult | None = None
    for _ in range(restarts):
        rows = rng.choice(data.n, size=k, replace=False)
        result = lloyd(data, data.points[rows], max_iters=max_iters, tol=tol)
        if best is None or result.jc < best.jc:
            best = result
    assert best is not None
    return best
