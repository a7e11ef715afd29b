"""Outlier detectors: kNN-indegree scoring (ODIN) and two flavors of
iterative distance-based removal around a clustering.

The iterative detectors share one loop: score every surviving point by its
distance to the nearest centroid divided by the global maximum of those
distances, drop every point whose factor exceeds the threshold, then re-fit
the clustering warm-started from the previous centers. ``orc`` refits with
plain Lloyd iteration; ``proposed_removal`` refits with the genetic search
and seeds the whole run with the multi-sample pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import DataSet, remove_points
from .genetic_kmeans import IgkConfig, genetic_kmeans, igk
from .kmeans import ClusteringResult, kmeans_multistart, lloyd

__all__ = [
    "KnnGraph",
    "OutlyingnessReport",
    "RemovedPoint",
    "OutlierRunResult",
    "OdinConfig",
    "RemovalConfig",
    "EmptySurvivorsError",
    "build_knn_graph",
    "odin",
    "outlyingness",
    "orc",
    "proposed_removal",
]

_SEED_BOUND = 2**63
_KNN_CHUNK = 512


class EmptySurvivorsError(RuntimeError):
    """Raised when a removal pass leaves no points to cluster."""


@dataclass(frozen=True)
class KnnGraph:
    """Exact k-nearest-neighbor digraph under Euclidean distance.

    Row ``i`` describes the point with id ``ids[i]``: its ``k`` out-edges
    (``neighbor_ids`` / ``neighbor_dists``) and the number of edges pointing
    at it (``indegree``). Distance ties break toward the lower point id.
    """

    k: int
    ids: np.ndarray
    neighbor_ids: np.ndarray
    neighbor_dists: np.ndarray
    indegree: np.ndarray


@dataclass(frozen=True)
class OutlyingnessReport:
    """Per-point outlyingness factors for one scoring pass.

    ``factors[i]`` belongs to the point with id ``ids[i]``. For the
    distance-based detectors ``d_max`` is the global maximum point-to-own-
    centroid distance and factors are distances divided by it (all zero when
    ``d_max`` is zero). For ODIN the factors are ``1/(indegree+1)`` and
    ``d_max`` is reported as 0.0 since no distance normalizer exists.
    """

    ids: np.ndarray
    factors: np.ndarray
    d_max: float
    removed_ids: frozenset[int]
    iteration: int


class RemovedPoint(NamedTuple):
    iteration: int
    point_id: int
    oi: float


@dataclass(frozen=True)
class OutlierRunResult:
    """Everything one detector run produced: the final clustering on the
    survivors, the removal log in (iteration, id) order, the surviving
    dataset, and one report per scoring pass."""

    final_clustering: ClusteringResult
    all_removed: tuple[RemovedPoint, ...]
    surviving: DataSet
    per_iteration: tuple[OutlyingnessReport, ...]
    early_stopped: bool = False


@dataclass(frozen=True)
class OdinConfig:
    """Parameters for ODIN: kNN graph size, indegree threshold, and the
    k-means run applied to the survivors."""

    knn_k: int
    threshold: float
    kmeans_k: int
    restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.knn_k < 1:
            raise ValueError("knn_k must be positive")
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must lie in (0, 1]")
        if self.kmeans_k < 1:
            raise ValueError("kmeans_k must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class RemovalConfig:
    """Iteration count, threshold, and seed for the iterative detectors.

    A threshold of exactly 1 is accepted but removes nothing (the factor
    comparison is strict); every threshold below 1 removes at least one
    point per iteration whenever ``d_max`` is positive.
    """

    iterations: int = 10
    threshold: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must lie in (0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


def build_knn_graph(data: DataSet, k: int) -> KnnGraph:
    """Build the exact kNN digraph; ties break toward the lower point id."""
    n = data.n
    if not 0 < k < n:
        raise ValueError(f"knn k must satisfy 0 < k < {n}, got {k}")
    order = np.argsort(data.ids, kind="stable")
    pts = data.points[order]
    ids_sorted = data.ids[order]
    nbr_pos = np.empty((n, k), dtype=np.int64)
    nbr_dist = np.empty((n, k), dtype=np.float64)
    for start in range(0, n, _KNN_CHUNK):
        stop = min(start + _KNN_CHUNK, n)
        d = cdist(pts[start:stop], pts)
        d[np.arange(stop - start), np.arange(start, stop)] = np.inf
        # stable sort on distance in id-sorted space = ties to lower id
        idx = np.argsort(d, axis=1, kind="stable")[:, :k]
        nbr_pos[start:stop] = idx
        nbr_dist[start:stop] = np.take_along_axis(d, idx, axis=1)
    indegree_sorted = np.bincount(nbr_pos.ravel(), minlength=n)
    # map back to the dataset's own row order
    inverse = np.empty(n, dtype=np.int64)
    inverse[order] = np.arange(n)
    return KnnGraph(
        k=k,
        ids=data.ids,
        neighbor_ids=ids_sorted[nbr_pos][inverse],
        neighbor_dists=nbr_dist[inverse],
        indegree=indegree_sorted[inverse],
    )


def outlyingness(data: DataSet, centroids: np.ndarray) -> OutlyingnessReport:
    """Score each point by distance to its nearest centroid over the global max.

    Factors always lie in [0, 1]; whenever ``d_max`` is positive the point
    attaining it scores exactly 1. If every point sits on a centroid
    (``d_max`` = 0) all factors are 0.
    """
    if data.n < 1:
        raise ValueError("dataset is empty")
    centers = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    if data.dim != centers.shape[1]:
        raise ValueError(
            f"dimension mismatch: points have {data.dim}, centroids {centers.shape[1]}"
        )
    dist = cdist(data.points, centers).min(axis=1)
    d_max = float(dist.max())
    factors = dist / d_max if d_max > 0 else np.zeros_like(dist)
    return OutlyingnessReport(
        ids=data.ids,
        factors=factors,
        d_max=d_max,
        removed_ids=frozenset(),
        iteration=0,
    )


def _iterative_removal(
    data: DataSet,
    initial: ClusteringResult,
    refine: Callable[[DataSet, ClusteringResult], ClusteringResult],
    iterations: int,
    threshold: float,
) -> OutlierRunResult:
    current = data
    result = initial
    removed_log: list[RemovedPoint] = []
    reports: list[OutlyingnessReport] = []
    early = False
    for it in range(1, iterations + 1):
        report = outlyingness(current, result.centroids)
        mask = report.factors > threshold
        removed_ids = frozenset(int(i) for i in current.ids[mask])
        reports.append(replace(report, removed_ids=removed_ids, iteration=it))
        for pos in np.flatnonzero(mask):
            removed_log.append(
                RemovedPoint(it, int(current.ids[pos]), float(report.factors[pos]))
            )
        current = remove_points(current, removed_ids)
        if current.n < result.k:
            early = True
            break
        result = refine(current, result)
    return OutlierRunResult(
        final_clustering=result,
        all_removed=tuple(removed_log),
        surviving=current,
        per_iteration=tuple(reports),
        early_stopped=early,
    )


def odin(data: DataSet, cfg: OdinConfig) -> OutlierRunResult:
    """Single-pass indegree-based removal, then k-means on the survivors."""
    graph = build_knn_graph(data, cfg.knn_k)
    factors = 1.0 / (graph.indegree + 1.0)
    mask = factors > cfg.threshold
    removed_ids = frozenset(int(i) for i in data.ids[mask])
    report = OutlyingnessReport(
        ids=data.ids,
        factors=factors,
        d_max=0.0,
        removed_ids=removed_ids,
        iteration=1,
    )
    survivors = remove_points(data, removed_ids)
    if survivors.n == 0:
        raise EmptySurvivorsError(
            f"indegree threshold {cfg.threshold} removed all {data.n} points"
        )
    clustering = kmeans_multistart(survivors, cfg.kmeans_k, cfg.restarts, cfg.seed)
    removed_log = tuple(
        RemovedPoint(1, int(data.ids[pos]), float(factors[pos]))
        for pos in np.flatnonzero(mask)
    )
    return OutlierRunResult(
        final_clustering=clustering,
        all_removed=removed_log,
        surviving=survivors,
        per_iteration=(report,),
        early_stopped=False,
    )


def orc(
    data: DataSet,
    k: int,
    cfg: RemovalConfig,
    restarts: int = 10,
) -> OutlierRunResult:
    """Iterative removal around multi-restart k-means.

    The initial clustering is the best of ``restarts`` seeded k-means runs;
    each removal iteration then re-fits with Lloyd iteration warm-started
    from the previous centers. Stops early (with a flag) if removals leave
    fewer than ``k`` survivors.
    """
    if k > data.n:
        raise ValueError(f"k={k} exceeds dataset size {data.n}")
    initial = kmeans_multistart(data, k, restarts, cfg.seed)

    def refine(current: DataSet, prev: ClusteringResult) -> ClusteringResult:
        return lloyd(current, prev.centroids)

    return _iterative_removal(data, initial, refine, cfg.iterations, cfg.threshold)


def proposed_removal(
    data: DataSet,
    igk_cfg: IgkConfig,
    cfg: RemovalConfig,
) -> OutlierRunResult:
    """Iterative removal around the genetic pipeline.

    The initial clustering comes from the full multi-sample pipeline; each
    removal iteration then re-fits with a genetic search at the same ``k``,
    warm-started from the previous centers (no re-subsampling or re-merging,
    mirroring the warm-start refit of ``orc``).
    """
    initial = igk(data, igk_cfg)
    refine_seeds = np.random.default_rng(cfg.seed).integers(
        _SEED_BOUND, size=max(cfg.iterations, 1)
    )
    seed_iter = iter(refine_seeds)

    def refine(current: DataSet, prev: ClusteringResult) -> ClusteringResult:
        ga = replace(igk_cfg.ga, seed=int(next(seed_iter)))
        return genetic_kmeans(current, igk_cfg.k, ga, warm_start=prev.centroids)

    return _iterative_removal(data, initial, refine, cfg.iterations, cfg.threshold)
