"""Genetic k-means search and the full multi-sample refinement pipeline.

The genetic optimizer evolves real-coded centroid sets: tournament selection
with elitist carry-over, per-center mutation (a coin flip between a Gaussian
nudge scaled by the data bounding-box diagonal and replacement by a random
data point), and one Lloyd step applied to every offspring as the local
improvement operator. There is no crossover; selection, mutation, and the
k-means step carry the search.

The full pipeline (``igk``) seeds that optimizer from multiple subsamples:
each subsample is searched at an inflated center count ``k_prime``, the
candidate whose centers score best on the complete dataset seeds a final
full-data search, and the two nearest clusters are then merged repeatedly
until exactly ``k`` remain.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import DataSet, subsample
from .kmeans import (
    ClusteringResult,
    Partition,
    _assign_points,
    _points_of,
    _update_points,
    squared_error,
)

__all__ = [
    "Chromosome",
    "GaConfig",
    "IgkConfig",
    "genetic_kmeans",
    "igk",
    "merge_step",
]

_SEED_BOUND = 2**63


@dataclass(frozen=True)
class Chromosome:
    """One candidate centroid set with its squared error on the data."""

    centers: np.ndarray
    jc: float

    @property
    def fitness(self) -> float:
        return 1.0 / (1.0 + self.jc)


@dataclass(frozen=True)
class GaConfig:
    """Hyperparameters of the genetic centroid search."""

    population_size: int = 20
    generations: int = 50
    mutation_prob: float = 0.05
    mutation_scale: float = 0.02
    elitism: int = 1
    tournament_size: int = 2
    stall_generations: int = 15
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if self.generations < 1:
            raise ValueError("generations must be positive")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if not self.mutation_scale > 0:
            raise ValueError("mutation_scale must be positive")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must satisfy 0 <= elitism < population_size")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must satisfy 1 <= size <= population_size")
        if self.stall_generations < 1:
            raise ValueError("stall_generations must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class IgkConfig:
    """Parameters of the multi-sample pipeline. ``k_prime`` defaults to 2k."""

    k: int
    k_prime: int | None = None
    num_subsamples: int = 5
    subsample_fraction: float = 0.1
    ga: GaConfig = field(default_factory=GaConfig)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.k_prime is None:
            object.__setattr__(self, "k_prime", 2 * self.k)
        if self.k_prime < self.k:
            raise ValueError("k_prime must be at least k")
        if self.num_subsamples < 1:
            raise ValueError("num_subsamples must be positive")
        if not 0.0 < self.subsample_fraction <= 1.0:
            raise ValueError("subsample_fraction must lie in (0, 1]")


def _nearest_jc(points: np.ndarray, centers: np.ndarray) -> float:
    return float(cdist(points, centers, "sqeuclidean").min(axis=1).sum())


def _best_index(population: list[Chromosome]) -> int:
    return min(range(len(population)), key=lambda i: (population[i].jc, i))


def genetic_kmeans(
    data: DataSet,
    k: int,
    cfg: GaConfig,
    warm_start: np.ndarray | None = None,
) -> ClusteringResult:
    """Evolve ``k`` centers on the dataset, returning the best candidate found.

    When ``warm_start`` is given it becomes the first chromosome; the rest of
    the population is seeded at random data points. The search stops after
    ``cfg.generations`` generations or once the best squared error has not
    improved for ``cfg.stall_generations`` consecutive generations.
    """
    pts = _points_of(data)
    n, dim = pts.shape
    if k < 1:
        raise ValueError("k must be positive")
    if k > n:
        raise ValueError(f"k={k} exceeds dataset size {n}")
    rng = np.random.default_rng(cfg.seed)
    span = pts.max(axis=0) - pts.min(axis=0)
    step = cfg.mutation_scale * float(np.linalg.norm(span))

    def evaluate(centers: np.ndarray) -> Chromosome:
        return Chromosome(centers, _nearest_jc(pts, centers))

    population: list[Chromosome] = []
    if warm_start is not None:
        ws = np.atleast_2d(np.array(warm_start, dtype=np.float64, copy=True))
        if ws.shape != (k, dim):
            raise ValueError(f"warm_start must have shape ({k}, {dim}), got {ws.shape}")
        population.append(evaluate(ws))
    while len(population) < cfg.population_size:
        rows = rng.choice(n, size=k, replace=False)
        population.append(evaluate(pts[rows].copy()))

    best = population[_best_index(population)]
    history: list[float] = []
    stall = 0
    gens_run = 0
    for _ in range(cfg.generations):
        gens_run += 1
        elite_order = sorted(range(len(population)), key=lambda i: (population[i].jc, i))
        new_pop = [population[i] for i in elite_order[: cfg.elitism]]
        while len(new_pop) < cfg.population_size:
            contestants = rng.integers(0, cfg.population_size, size=cfg.tournament_size)
            winner = min(contestants, key=lambda i: (population[i].jc, i))
            centers = population[winner].centers.copy()
            for ci in range(k):
                if rng.random() < cfg.mutation_prob:
                    if rng.random() < 0.5:
                        centers[ci] = pts[rng.integers(0, n)]
                    else:
                        centers[ci] = centers[ci] + rng.normal(0.0, step, size=dim)
            labels = _assign_points(pts, centers)
            centers, labels = _update_points(pts, labels, k)
            new_pop.append(evaluate(centers))
        population = new_pop
        gen_best = population[_best_index(population)]
        if gen_best.jc < best.jc:
            best = gen_best
            stall = 0
        else:
            stall += 1
        history.append(best.jc)
        if stall >= cfg.stall_generations:
            break

    labels = _assign_points(pts, best.centers)
    return ClusteringResult(
        centroids=best.centers.copy(),
        partition=Partition(data.ids, labels, k),
        jc=best.jc,
        iterations_run=gens_run,
        jc_history=tuple(history),
    )


def igk(data: DataSet, cfg: IgkConfig) -> ClusteringResult:
    """Run the full pipeline: subsample seeding, full-data search, merging.

    Candidate center sets from each subsample are compared by their squared
    error on the complete dataset; the winner warm-starts the full-data
    genetic search at ``k_prime`` centers, after which nearest-cluster merges
    reduce the count to exactly ``k``.
    """
    if cfg.k > data.n:
        raise ValueError(f"k={cfg.k} exceeds dataset size {data.n}")
    seeds = np.random.default_rng(cfg.ga.seed).integers(
        _SEED_BOUND, size=cfg.num_subsamples + 2
    )
    samples = subsample(data, cfg.num_subsamples, cfg.subsample_fraction, seed=int(seeds[0]))
    if any(s.n < cfg.k_prime for s in samples):
        raise ValueError(
            f"subsample size {min(s.n for s in samples)} is too small for k_prime={cfg.k_prime}"
        )
    best_centers = None
    best_full_jc = np.inf
    for m, sample in enumerate(samples):
        candidate = genetic_kmeans(
            sample, cfg.k_prime, replace(cfg.ga, seed=int(seeds[1 + m]))
        )
        full_jc = _nearest_jc(data.points, candidate.centroids)
        if full_jc < best_full_jc:
            best_full_jc = full_jc
            best_centers = candidate.centroids
    result = genetic_kmeans(
        data, cfg.k_prime, replace(cfg.ga, seed=int(seeds[-1])), warm_start=best_centers
    )
    while result.k > cfg.k:
        result = merge_step(result, data)
    return result


def merge_step(result: ClusteringResult, data: DataSet) -> ClusteringResult:
    """Merge the two nearest clusters into their size-weighted mean center.

    Only the members of the merged pair are relabeled; all other labels are
    untouched, which keeps the sum of size-weighted centers invariant. The
    squared error is recomputed for the merged partition.
    """
    k = result.k
    if k < 2:
        raise ValueError("merge requires at least 2 clusters")
    centers = result.centroids
    sizes = result.partition.sizes
    pair_d = cdist(centers, centers)
    pair_d[np.tril_indices(k)] = np.inf
    flat = int(np.argmin(pair_d))  # row-major argmin = lexicographically smallest pair
    i, j = divmod(flat, k)
    w = sizes[i] + sizes[j]
    if w > 0:
        merged = (sizes[i] * centers[i] + sizes[j] * centers[j]) / w
    else:
        merged = (centers[i] + centers[j]) / 2.0
    new_centers = np.delete(centers, j, axis=0)
    new_centers[i] = merged
    labels = np.array(result.partition.labels, copy=True)
    labels[labels == j] = i
    labels[labels > j] -= 1
    partition = Partition(result.partition.ids, labels, k - 1)
    jc = squared_error(data, new_centers, partition)
    return ClusteringResult(
        centroids=new_centers,
        partition=partition,
        jc=jc,
        iterations_run=result.iterations_run,
        jc_history=result.jc_history,
    )
