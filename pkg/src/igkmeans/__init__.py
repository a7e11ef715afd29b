"""Clustering and outlier detection around genetic k-means.

The public surface mirrors the pipeline stages: dataset handling, plain
k-means, the genetic optimizer and its multi-sample pipeline, the three
outlier detectors, and ground-truth evaluation.
"""

from .dataset import (
    DataSet,
    DatasetFormatError,
    GenSpec,
    GroundTruth,
    generate,
    load_dataset,
    load_ground_truth,
    remove_points,
    save_points,
    subsample,
)
from .evaluation import (
    CentroidMatch,
    EvalMetrics,
    SweepRow,
    centroid_mse,
    evaluate_run,
    match_centroids,
    threshold_sweep,
)
from .genetic_kmeans import (
    Chromosome,
    GaConfig,
    IgkConfig,
    genetic_kmeans,
    igk,
    merge_step,
)
from .kmeans import (
    ClusteringResult,
    Partition,
    assign,
    kmeans_multistart,
    lloyd,
    squared_error,
    update_centroids,
)
from .outlier_detection import (
    EmptySurvivorsError,
    KnnGraph,
    OdinConfig,
    OutlierRunResult,
    OutlyingnessReport,
    RemovalConfig,
    RemovedPoint,
    build_knn_graph,
    odin,
    orc,
    outlyingness,
    proposed_removal,
)

__version__ = "0.1.0"

__all__ = [
    "DataSet", "DatasetFormatError", "GenSpec", "GroundTruth",
    "generate", "load_dataset", "load_ground_truth", "remove_points",
    "save_points", "subsample",
    "Partition", "ClusteringResult", "assign", "update_centroids",
    "squared_error", "lloyd", "kmeans_multistart",
    "Chromosome", "GaConfig", "IgkConfig", "genetic_kmeans", "igk", "merge_step",
    "KnnGraph", "OutlyingnessReport", "RemovedPoint", "OutlierRunResult",
    "OdinConfig", "RemovalConfig", "EmptySurvivorsError",
    "build_knn_graph", "odin", "outlyingness", "orc", "proposed_removal",
    "CentroidMatch", "EvalMetrics", "SweepRow",
    "match_centroids", "centroid_mse", "threshold_sweep", "evaluate_run",
]
