"""Clustering by cutting the gap sequence of a greedy Hamiltonian path."""

from .changepoint import (
    ChangePointError,
    ChangePointSet,
    Segmentation,
    bcd_posterior,
    bcd_segment,
    cusum_a,
    cusum_b,
    filter_changepoints,
    jenks_breaks,
    segment_optimal,
    select_direction,
)
from .dataset import DataMatrix, DatasetError, load_csv, polynomial_lift, standardize, write_csv
from .evaluation import (
    AmiReport,
    ClusterLabeling,
    EvaluationError,
    ami_score,
    generate_2d,
    generate_mgd,
    kmeans,
    kmeans_baseline,
    labels_from_changepoints,
)
from .geometry import (
    DistanceMatrix,
    HamiltonianPath,
    build_path,
    build_path_streaming,
    discover_path,
    distance_matrix,
    gram_matrix,
    select_start,
)
from .pipeline import ConfigError, PipelineConfig, PipelineError, run_pipeline
from .svgplot import render_sequence_svg

__version__ = "0.1.0"

__all__ = [
    "AmiReport",
    "ChangePointError",
    "ChangePointSet",
    "ClusterLabeling",
    "ConfigError",
    "DataMatrix",
    "DatasetError",
    "DistanceMatrix",
    "EvaluationError",
    "HamiltonianPath",
    "PipelineConfig",
    "PipelineError",
    "Segmentation",
    "ami_score",
    "bcd_posterior",
    "bcd_segment",
    "build_path",
    "build_path_streaming",
    "cusum_a",
    "cusum_b",
    "discover_path",
    "distance_matrix",
    "filter_changepoints",
    "generate_2d",
    "generate_mgd",
    "gram_matrix",
    "jenks_breaks",
    "kmeans",
    "kmeans_baseline",
    "labels_from_changepoints",
    "load_csv",
    "polynomial_lift",
    "render_sequence_svg",
    "run_pipeline",
    "segment_optimal",
    "select_direction",
    "select_start",
    "standardize",
    "write_csv",
]
