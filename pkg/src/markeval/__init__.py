"""Mark-recapture population estimators as metrics for embedding sets.

A reference set and an evaluation set of vectors are treated as two disjoint
indexed populations; closed-population estimators (Petersen, Schnabel, and a
maximum-likelihood capture model) estimate the combined pool size from
hypersphere captures, and the relative estimation error becomes a similarity
score in [0, 1].  Baseline metrics (hypersphere precision/recall, Frechet
distance), a seeded synthetic-experiment harness, rank correlations, file
ingestion, and a CLI round out the package.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateInputError,
    DimensionMismatchError,
    DomainError,
    EmptyFileError,
    FormatError,
    IoError,
    MarkEvalError,
    MinSamplesError,
    NonFiniteError,
    NumericalFailureError,
    RaggedRowsError,
    UnknownEstimatorError,
)
from .geometry import (
    CaptureGeometry,
    EmbeddingSet,
    build_geometry,
    capture_by,
    captures_per_center,
    count_covered,
    covered,
    covered_mask,
    reduce_k,
)
from .estimators import (
    CAPTURE_SEARCH_FACTOR,
    DEFAULT_K,
    ESTIMATOR_NAMES,
    CaptureCounts,
    Estimate,
    PetersenCounts,
    SchnabelCounts,
    SchnabelIteration,
    accuracy_loss,
    capture_counts,
    capture_estimate,
    capture_loglik,
    me_quality_diversity,
    me_score,
    petersen_counts,
    petersen_estimate,
    schnabel_counts,
    schnabel_estimate,
)
from .baselines import GaussianFit, PrecisionRecall, fid, fit_gaussian, impar
from .analysis import (
    METRIC_NAMES,
    ExperimentReport,
    MixtureSpec,
    ScoreSeries,
    gen_mixture,
    k_sweep,
    kendall,
    mode_collapse_experiment,
    noise_sweep_experiment,
    pearson,
    separated_mixture,
    spearman,
)
from .fileio import (
    read_embeddings,
    read_series,
    render_csv,
    render_json,
    report_document,
    write_report,
)

__all__ = [
    "__version__",
    # errors
    "MarkEvalError",
    "MinSamplesError",
    "NonFiniteError",
    "DimensionMismatchError",
    "UnknownEstimatorError",
    "DomainError",
    "DegenerateInputError",
    "NumericalFailureError",
    "FormatError",
    "RaggedRowsError",
    "EmptyFileError",
    "IoError",
    # geometry
    "EmbeddingSet",
    "CaptureGeometry",
    "build_geometry",
    "capture_by",
    "covered",
    "covered_mask",
    "count_covered",
    "captures_per_center",
    "reduce_k",
    # estimators
    "DEFAULT_K",
    "CAPTURE_SEARCH_FACTOR",
    "ESTIMATOR_NAMES",
    "PetersenCounts",
    "SchnabelIteration",
    "SchnabelCounts",
    "CaptureCounts",
    "Estimate",
    "accuracy_loss",
    "petersen_counts",
    "petersen_estimate",
    "schnabel_counts",
    "schnabel_estimate",
    "me_quality_diversity",
    "capture_counts",
    "capture_loglik",
    "capture_estimate",
    "me_score",
    # baselines
    "PrecisionRecall",
    "GaussianFit",
    "impar",
    "fit_gaussian",
    "fid",
    # analysis
    "METRIC_NAMES",
    "MixtureSpec",
    "ExperimentReport",
    "ScoreSeries",
    "separated_mixture",
    "gen_mixture",
    "mode_collapse_experiment",
    "noise_sweep_experiment",
    "k_sweep",
    "pearson",
    "spearman",
    "kendall",
    # io
    "read_embeddings",
    "read_series",
    "render_csv",
    "render_json",
    "write_report",
    "report_document",
]
