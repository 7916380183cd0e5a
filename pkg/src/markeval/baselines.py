"""Baseline metrics: hypersphere precision/recall and Frechet distance.

Both operate on the same EmbeddingSet inputs as the estimators and exist so
experiment reports can place the population-based scores next to the metrics
they are usually compared against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NumericalFailureError
from .estimators import DEFAULT_K
from .geometry import EmbeddingSet, build_geometry, count_covered


@dataclass(frozen=True)
class PrecisionRecall:
    precision: float
    recall: float


@dataclass(frozen=True)
class GaussianFit:
    """Sample mean and unbiased (1/(n-1)) sample covariance of one set."""

    mean: np.ndarray
    covariance: np.ndarray


def impar(reference: EmbeddingSet, evaluation: EmbeddingSet, k: int = DEFAULT_K) -> PrecisionRecall:
    """Fraction of evaluation samples on the reference manifold estimate, and vice versa.

    precision = covered evaluation rows / |evaluation| against the reference
    hyperspheres; recall swaps the roles.  Both are non-decreasing in k.
    """
    if reference.dim != evaluation.dim:
        raise DimensionMismatchError(
            f"sets have different dimensions: {reference.dim} vs {evaluation.dim}"
        )
    geom_ref = build_geometry(reference, k)
    geom_eval = build_geometry(evaluation, k)
    return PrecisionRecall(
        precision=count_covered(evaluation, geom_ref) / len(evaluation),
        recall=count_covered(reference, geom_eval) / len(reference),
    )


def fit_gaussian(embedding_set: EmbeddingSet) -> GaussianFit:
    """Moment fit used by fid; covariance is symmetrized after the outer product."""
    rows = embedding_set.vectors
    mean = rows.mean(axis=0)
    centered = rows - mean
    covariance = centered.T @ centered / (len(rows) - 1)
    covariance = (covariance + covariance.T) / 2.0
    return GaussianFit(mean=mean, covariance=covariance)


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    values = np.clip(values, 0.0, None)
    return (vectors * np.sqrt(values)) @ vectors.T


def fid(reference: EmbeddingSet, evaluation: EmbeddingSet) -> float:
    """Frechet distance between Gaussian fits of the two sets.

    d^2 = |mu_r - mu_e|^2 + Tr(S_r + S_e - 2 (S_r S_e)^{1/2}), with the matrix
    square root taken through the symmetric eigendecomposition of
    S_r^{1/2} S_e S_r^{1/2}.  Eigenvalues that come out negative are rounding
    noise on a positive-semidefinite product (magnitudes below ~1e-9 of the
    largest eigenvalue) and are clamped to zero, as is the final value.
    """
    if reference.dim != evaluation.dim:
        raise DimensionMismatchError(
            f"sets have different dimensions: {reference.dim} vs {evaluation.dim}"
        )
    fit_ref = fit_gaussian(reference)
    fit_eval = fit_gaussian(evaluation)
    delta = fit_ref.mean - fit_eval.mean
    try:
        root = _psd_sqrt(fit_ref.covariance)
        inner = root @ fit_eval.covariance @ root
        cross_values = np.linalg.eigvalsh((inner + inner.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigendecomposition failed: {exc}") from exc
    cross_values = np.clip(cross_values, 0.0, None)
    value = float(delta @ delta) + float(
        np.trace(fit_ref.covariance)
        + np.trace(fit_eval.covariance)
        - 2.0 * np.sqrt(cross_values).sum()
    )
    return max(value, 0.0)
