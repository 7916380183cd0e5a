"""Reference metrics: coverage precision/recall and Frechet distance."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import oracles
from markeval import (
    DimensionMismatchError,
    EmbeddingSet,
    fid,
    fit_gaussian,
    impar,
)


def column(*values):
    return np.array(values, dtype=np.float64).reshape(-1, 1)


def cross_pattern(ax, by, shift):
    """Four points with exactly diagonal sample covariance."""
    pts = np.array([[ax, 0.0], [-ax, 0.0], [0.0, by], [0.0, -by]])
    return EmbeddingSet(pts + np.asarray(shift))


class TestImpar:
    """Coverage-fraction precision and recall."""

    def test_equal_sets(self):
        rng = np.random.default_rng(42)
        pts = rng.standard_normal((10, 3))
        result = impar(EmbeddingSet(pts), EmbeddingSet(pts.copy()), 1)
        assert (result.precision, result.recall) == (1.0, 1.0)

    def test_far_disjoint_sets(self):
        rng = np.random.default_rng(42)
        a = rng.standard_normal((8, 2))
        b = rng.standard_normal((8, 2)) + 1e6
        result = impar(EmbeddingSet(a), EmbeddingSet(b), 2)
        assert (result.precision, result.recall) == (0.0, 0.0)

    def test_line_example(self):
        """Reference {0,1}, evaluation {1,10}: half in, all back-covered."""
        result = impar(EmbeddingSet(column(0, 1)), EmbeddingSet(column(1, 10)), 1)
        assert result.precision == 0.5
        assert result.recall == 1.0

    def test_monotone_in_k(self):
        rng = np.random.default_rng(42)
        a = EmbeddingSet(rng.standard_normal((30, 4)))
        b = EmbeddingSet(rng.standard_normal((25, 4)) * 1.4)
        previous = (0.0, 0.0)
        for k in range(1, 8):
            result = impar(a, b, k)
            assert result.precision >= previous[0]
            assert result.recall >= previous[1]
            previous = (result.precision, result.recall)

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            n_a, n_b = int(rng.integers(5, 25)), int(rng.integers(5, 25))
            d, k = int(rng.integers(2, 5)), int(rng.integers(1, 4))
            a, b = rng.standard_normal((n_a, d)), rng.standard_normal((n_b, d))
            result = impar(EmbeddingSet(a), EmbeddingSet(b), k)
            assert (result.precision, result.recall) == oracles.impar(a, b, k)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            impar(EmbeddingSet(np.zeros((4, 2))), EmbeddingSet(np.ones((4, 3))), 1)


class TestFitGaussian:
    """Moment fitting with the unbiased covariance normalization."""

    def test_two_point_example(self):
        fit = fit_gaussian(EmbeddingSet(column(-1, 1)))
        assert fit.mean[0] == 0.0
        assert fit.covariance[0, 0] == 2.0

    def test_identical_points_zero_covariance(self):
        fit = fit_gaussian(EmbeddingSet(np.ones((6, 3)) * 4.2))
        assert_allclose(fit.covariance, np.zeros((3, 3)))

    def test_matches_direct_summation_oracle(self):
        rng = np.random.default_rng(42)
        pts = rng.standard_normal((3, 2)) * 2.5 + 1.0
        fit = fit_gaussian(EmbeddingSet(pts))
        mean, cov = oracles.mean_and_cov(pts)
        assert_allclose(fit.mean, mean, rtol=1e-12)
        assert_allclose(fit.covariance, cov, rtol=1e-12, atol=1e-15)

    def test_covariance_exactly_symmetric(self):
        rng = np.random.default_rng(42)
        fit = fit_gaussian(EmbeddingSet(rng.standard_normal((50, 6))))
        assert np.array_equal(fit.covariance, fit.covariance.T)

    def test_eigenvalues_not_materially_negative(self):
        rng = np.random.default_rng(42)
        for n, d in [(3, 5), (10, 4), (100, 8)]:
            fit = fit_gaussian(EmbeddingSet(rng.standard_normal((n, d))))
            eigs = np.linalg.eigvalsh(fit.covariance)
            assert eigs.min() >= -1e-9 * max(eigs.max(), 1e-30)


class TestFid:
    """Frechet distance between fitted Gaussians."""

    def test_identical_sets_near_zero(self):
        rng = np.random.default_rng(42)
        pts = rng.standard_normal((40, 5))
        assert abs(fid(EmbeddingSet(pts), EmbeddingSet(pts.copy()))) <= 1e-8

    def test_one_dimensional_closed_form(self):
        rng = np.random.default_rng(42)
        a = rng.standard_normal((20, 1)) * 1.7 + 0.4
        b = rng.standard_normal((15, 1)) * 0.6 - 1.1
        fit_a, fit_b = fit_gaussian(EmbeddingSet(a)), fit_gaussian(EmbeddingSet(b))
        closed = (fit_a.mean[0] - fit_b.mean[0]) ** 2 + (
            np.sqrt(fit_a.covariance[0, 0]) - np.sqrt(fit_b.covariance[0, 0])
        ) ** 2
        assert_allclose(fid(EmbeddingSet(a), EmbeddingSet(b)), closed, atol=1e-12)

    def test_diagonal_two_dimensional_sum_of_axes(self):
        """Exactly diagonal covariances reduce to per-axis closed forms."""
        a = cross_pattern(1.5, 0.7, (0.3, -0.2))
        b = cross_pattern(0.9, 2.0, (-1.0, 0.5))
        fit_a, fit_b = fit_gaussian(a), fit_gaussian(b)
        assert fit_a.covariance[0, 1] == 0.0
        closed = sum(
            (fit_a.mean[i] - fit_b.mean[i]) ** 2
            + (np.sqrt(fit_a.covariance[i, i]) - np.sqrt(fit_b.covariance[i, i])) ** 2
            for i in range(2)
        )
        assert_allclose(fid(a, b), closed, atol=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(42)
        for _ in range(8):
            d = int(rng.integers(2, 5))
            a = EmbeddingSet(rng.standard_normal((d * 5, d)))
            b = EmbeddingSet(rng.standard_normal((d * 5, d)) * 1.5 + 0.5)
            assert abs(fid(a, b) - fid(b, a)) <= 1e-8

    def test_non_negative(self):
        rng = np.random.default_rng(42)
        for _ in range(8):
            d = int(rng.integers(2, 6))
            base = rng.standard_normal((d * 6, d))
            near = base + rng.standard_normal(base.shape) * 1e-8
            assert fid(EmbeddingSet(base), EmbeddingSet(near)) >= 0.0

    def test_rank_deficient_covariance_stays_finite(self):
        """n-1 < d gives true zero eigenvalues; clamping must hold."""
        rng = np.random.default_rng(42)
        a = rng.standard_normal((3, 5))
        b = rng.standard_normal((4, 5))
        value = fid(EmbeddingSet(a), EmbeddingSet(b))
        assert np.isfinite(value)
        assert value >= 0.0

    def test_matches_svd_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            d = int(rng.integers(2, 5))
            n_a, n_b = int(rng.integers(4 * d, 40)), int(rng.integers(4 * d, 40))
            a, b = rng.standard_normal((n_a, d)), rng.standard_normal((n_b, d)) * 1.3
            mean_a, cov_a = oracles.mean_and_cov(a)
            mean_b, cov_b = oracles.mean_and_cov(b)
            expected = oracles.fid_value(mean_a, cov_a, mean_b, cov_b)
            assert abs(fid(EmbeddingSet(a), EmbeddingSet(b)) - expected) <= 1e-8

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            fid(EmbeddingSet(np.zeros((4, 2))), EmbeddingSet(np.ones((4, 3))))
