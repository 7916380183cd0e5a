"""Geometry layer: neighbor lists, hypersphere radii, capture predicates."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import oracles
from markeval import (
    DimensionMismatchError,
    EmbeddingSet,
    MinSamplesError,
    NonFiniteError,
    build_geometry,
    capture_by,
    captures_per_center,
    count_covered,
    covered,
    covered_mask,
    reduce_k,
)
from markeval import geometry as geometry_module


def column(*values):
    """1-D sample points as an (n, 1) matrix."""
    return np.array(values, dtype=np.float64).reshape(-1, 1)


class TestEmbeddingSet:
    """Validation and storage contract of the input container."""

    def test_coerces_to_contiguous_float64(self):
        data = np.asfortranarray(np.arange(12, dtype=np.float32).reshape(4, 3))
        es = EmbeddingSet(data)
        assert es.vectors.dtype == np.float64
        assert es.vectors.flags["C_CONTIGUOUS"]
        assert_allclose(es.vectors, data.astype(np.float64))

    def test_accepts_nested_lists(self):
        es = EmbeddingSet([[0.0, 1.0], [2.0, 3.0]])
        assert len(es) == 2
        assert es.dim == 2

    def test_rejects_1d_input(self):
        with pytest.raises(DimensionMismatchError):
            EmbeddingSet(np.zeros(5))

    def test_rejects_single_sample(self):
        with pytest.raises(MinSamplesError):
            EmbeddingSet(np.zeros((1, 3)))

    def test_rejects_zero_width_rows(self):
        with pytest.raises(DimensionMismatchError):
            EmbeddingSet(np.zeros((4, 0)))

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite(self, bad):
        data = np.zeros((3, 2))
        data[1, 1] = bad
        with pytest.raises(NonFiniteError):
            EmbeddingSet(data)


class TestBuildGeometry:
    """Neighbor selection and radius computation."""

    def test_line_example_radii(self):
        """Points {0, 1, 3}: nearest-neighbor radii are [1, 1, 2]."""
        geom = build_geometry(EmbeddingSet(column(0, 1, 3)), k=1)
        assert_allclose(geom.radii, [1.0, 1.0, 2.0])
        assert geom.neighbors.tolist() == [[1], [0], [1]]

    def test_ties_break_by_ascending_index(self):
        """Point 0 is equidistant from -1 and +1; the lower row index wins."""
        geom = build_geometry(EmbeddingSet(column(0, -1, 1)), k=1)
        assert geom.neighbors[0, 0] == 1

    def test_duplicate_rows_yield_zero_radii(self):
        geom = build_geometry(EmbeddingSet(column(2, 2, 9)), k=1)
        assert_allclose(geom.radii, [0.0, 0.0, 7.0])
        # the duplicates pick each other, the singleton picks the first dup
        assert geom.neighbors.tolist() == [[1], [0], [0]]

    def test_all_rows_identical(self):
        geom = build_geometry(EmbeddingSet(np.ones((5, 2))), k=3)
        assert_allclose(geom.radii, np.zeros(5))

    def test_k_max_radius_is_max_pairwise_distance(self):
        rng = np.random.default_rng(42)
        pts = rng.standard_normal((12, 3))
        geom = build_geometry(EmbeddingSet(pts), k=11)
        diffs = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt(np.square(diffs).sum(axis=-1))
        assert_allclose(geom.radii, dist.max(axis=1), rtol=1e-12)

    def test_radii_equal_distance_to_last_neighbor(self):
        rng = np.random.default_rng(42)
        pts = rng.standard_normal((30, 4))
        geom = build_geometry(EmbeddingSet(pts), k=5)
        last = pts[geom.neighbors[:, -1]]
        assert_allclose(geom.radii, np.linalg.norm(pts - last, axis=1), rtol=1e-12)

    def test_neighbors_sorted_by_distance(self):
        rng = np.random.default_rng(42)
        pts = rng.standard_normal((25, 3))
        geom = build_geometry(EmbeddingSet(pts), k=6)
        for i in range(25):
            d = np.linalg.norm(pts[geom.neighbors[i]] - pts[i], axis=1)
            assert np.all(np.diff(d) >= 0)
            assert i not in geom.neighbors[i]

    def test_rejects_k_below_one(self):
        with pytest.raises(ValueError):
            build_geometry(EmbeddingSet(column(0, 1)), k=0)

    def test_rejects_k_at_or_above_n(self):
        with pytest.raises(MinSamplesError):
            build_geometry(EmbeddingSet(column(0, 1, 2)), k=3)

    def test_determinism(self):
        rng = np.random.default_rng(42)
        pts = rng.standard_normal((40, 5))
        first = build_geometry(EmbeddingSet(pts), k=4)
        second = build_geometry(EmbeddingSet(pts.copy()), k=4)
        assert np.array_equal(first.neighbors, second.neighbors)
        assert np.array_equal(first.radii, second.radii)
        assert np.array_equal(first.radii_sq, second.radii_sq)


class TestReduceK:
    """Prefix-slicing a geometry must match a direct build bit for bit."""

    def test_matches_direct_build(self):
        rng = np.random.default_rng(42)
        es = EmbeddingSet(rng.standard_normal((40, 3)))
        top = build_geometry(es, k=10)
        for k in range(1, 11):
            direct = build_geometry(es, k)
            sliced = reduce_k(top, k)
            assert np.array_equal(direct.neighbors, sliced.neighbors)
            assert np.array_equal(direct.radii_sq, sliced.radii_sq)
            assert np.array_equal(direct.radii, sliced.radii)

    def test_same_k_returns_same_object(self):
        geom = build_geometry(EmbeddingSet(column(0, 1, 3)), k=2)
        assert reduce_k(geom, 2) is geom

    @pytest.mark.parametrize("bad_k", [0, 3, -1])
    def test_rejects_out_of_range_k(self, bad_k):
        geom = build_geometry(EmbeddingSet(column(0, 1, 3)), k=2)
        with pytest.raises(ValueError):
            reduce_k(geom, bad_k)


class TestCapturePredicates:
    """Point-in-hypersphere checks, including the inclusive boundary."""

    @pytest.fixture
    def line_geom(self):
        return build_geometry(EmbeddingSet(column(0, 1, 3)), k=1)

    def test_capture_by_example(self, line_geom):
        """Center 3 has radius 2, center 0 has radius 1."""
        assert capture_by([2.0], 2, line_geom)
        assert not capture_by([2.0], 0, line_geom)

    def test_capture_by_center_itself(self, line_geom):
        assert capture_by([3.0], 2, line_geom)

    def test_boundary_is_inclusive(self, line_geom):
        """|5 - 3| equals the radius 2 exactly and still captures."""
        assert capture_by([5.0], 2, line_geom)
        assert covered([5.0], line_geom)
        assert not covered([6.0], line_geom)

    def test_covered_mask_matches_scalar_covered(self, line_geom):
        xs = column(-2, -1, 0.5, 2, 4.99, 5, 5.01)
        mask = covered_mask(xs, line_geom)
        assert mask.tolist() == [covered(x, line_geom) for x in xs]

    def test_count_covered_cross_example(self):
        """S={0,1} and S'={1,10}: one of S' lands in S, both of S land in S'."""
        s = EmbeddingSet(column(0, 1))
        s_prime = EmbeddingSet(column(1, 10))
        assert count_covered(s_prime, build_geometry(s, 1)) == 1
        assert count_covered(s, build_geometry(s_prime, 1)) == 2

    def test_self_coverage(self):
        rng = np.random.default_rng(42)
        for n, d, k in [(8, 2, 1), (20, 4, 3), (15, 1, 7)]:
            es = EmbeddingSet(rng.standard_normal((n, d)))
            assert count_covered(es, build_geometry(es, k)) == n

    def test_far_cluster_not_covered(self):
        rng = np.random.default_rng(42)
        es = EmbeddingSet(rng.standard_normal((10, 3)))
        far = rng.standard_normal((6, 3)) + 1e6
        assert count_covered(far, build_geometry(es, 2)) == 0

    def test_coverage_monotone_in_k(self):
        rng = np.random.default_rng(42)
        es = EmbeddingSet(rng.standard_normal((30, 3)))
        queries = rng.standard_normal((50, 3)) * 2
        previous = np.zeros(50, dtype=bool)
        for k in range(1, 8):
            mask = covered_mask(queries, build_geometry(es, k))
            assert np.all(previous <= mask)
            previous = mask

    def test_captures_per_center_line_example(self, line_geom):
        counts = captures_per_center(column(0.5, 2.5, 7), line_geom)
        # center 0 grabs 0.5; center 1 grabs 0.5; center 3 grabs 2.5
        assert counts.tolist() == [1, 1, 1]

    def test_dimension_mismatch_rejected(self, line_geom):
        with pytest.raises(DimensionMismatchError):
            covered([1.0, 2.0], line_geom)
        with pytest.raises(DimensionMismatchError):
            covered_mask(np.zeros((4, 2)), line_geom)
        with pytest.raises(DimensionMismatchError):
            capture_by([1.0, 2.0], 0, line_geom)


class TestChunking:
    """Row-blocked evaluation must not change any result."""

    def test_tiny_blocks_reproduce_default_results(self, monkeypatch):
        rng = np.random.default_rng(42)
        pts = rng.standard_normal((37, 5))
        queries = rng.standard_normal((23, 5))
        es = EmbeddingSet(pts)
        geom = build_geometry(es, k=4)
        mask = covered_mask(queries, geom)
        per_center = captures_per_center(queries, geom)

        monkeypatch.setattr(geometry_module, "_BLOCK_ELEMENTS", 11)
        small_geom = build_geometry(es, k=4)
        assert np.array_equal(small_geom.neighbors, geom.neighbors)
        assert np.array_equal(small_geom.radii_sq, geom.radii_sq)
        assert np.array_equal(covered_mask(queries, small_geom), mask)
        assert np.array_equal(captures_per_center(queries, small_geom), per_center)


class TestOracleEquivalence:
    """Fast paths agree with a literal O(n^2) enumeration."""

    def test_random_sets_match_naive_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            n = int(rng.integers(5, 65))
            d = int(rng.integers(1, 8))
            k = int(rng.integers(1, min(n - 1, 5) + 1))
            pts = rng.standard_normal((n, d))
            geom = build_geometry(EmbeddingSet(pts), k)
            nbrs, radii_sq = oracles.nearest_neighbors(pts, k)
            assert geom.neighbors.tolist() == nbrs
            assert_allclose(geom.radii_sq, radii_sq, rtol=1e-12)
            queries = rng.standard_normal((30, d)) * 1.5
            mask = covered_mask(queries, geom)
            for row, got in zip(queries, mask):
                assert got == oracles.is_covered(row, pts, radii_sq)

    def test_integer_grid_matches_exactly(self):
        """Integer coordinates make every distance exact in float64."""
        rng = np.random.default_rng(42)
        pts = rng.integers(0, 4, size=(40, 2)).astype(np.float64)
        geom = build_geometry(EmbeddingSet(pts), k=3)
        nbrs, radii_sq = oracles.nearest_neighbors(pts, 3)
        assert geom.neighbors.tolist() == nbrs
        assert geom.radii_sq.tolist() == radii_sq
        queries = rng.integers(-1, 5, size=(25, 2)).astype(np.float64)
        mask = covered_mask(queries, geom)
        for row, got in zip(queries, mask):
            assert got == oracles.is_covered(row, pts, radii_sq)
