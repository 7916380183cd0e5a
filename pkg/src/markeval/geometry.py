"""k-NN hypersphere geometry over a set of embedding vectors.

Every estimator in this package reduces to one geometric question: does a
point x lie inside the hypersphere centered at sample c, where the radius is
the Euclidean distance from c to its k-th nearest neighbor within c's own
set?  This module builds that structure once per set and answers the question
in bulk.  The boundary is inclusive: a point exactly on the sphere counts as
captured.

All distances are squared Euclidean distances in float64 computed through the
single code path `_sq_dists`.  Capture tests compare squared distances
against stored squared radii, so a distance recomputed for the pair of points
that defined a radius compares bit-for-bit equal to it.  Do not introduce a
second distance formula (in particular the expanded x.x - 2 x.c + c.c form):
it rounds differently and silently breaks the boundary cases that the
identical-set score guarantees rest on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, MinSamplesError, NonFiniteError

# Cap on the element count of the (rows x centers x dim) difference tensor a
# single block may allocate; keeps peak temporary memory near 128 MB.
_BLOCK_ELEMENTS = 2**24


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """An ordered collection of n >= 2 finite d-dimensional vectors.

    Rows are identified by their 0-based index.  Vectors are stored as a
    float64 C-contiguous matrix regardless of the input dtype, so all
    downstream arithmetic runs in double precision.
    """

    vectors: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(np.asarray(self.vectors, dtype=np.float64))
        if arr.ndim != 2:
            raise DimensionMismatchError(
                f"expected an n x d matrix, got {arr.ndim}-D data"
            )
        if arr.shape[0] < 2:
            raise MinSamplesError(f"need at least 2 samples, got {arr.shape[0]}")
        if arr.shape[1] < 1:
            raise DimensionMismatchError("vectors need at least 1 dimension")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(f"set {self.label!r} contains NaN or Inf entries")
        object.__setattr__(self, "vectors", arr)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True, eq=False)
class CaptureGeometry:
    """k-NN hyperspheres for one EmbeddingSet.

    neighbors[i] holds the k nearest other samples of sample i, ascending by
    distance with ties broken by ascending index.  radii[i] is the distance
    from sample i to neighbors[i][k-1]; radii_sq keeps the squared value so
    predicates can avoid the lossy square root.
    """

    source: EmbeddingSet
    k: int
    neighbors: np.ndarray
    radii: np.ndarray
    radii_sq: np.ndarray


def _sq_dists(xs: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between two row stacks, shape (len(xs), len(centers))."""
    diff = xs[:, None, :] - centers[None, :, :]
    np.square(diff, out=diff)
    return diff.sum(axis=-1)


def _row_blocks(n_rows: int, n_centers: int, dim: int):
    per_block = max(1, _BLOCK_ELEMENTS // max(1, n_centers * dim))
    for start in range(0, n_rows, per_block):
        yield start, min(start + per_block, n_rows)


def _as_vector(x, geom: CaptureGeometry) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != geom.source.dim:
        raise DimensionMismatchError(
            f"point of dimension {arr.shape} does not match geometry dimension {geom.source.dim}"
        )
    return arr


def _as_matrix(xs, geom: CaptureGeometry) -> np.ndarray:
    arr = xs.vectors if isinstance(xs, EmbeddingSet) else np.asarray(xs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != geom.source.dim:
        raise DimensionMismatchError(
            f"rows of shape {arr.shape} do not match geometry dimension {geom.source.dim}"
        )
    return arr


def build_geometry(embedding_set: EmbeddingSet, k: int) -> CaptureGeometry:
    """Compute k-NN neighbor lists and hypersphere radii for one set.

    Args:
        embedding_set: the samples; must contain more than k rows so every
            sample has k distinct other samples.
        k: neighbor count, k >= 1.

    Returns:
        CaptureGeometry with neighbors sorted ascending by distance (ties by
        ascending index) and radii equal to the k-th neighbor distance.
        Duplicated rows are allowed and produce zero radii.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = len(embedding_set)
    if n <= k:
        raise MinSamplesError(f"need at least k+1 = {k + 1} samples, got {n}")
    points = embedding_set.vectors
    neighbors = np.empty((n, k), dtype=np.int64)
    radii_sq = np.empty(n, dtype=np.float64)
    for start, stop in _row_blocks(n, n, embedding_set.dim):
        d2 = _sq_dists(points[start:stop], points)
        order = np.argsort(d2, axis=1, kind="stable")
        head = order[:, : k + 1]
        # Drop self from the leading k+1 entries.  With >= k+1 coincident
        # lower-index duplicates, self may not appear; the surplus column is
        # dropped instead, which is exactly the (k+1)-th nearest other point.
        is_self = head == np.arange(start, stop)[:, None]
        keep = np.argsort(is_self, axis=1, kind="stable")[:, :k]
        kept = np.take_along_axis(head, keep, axis=1)
        neighbors[start:stop] = kept
        radii_sq[start:stop] = np.take_along_axis(d2, kept[:, -1:], axis=1)[:, 0]
    return CaptureGeometry(
        source=embedding_set,
        k=k,
        neighbors=neighbors,
        radii=np.sqrt(radii_sq),
        radii_sq=radii_sq,
    )


def reduce_k(geom: CaptureGeometry, k: int) -> CaptureGeometry:
    """Derive the geometry at a smaller k without a new neighbor search.

    Sorted neighbor lists at k are prefixes of the lists at any larger k, so
    only the radii need recomputing.  The result is bit-identical to
    build_geometry(geom.source, k).
    """
    if not 1 <= k <= geom.k:
        raise ValueError(f"k must be in [1, {geom.k}], got {k}")
    if k == geom.k:
        return geom
    neighbors = np.ascontiguousarray(geom.neighbors[:, :k])
    points = geom.source.vectors
    diff = points - points[neighbors[:, k - 1]]
    np.square(diff, out=diff)
    radii_sq = diff.sum(axis=-1)
    return CaptureGeometry(
        source=geom.source,
        k=k,
        neighbors=neighbors,
        radii=np.sqrt(radii_sq),
        radii_sq=radii_sq,
    )


def capture_by(x, center_index: int, geom: CaptureGeometry) -> bool:
    """True iff x lies inside (or on) the hypersphere of the given center."""
    point = _as_vector(x, geom)
    center = geom.source.vectors[center_index]
    d2 = _sq_dists(point[None, :], center[None, :])[0, 0]
    return bool(d2 <= geom.radii_sq[center_index])


def covered(x, geom: CaptureGeometry) -> bool:
    """True iff at least one hypersphere of the geometry contains x."""
    point = _as_vector(x, geom)
    d2 = _sq_dists(point[None, :], geom.source.vectors)[0]
    return bool(np.any(d2 <= geom.radii_sq))


def covered_mask(xs, geom: CaptureGeometry) -> np.ndarray:
    """Boolean array: covered(row, geom) for every row of xs.

    xs may be an EmbeddingSet or a plain (m, d) array.
    """
    rows = _as_matrix(xs, geom)
    out = np.empty(rows.shape[0], dtype=bool)
    for start, stop in _row_blocks(rows.shape[0], len(geom.source), geom.source.dim):
        d2 = _sq_dists(rows[start:stop], geom.source.vectors)
        out[start:stop] = np.any(d2 <= geom.radii_sq[None, :], axis=1)
    return out


def count_covered(xs, geom: CaptureGeometry) -> int:
    """Number of rows of xs covered by at least one hypersphere of geom."""
    return int(covered_mask(xs, geom).sum())


def captures_per_center(xs, geom: CaptureGeometry) -> np.ndarray:
    """For each center of geom, how many rows of xs its hypersphere contains.

    Returns an int64 array of length len(geom.source).
    """
    rows = _as_matrix(xs, geom)
    counts = np.zeros(len(geom.source), dtype=np.int64)
    for start, stop in _row_blocks(rows.shape[0], len(geom.source), geom.source.dim):
        d2 = _sq_dists(rows[start:stop], geom.source.vectors)
        counts += (d2 <= geom.radii_sq[None, :]).sum(axis=0)
    return counts
