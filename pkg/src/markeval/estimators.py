"""Closed-population estimators scoring one embedding set against another.

The two input collections are always treated as disjoint indexed populations,
so the true pool size is P = |first| + |second| even when the matrices are
numerically identical.  Each estimator turns hypersphere captures into an
estimate P-hat of that pool size; the score is 1 minus the clamped relative
error, so 1 means the estimator saw the two sets as one homogeneous
population and 0 means it found (or inferred) essentially no overlap.

Identical sets give exact integer counts (every capture is a recapture) and
the ratio estimators return a bit-exact score of 1.0.  The likelihood
estimator shares this property only while the expected never-captured mass
2n * exp(-2(k+1)) stays negligible; see capture_estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DimensionMismatchError, DomainError, UnknownEstimatorError
from .geometry import (
    CaptureGeometry,
    EmbeddingSet,
    build_geometry,
    captures_per_center,
    covered_mask,
)

DEFAULT_K = 1

# Upper bound of the likelihood search, as a multiple of the true pool size.
CAPTURE_SEARCH_FACTOR = 10

ESTIMATOR_NAMES = ("petersen", "schnabel", "capture")


@dataclass(frozen=True)
class PetersenCounts:
    """Single-occasion counts: marked M, captured C, recaptured R."""

    marked: int
    captured: int
    recaptured: int


@dataclass(frozen=True)
class SchnabelIteration:
    """One recapture occasion of the Schnabel sweep (index is 1-based)."""

    index: int
    captures: int
    recaptures: int
    marked_after: int


@dataclass(frozen=True)
class SchnabelCounts:
    """Aggregated multi-occasion counts plus the per-iteration trace."""

    total_marked: int
    total_captured: int
    total_recaptured: int
    trace: tuple[SchnabelIteration, ...]


@dataclass(frozen=True)
class CaptureCounts:
    """Occasion count T, unique marked M_T, and total captures across occasions."""

    occasions: int
    unique_marked: int
    total_captures: int


@dataclass(frozen=True)
class Estimate:
    """Result of one estimator run.

    estimated_population may be +inf (no recaptures).  boundary_hit is set
    when the likelihood search for the capture estimator ended on its upper
    search bound, i.e. the reported maximum may be a truncation artifact.
    """

    estimator: str
    true_population: int
    estimated_population: float
    accuracy_loss: float
    score: float
    counts: PetersenCounts | SchnabelCounts | CaptureCounts
    boundary_hit: bool = False


def accuracy_loss(true_population: int, estimated_population: float) -> float:
    """Relative estimation error |P_hat - P| / P, clamped to [0, 1].

    An infinite estimate maps to 1.
    """
    if true_population < 1:
        raise ValueError(f"true population must be >= 1, got {true_population}")
    if math.isinf(estimated_population):
        return 1.0
    return min(abs(estimated_population - true_population) / true_population, 1.0)


def _finish(name: str, pool: int, estimate: float, counts, boundary_hit: bool = False) -> Estimate:
    loss = accuracy_loss(pool, estimate)
    return Estimate(
        estimator=name,
        true_population=pool,
        estimated_population=float(estimate),
        accuracy_loss=loss,
        score=1.0 - loss,
        counts=counts,
        boundary_hit=boundary_hit,
    )


def _geometry_pair(first: EmbeddingSet, second: EmbeddingSet, k: int):
    if first.dim != second.dim:
        raise DimensionMismatchError(
            f"sets have different dimensions: {first.dim} vs {second.dim}"
        )
    return build_geometry(first, k), build_geometry(second, k)


def _petersen_counts(geom_first: CaptureGeometry, geom_second: CaptureGeometry) -> PetersenCounts:
    second_in_first = int(covered_mask(geom_second.source, geom_first).sum())
    first_in_second = int(covered_mask(geom_first.source, geom_second).sum())
    return PetersenCounts(
        marked=len(geom_first.source) + second_in_first,
        captured=len(geom_second.source) + first_in_second,
        recaptured=second_in_first + first_in_second,
    )


def petersen_counts(first: EmbeddingSet, second: EmbeddingSet, k: int = DEFAULT_K) -> PetersenCounts:
    """Marking-step counts: M and C carry cross-covered samples, R their sum.

    A sample of either set counts as recaptured when it falls inside at least
    one hypersphere of the other set.
    """
    return _petersen_counts(*_geometry_pair(first, second, k))


def _petersen_estimate(geom_first: CaptureGeometry, geom_second: CaptureGeometry) -> Estimate:
    counts = _petersen_counts(geom_first, geom_second)
    pool = len(geom_first.source) + len(geom_second.source)
    if counts.recaptured == 0:
        return _finish("petersen", pool, math.inf, counts)
    # Exact integer product before the single float division keeps identical
    # sets at a bit-exact score of 1.0.
    estimate = counts.captured * counts.marked / counts.recaptured
    return _finish("petersen", pool, estimate, counts)


def petersen_estimate(first: EmbeddingSet, second: EmbeddingSet, k: int = DEFAULT_K) -> Estimate:
    """Single-recapture estimate P_hat = C * M / R; +inf when R == 0.

    Symmetric: swapping the arguments yields an identical Estimate.
    """
    return _petersen_estimate(*_geometry_pair(first, second, k))


def _schnabel_counts(geom_first: CaptureGeometry, geom_second: CaptureGeometry) -> SchnabelCounts:
    n_first = len(geom_first.source)
    n_second = len(geom_second.source)
    k = geom_second.k
    # Marking step: all of first, plus every second-set sample already inside
    # the first set's manifold estimate.
    marked = covered_mask(geom_second.source, geom_first)
    cross = captures_per_center(geom_first.source, geom_second)
    trace: list[SchnabelIteration] = []
    total_captured = 0
    total_recaptured = 0
    for i in range(n_second):
        caught = int(cross[i])
        captures = (k + 1) + caught
        members = geom_second.neighbors[i]
        already_marked = int(marked[i]) + int(marked[members].sum())
        recaptures = caught + already_marked
        marked[i] = True
        marked[members] = True
        total_captured += captures
        total_recaptured += recaptures
        trace.append(
            SchnabelIteration(
                index=i + 1,
                captures=captures,
                recaptures=recaptures,
                marked_after=n_first + int(marked.sum()),
            )
        )
    return SchnabelCounts(
        total_marked=n_first + n_second,
        total_captured=total_captured,
        total_recaptured=total_recaptured,
        trace=tuple(trace),
    )


def schnabel_counts(first: EmbeddingSet, second: EmbeddingSet, k: int = DEFAULT_K) -> SchnabelCounts:
    """Multi-occasion counts from one sweep over the second set, in row order.

    Occasion i captures the second-set sample s_i, its k neighbors, and every
    first-set sample inside s_i's hypersphere; recaptures are the first-set
    captures (marked wholesale up front) plus the already-marked members of
    {s_i} plus neighbors.  The trace records each occasion, making the
    order-sensitivity of total_recaptured auditable.
    """
    return _schnabel_counts(*_geometry_pair(first, second, k))


def _schnabel_estimate(geom_first: CaptureGeometry, geom_second: CaptureGeometry) -> Estimate:
    counts = _schnabel_counts(geom_first, geom_second)
    pool = len(geom_first.source) + len(geom_second.source)
    if counts.total_recaptured == 0:
        return _finish("schnabel", pool, math.inf, counts)
    estimate = counts.total_captured * counts.total_marked / counts.total_recaptured
    return _finish("schnabel", pool, estimate, counts)


def schnabel_estimate(first: EmbeddingSet, second: EmbeddingSet, k: int = DEFAULT_K) -> Estimate:
    """Multi-occasion estimate P_hat = C_T * M_T / R_T; +inf when R_T == 0.

    Not symmetric: the second set drives the occasion sweep.  See
    me_quality_diversity for the two-directional reading.
    """
    return _schnabel_estimate(*_geometry_pair(first, second, k))


def me_quality_diversity(
    reference: EmbeddingSet, evaluation: EmbeddingSet, k: int = DEFAULT_K
) -> tuple[float, float]:
    """Schnabel score in both directions: (quality, diversity).

    Quality sweeps the evaluation set against the reference manifold;
    diversity is the same computation with the roles swapped.  Swapping the
    arguments therefore swaps the tuple.
    """
    quality = schnabel_estimate(reference, evaluation, k).score
    diversity = schnabel_estimate(evaluation, reference, k).score
    return quality, diversity


def _capture_counts(geom_first: CaptureGeometry, geom_second: CaptureGeometry) -> CaptureCounts:
    n_first = len(geom_first.source)
    n_second = len(geom_second.source)
    k = geom_first.k
    into_first = int(captures_per_center(geom_second.source, geom_first).sum())
    into_second = int(captures_per_center(geom_first.source, geom_second).sum())
    total = into_first + n_first * (k + 1) + into_second + n_second * (k + 1)
    pool = n_first + n_second
    return CaptureCounts(occasions=pool, unique_marked=pool, total_captures=total)


def capture_counts(first: EmbeddingSet, second: EmbeddingSet, k: int = DEFAULT_K) -> CaptureCounts:
    """Every sample opens one capture occasion; totals are symmetric in the sets.

    An occasion centered at x captures x itself, its k same-set neighbors,
    and every other-set sample inside x's hypersphere.
    """
    return _capture_counts(*_geometry_pair(first, second, k))


def capture_loglik(population: int, counts: CaptureCounts) -> float:
    """Profile log-likelihood of a candidate population size.

    L(P) = ln(P! / (P - M_T)!) + C ln C + (T P - C) ln(T P - C) - T P ln(T P)
    with the x ln x term taken as 0 in the limit x -> 0.  Factorials go
    through lgamma, so no big-integer arithmetic is involved.
    """
    m_total = counts.unique_marked
    if population < m_total:
        raise DomainError(
            f"population {population} is below the number of marked samples {m_total}"
        )
    trials = counts.occasions * population
    caught = counts.total_captures
    if trials < caught:
        raise DomainError(
            f"occasions * population = {trials} cannot be below total captures {caught}"
        )
    missed = trials - caught
    value = math.lgamma(population + 1) - math.lgamma(population - m_total + 1)
    value += caught * math.log(caught)
    if missed > 0:
        value += missed * math.log(missed)
    value -= trials * math.log(trials)
    return value


def _capture_estimate(geom_first: CaptureGeometry, geom_second: CaptureGeometry) -> Estimate:
    counts = _capture_counts(geom_first, geom_second)
    pool = len(geom_first.source) + len(geom_second.source)
    p_max = CAPTURE_SEARCH_FACTOR * pool
    best_p = counts.unique_marked
    best_value = capture_loglik(best_p, counts)
    for candidate in range(counts.unique_marked + 1, p_max + 1):
        value = capture_loglik(candidate, counts)
        if value > best_value:
            best_p, best_value = candidate, value
    return _finish("capture", pool, float(best_p), counts, boundary_hit=best_p == p_max)


def capture_estimate(first: EmbeddingSet, second: EmbeddingSet, k: int = DEFAULT_K) -> Estimate:
    """Maximum-likelihood estimate over integer P in [M_T, 10 * M_T].

    Ties break toward the smaller P.  When the argmax lands on the upper
    search bound the Estimate is flagged boundary_hit; the score is still
    computed from it.  Symmetric in the two sets.

    Note the estimate exceeds M_T on identical sets once the expected
    never-captured mass 2n * exp(-2(k+1)) becomes non-negligible (k=1 and
    n around 14 or more); that is a property of the likelihood itself, not
    of the search.
    """
    return _capture_estimate(*_geometry_pair(first, second, k))


_DISPATCH = {
    "petersen": petersen_estimate,
    "schnabel": schnabel_estimate,
    "capture": capture_estimate,
}


def me_score(name: str, first: EmbeddingSet, second: EmbeddingSet, k: int = DEFAULT_K) -> Estimate:
    """Run the named estimator; name must be one of ESTIMATOR_NAMES."""
    try:
        runner = _DISPATCH[name]
    except KeyError:
        raise UnknownEstimatorError(
            f"unknown estimator {name!r}; expected one of {', '.join(ESTIMATOR_NAMES)}"
        ) from None
    return runner(first, second, k)
