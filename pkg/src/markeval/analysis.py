"""Synthetic experiment harness and correlation statistics.

The experiments stress the metrics the same way the motivating failure modes
do: mode_collapse_experiment removes whole mixture components from the
evaluation side (diversity should fall, quality should hold), and
noise_sweep_experiment perturbs every evaluation vector with growing
isotropic noise (quality should fall, diversity should hold).  k_sweep tracks
how the estimates converge toward the true pool size as the neighborhood
grows.

Randomness: numpy's default PCG64 generator.  Replicate r of an experiment
with master seed s uses seed s + r, and every stream inside a replicate is
derived via SeedSequence(entropy=seed, spawn_key=(role, axis)), so results
are platform-independent and do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import fid, impar
from .errors import (
    DegenerateInputError,
    DimensionMismatchError,
    MinSamplesError,
    NonFiniteError,
    UnknownEstimatorError,
)
from .estimators import (
    DEFAULT_K,
    _capture_estimate,
    _petersen_estimate,
    _schnabel_estimate,
    capture_estimate,
    me_quality_diversity,
    petersen_estimate,
    schnabel_estimate,
)
from .geometry import EmbeddingSet, build_geometry, reduce_k

METRIC_NAMES = ("petersen", "schnabel", "capture", "impar", "fid")

# Roles for spawn keys, so independent streams never collide.
_ROLE_REFERENCE = 0
_ROLE_EVALUATION = 1
_ROLE_PERTURB = 2


@dataclass(frozen=True, eq=False)
class MixtureSpec:
    """Isotropic Gaussian mixture: modes are (mean vector, stddev) pairs."""

    seed: int
    modes: tuple
    samples_per_mode: int
    dim: int

    def __post_init__(self) -> None:
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError(f"seed must fit an unsigned 64-bit integer, got {self.seed}")
        if self.samples_per_mode < 1:
            raise ValueError("samples_per_mode must be >= 1")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if len(self.modes) < 1:
            raise ValueError("need at least 1 mode")
        checked = []
        for mean, stddev in self.modes:
            mean = np.asarray(mean, dtype=np.float64)
            if mean.shape != (self.dim,):
                raise DimensionMismatchError(
                    f"mode mean of shape {mean.shape} does not match dim {self.dim}"
                )
            if not np.all(np.isfinite(mean)):
                raise NonFiniteError("mode mean contains NaN or Inf")
            if not stddev > 0:
                raise ValueError(f"mode stddev must be > 0, got {stddev}")
            checked.append((mean, float(stddev)))
        object.__setattr__(self, "modes", tuple(checked))

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def size(self) -> int:
        return self.n_modes * self.samples_per_mode


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """Axis values plus one equally-long score series per reported metric."""

    name: str
    axis_label: str
    axis_values: tuple
    series: dict
    seeds: tuple
    config: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for metric, values in self.series.items():
            if len(values) != len(self.axis_values):
                raise ValueError(
                    f"series {metric!r} has {len(values)} values for "
                    f"{len(self.axis_values)} axis points"
                )


@dataclass(frozen=True, eq=False)
class ScoreSeries:
    """Per-system metric scores paired with external ratings."""

    labels: tuple
    scores: tuple
    ratings: tuple

    def __post_init__(self) -> None:
        if not (len(self.labels) == len(self.scores) == len(self.ratings)):
            raise DimensionMismatchError(
                f"labels/scores/ratings lengths differ: "
                f"{len(self.labels)}/{len(self.scores)}/{len(self.ratings)}"
            )
        if len(self.scores) < 3:
            raise DegenerateInputError(
                f"need at least 3 paired observations, got {len(self.scores)}"
            )


def separated_mixture(
    n_modes: int,
    dim: int,
    *,
    seed: int,
    samples_per_mode: int,
    separation: float = 10.0,
    stddev: float = 1.0,
) -> MixtureSpec:
    """Standard experiment layout: mode m centered at (m * separation) along axis 0."""
    modes = []
    for m in range(n_modes):
        mean = np.zeros(dim)
        mean[0] = m * separation
        modes.append((mean, stddev))
    return MixtureSpec(seed=seed, modes=tuple(modes), samples_per_mode=samples_per_mode, dim=dim)


def gen_mixture(spec: MixtureSpec) -> EmbeddingSet:
    """Draw the mixture; deterministic for a fixed spec.

    Rows come out grouped by mode in declaration order, so row r belongs to
    mode r // samples_per_mode.
    """
    rng = np.random.default_rng(spec.seed)
    blocks = [
        mean + stddev * rng.standard_normal((spec.samples_per_mode, spec.dim))
        for mean, stddev in spec.modes
    ]
    return EmbeddingSet(
        np.concatenate(blocks, axis=0),
        label=f"mixture(seed={spec.seed}, modes={spec.n_modes})",
    )


def _derived_seed(seed: int, *key: int) -> int:
    state = np.random.SeedSequence(entropy=seed, spawn_key=key).generate_state(1, np.uint64)
    return int(state[0])


def _spawned_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def _pair_scores(reference: EmbeddingSet, evaluation: EmbeddingSet, k: int, metrics) -> dict:
    """Score one reference/evaluation pair; Schnabel and IMPAR are double-valued."""
    out: dict[str, float] = {}
    for metric in metrics:
        if metric == "petersen":
            out["petersen"] = petersen_estimate(reference, evaluation, k).score
        elif metric == "schnabel":
            quality, diversity = me_quality_diversity(reference, evaluation, k)
            out["schnabel_quality"] = quality
            out["schnabel_diversity"] = diversity
        elif metric == "capture":
            out["capture"] = capture_estimate(reference, evaluation, k).score
        elif metric == "impar":
            result = impar(reference, evaluation, k)
            out["impar_precision"] = result.precision
            out["impar_recall"] = result.recall
        elif metric == "fid":
            out["fid"] = fid(reference, evaluation)
        else:
            raise UnknownEstimatorError(
                f"unknown metric {metric!r}; expected one of {', '.join(METRIC_NAMES)}"
            )
    return out


def _mean_series(per_axis: list[list[dict]]) -> dict:
    """Average replicate score dicts into one series per metric key."""
    keys = list(per_axis[0][0].keys())
    return {
        key: tuple(float(np.mean([run[key] for run in runs])) for runs in per_axis)
        for key in keys
    }


def mode_collapse_experiment(
    base: MixtureSpec,
    k: int = DEFAULT_K,
    metrics=("schnabel",),
    n_seeds: int = 1,
) -> ExperimentReport:
    """Drop 0..(modes-1) trailing modes from the evaluation side.

    The reference stays the full mixture; whenever modes were dropped, the
    surviving evaluation rows are resampled with replacement back up to the
    reference size, keeping both sides equal.  Reported series are replicate
    means.
    """
    if base.n_modes < 2:
        raise ValueError("mode collapse needs at least 2 modes")
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    axis = tuple(range(base.n_modes))
    per_axis: list[list[dict]] = [[] for _ in axis]
    seeds = tuple(base.seed + r for r in range(n_seeds))
    for seed in seeds:
        reference = gen_mixture(replace(base, seed=_derived_seed(seed, _ROLE_REFERENCE)))
        evaluation = gen_mixture(replace(base, seed=_derived_seed(seed, _ROLE_EVALUATION)))
        for dropped in axis:
            surviving = evaluation.vectors[: (base.n_modes - dropped) * base.samples_per_mode]
            if dropped:
                rng = _spawned_rng(seed, _ROLE_PERTURB, dropped)
                rows = rng.integers(0, len(surviving), size=base.size)
                surviving = surviving[rows]
            collapsed = EmbeddingSet(surviving, label=f"evaluation-dropped-{dropped}")
            per_axis[dropped].append(_pair_scores(reference, collapsed, k, metrics))
    return ExperimentReport(
        name="mode-collapse",
        axis_label="dropped_modes",
        axis_values=axis,
        series=_mean_series(per_axis),
        seeds=seeds,
        config={
            "k": k,
            "modes": base.n_modes,
            "samples_per_mode": base.samples_per_mode,
            "n_per_side": base.size,
            "dim": base.dim,
            "metrics": tuple(metrics),
            "replicates": n_seeds,
            "master_seed": base.seed,
        },
    )


def noise_sweep_experiment(
    base: MixtureSpec,
    sigmas,
    k: int = DEFAULT_K,
    metrics=("schnabel",),
    n_seeds: int = 1,
) -> ExperimentReport:
    """Add isotropic Gaussian noise of growing stddev to the evaluation copy.

    sigmas must be ascending and start at 0, so the first axis point is the
    matched-distribution baseline.
    """
    sigmas = tuple(float(s) for s in sigmas)
    if not sigmas or sigmas[0] != 0.0:
        raise ValueError("sigmas must start at 0")
    if any(b < a for a, b in zip(sigmas, sigmas[1:])):
        raise ValueError("sigmas must be ascending")
    if not all(np.isfinite(sigmas)):
        raise ValueError("sigmas must be finite")
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    per_axis: list[list[dict]] = [[] for _ in sigmas]
    seeds = tuple(base.seed + r for r in range(n_seeds))
    for seed in seeds:
        reference = gen_mixture(replace(base, seed=_derived_seed(seed, _ROLE_REFERENCE)))
        evaluation = gen_mixture(replace(base, seed=_derived_seed(seed, _ROLE_EVALUATION)))
        for j, sigma in enumerate(sigmas):
            vectors = evaluation.vectors
            if sigma > 0:
                rng = _spawned_rng(seed, _ROLE_PERTURB, j)
                vectors = vectors + sigma * rng.standard_normal(vectors.shape)
            noisy = EmbeddingSet(vectors, label=f"evaluation-sigma-{sigma}")
            per_axis[j].append(_pair_scores(reference, noisy, k, metrics))
    return ExperimentReport(
        name="noise",
        axis_label="sigma",
        axis_values=sigmas,
        series=_mean_series(per_axis),
        seeds=seeds,
        config={
            "k": k,
            "modes": base.n_modes,
            "samples_per_mode": base.samples_per_mode,
            "n_per_side": base.size,
            "dim": base.dim,
            "metrics": tuple(metrics),
            "replicates": n_seeds,
            "master_seed": base.seed,
        },
    )


def k_sweep(first: EmbeddingSet, second: EmbeddingSet, k_values) -> ExperimentReport:
    """Population estimates and scores of all three estimators across k values."""
    k_values = tuple(int(k) for k in k_values)
    if not k_values:
        raise ValueError("k_values must be non-empty")
    if min(k_values) < 1:
        raise ValueError("k values must be >= 1")
    if max(k_values) >= min(len(first), len(second)):
        raise MinSamplesError(
            f"max k {max(k_values)} needs more than {max(k_values)} samples per set"
        )
    series: dict[str, list[float]] = {
        "petersen_population": [],
        "petersen_score": [],
        "schnabel_population": [],
        "schnabel_score": [],
        "capture_population": [],
        "capture_score": [],
    }
    # One neighbor search per set at the largest k; smaller-k geometries are
    # prefix slices of it, so each sweep point costs only the cross passes.
    k_top = max(k_values)
    geom_first_top = build_geometry(first, k_top)
    geom_second_top = build_geometry(second, k_top)
    for k in k_values:
        geom_first = reduce_k(geom_first_top, k)
        geom_second = reduce_k(geom_second_top, k)
        for name, runner in (
            ("petersen", _petersen_estimate),
            ("schnabel", _schnabel_estimate),
            ("capture", _capture_estimate),
        ):
            estimate = runner(geom_first, geom_second)
            series[f"{name}_population"].append(estimate.estimated_population)
            series[f"{name}_score"].append(estimate.score)
    return ExperimentReport(
        name="k-sweep",
        axis_label="k",
        axis_values=k_values,
        series={key: tuple(values) for key, values in series.items()},
        seeds=(),
        config={
            "n_first": len(first),
            "n_second": len(second),
            "dim": first.dim,
        },
    )


def _correlation_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.ndim != 1 or ys.ndim != 1:
        raise DimensionMismatchError("correlation inputs must be 1-D")
    if xs.shape[0] != ys.shape[0]:
        raise DimensionMismatchError(
            f"correlation inputs have different lengths: {xs.shape[0]} vs {ys.shape[0]}"
        )
    if xs.shape[0] < 3:
        raise DegenerateInputError(f"need at least 3 points, got {xs.shape[0]}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise NonFiniteError("correlation inputs contain NaN or Inf")
    return xs, ys


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    xs, ys = _correlation_pair(x, y)
    xc = xs - xs.mean()
    yc = ys - ys.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("zero variance in a correlation input")
    value = float(xc @ yc) / np.sqrt(sxx * syy)
    return float(min(max(value, -1.0), 1.0))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    _, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts
    # Average 1-based rank of each tie group.
    average = (starts + ends - 1) / 2.0 + 1.0
    return average[inverse]


def spearman(x, y) -> float:
    """Pearson correlation of average ranks (ties share their mean rank)."""
    xs, ys = _correlation_pair(x, y)
    return pearson(_average_ranks(xs), _average_ranks(ys))


def kendall(x, y) -> float:
    """Kendall tau-b: tie-corrected concordant/discordant pair balance."""
    xs, ys = _correlation_pair(x, y)
    n = xs.shape[0]
    upper = np.triu_indices(n, k=1)
    dx = np.sign(xs[:, None] - xs[None, :])[upper]
    dy = np.sign(ys[:, None] - ys[None, :])[upper]
    balance = float((dx * dy).sum())
    pairs = n * (n - 1) // 2
    tied_x = int((dx == 0).sum())
    tied_y = int((dy == 0).sum())
    if tied_x == pairs or tied_y == pairs:
        raise DegenerateInputError("all pairs tied in a correlation input")
    value = balance / np.sqrt(float(pairs - tied_x) * float(pairs - tied_y))
    return float(min(max(value, -1.0), 1.0))
