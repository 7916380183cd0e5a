"""Command-line surface.

Subcommands: score, sweep-k, synthetic {mode-collapse|noise}, correlate.
Results go to stdout or --out as JSON/CSV; diagnostics go to stderr.  Exit
codes: 0 success, 1 usage error, 2 data or file error.

The environment variable ME_THREADS (positive integer) caps internal
parallelism; it is validated and echoed into the report config.  The current
implementation stays within the cap by computing sequentially, which also
keeps reports byte-reproducible.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .analysis import (
    METRIC_NAMES,
    ScoreSeries,
    k_sweep,
    kendall,
    mode_collapse_experiment,
    noise_sweep_experiment,
    pearson,
    separated_mixture,
    spearman,
)
from .baselines import fid, impar
from .errors import IoError, MarkEvalError
from .estimators import capture_estimate, me_quality_diversity, petersen_estimate, schnabel_estimate
from .fileio import read_embeddings, read_series, render_csv, render_json, report_document

_CORRELATIONS = {"pearson": pearson, "kendall": kendall, "spearman": spearman}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="markeval",
        description="Score an evaluation embedding set against a reference set.",
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    score = commands.add_parser("score", help="score one evaluation file against a reference file")
    score.add_argument("--reference", required=True, help="reference embeddings (NPY v1.0 or CSV)")
    score.add_argument("--evaluation", required=True, help="evaluation embeddings (NPY v1.0 or CSV)")
    score.add_argument("--metric", choices=(*METRIC_NAMES, "all"), default="all")
    score.add_argument("--k", type=int, default=1, help="neighbor count (default 1)")
    _output_flags(score)

    sweep = commands.add_parser("sweep-k", help="run every estimator across k = k-min..k-max")
    sweep.add_argument("--reference", required=True)
    sweep.add_argument("--evaluation", required=True)
    sweep.add_argument("--k-max", type=int, required=True)
    sweep.add_argument("--k-min", type=int, default=1)
    _output_flags(sweep)

    synthetic = commands.add_parser("synthetic", help="seeded Gaussian-mixture experiments")
    synthetic.add_argument("experiment", choices=("mode-collapse", "noise"))
    synthetic.add_argument("--modes", type=int, default=5, help="mixture modes (default 5)")
    synthetic.add_argument("--n", type=int, default=1000, help="samples per side (default 1000)")
    synthetic.add_argument("--d", type=int, default=8, help="dimension (default 8)")
    synthetic.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    synthetic.add_argument("--k", type=int, default=1, help="neighbor count (default 1)")
    synthetic.add_argument("--replicates", type=int, default=1, help="averaged seeds (default 1)")
    synthetic.add_argument("--stddev", type=float, default=1.0, help="mode stddev (default 1.0)")
    synthetic.add_argument(
        "--separation", type=float, default=10.0, help="distance between mode means (default 10.0)"
    )
    synthetic.add_argument(
        "--metrics", default="all", help="comma-separated metric list or 'all' (default all)"
    )
    synthetic.add_argument(
        "--sigmas",
        default="0,0.5,1,2,10",
        help="noise stddevs for the noise experiment, ascending from 0 (default 0,0.5,1,2,10)",
    )
    _output_flags(synthetic)

    correlate = commands.add_parser("correlate", help="correlate metric scores with ratings")
    correlate.add_argument("--scores", required=True, help="single-column CSV or n x 1 NPY")
    correlate.add_argument("--ratings", required=True, help="single-column CSV or n x 1 NPY")
    correlate.add_argument("--method", choices=(*_CORRELATIONS, "all"), default="all")
    _output_flags(correlate)
    return parser


def _output_flags(parser) -> None:
    parser.add_argument("--out", default=None, help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")


def _parse_threads(raw) -> int:
    if raw is None or raw == "":
        return 1
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise _UsageError(f"ME_THREADS must be a positive integer, got {raw!r}")
    return value


def _emit(results, config, args) -> None:
    document = report_document(results, config=config)
    text = render_json(document) if args.format == "json" else render_csv(document)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise IoError(f"{args.out}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


def _metric_list(raw: str) -> list[str]:
    if raw == "all":
        return list(METRIC_NAMES)
    metrics = [name.strip() for name in raw.split(",") if name.strip()]
    unknown = [name for name in metrics if name not in METRIC_NAMES]
    if unknown or not metrics:
        raise _UsageError(
            f"unknown metrics {unknown}; choose from {', '.join(METRIC_NAMES)} or 'all'"
        )
    return metrics


def _cmd_score(args, threads: int) -> None:
    reference = read_embeddings(args.reference)
    evaluation = read_embeddings(args.evaluation)
    if args.k < 1:
        raise _UsageError(f"--k must be >= 1, got {args.k}")
    results = {}
    for metric in _metric_list(args.metric if args.metric != "all" else "all"):
        if metric == "petersen":
            results["petersen"] = petersen_estimate(reference, evaluation, args.k)
        elif metric == "schnabel":
            quality, diversity = me_quality_diversity(reference, evaluation, args.k)
            results["schnabel"] = {
                "quality": quality,
                "diversity": diversity,
                "quality_estimate": schnabel_estimate(reference, evaluation, args.k),
                "diversity_estimate": schnabel_estimate(evaluation, reference, args.k),
            }
        elif metric == "capture":
            results["capture"] = capture_estimate(reference, evaluation, args.k)
        elif metric == "impar":
            results["impar"] = impar(reference, evaluation, args.k)
        elif metric == "fid":
            results["fid"] = fid(reference, evaluation)
    config = {
        "command": "score",
        "reference": str(args.reference),
        "evaluation": str(args.evaluation),
        "metric": args.metric,
        "k": args.k,
        "threads": threads,
    }
    _emit(results, config, args)


def _cmd_sweep(args, threads: int) -> None:
    if args.k_min < 1 or args.k_max < args.k_min:
        raise _UsageError("need 1 <= --k-min <= --k-max")
    reference = read_embeddings(args.reference)
    evaluation = read_embeddings(args.evaluation)
    report = k_sweep(reference, evaluation, range(args.k_min, args.k_max + 1))
    config = {
        "command": "sweep-k",
        "reference": str(args.reference),
        "evaluation": str(args.evaluation),
        "k_min": args.k_min,
        "k_max": args.k_max,
        "threads": threads,
    }
    _emit(report, config, args)


def _cmd_synthetic(args, threads: int) -> None:
    for name, value in (("--modes", args.modes), ("--n", args.n), ("--d", args.d),
                        ("--k", args.k), ("--replicates", args.replicates)):
        if value < 1:
            raise _UsageError(f"{name} must be >= 1, got {value}")
    if args.seed < 0:
        raise _UsageError(f"--seed must be >= 0, got {args.seed}")
    if args.stddev <= 0 or args.separation < 0:
        raise _UsageError("--stddev must be > 0 and --separation >= 0")
    if args.n % args.modes:
        raise _UsageError(f"--n {args.n} must be divisible by --modes {args.modes}")
    metrics = _metric_list(args.metrics)
    spec = separated_mixture(
        args.modes,
        args.d,
        seed=args.seed,
        samples_per_mode=args.n // args.modes,
        separation=args.separation,
        stddev=args.stddev,
    )
    if args.experiment == "mode-collapse":
        report = mode_collapse_experiment(spec, args.k, metrics, n_seeds=args.replicates)
    else:
        try:
            sigmas = [float(part) for part in args.sigmas.split(",")]
        except ValueError:
            raise _UsageError(f"--sigmas must be a comma-separated number list, got {args.sigmas!r}") from None
        try:
            report = noise_sweep_experiment(spec, sigmas, args.k, metrics, n_seeds=args.replicates)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
    config = {
        "command": "synthetic",
        "experiment": args.experiment,
        "modes": args.modes,
        "n": args.n,
        "d": args.d,
        "seed": args.seed,
        "k": args.k,
        "replicates": args.replicates,
        "stddev": args.stddev,
        "separation": args.separation,
        "metrics": ",".join(metrics),
        "sigmas": args.sigmas if args.experiment == "noise" else None,
        "threads": threads,
    }
    _emit(report, config, args)


def _cmd_correlate(args, threads: int) -> None:
    scores = read_series(args.scores)
    ratings = read_series(args.ratings)
    series = ScoreSeries(
        labels=tuple(str(i) for i in range(len(scores))),
        scores=tuple(float(v) for v in scores),
        ratings=tuple(float(v) for v in ratings),
    )
    methods = list(_CORRELATIONS) if args.method == "all" else [args.method]
    results = {
        name: _CORRELATIONS[name](series.scores, series.ratings) for name in methods
    }
    config = {
        "command": "correlate",
        "scores": str(args.scores),
        "ratings": str(args.ratings),
        "method": args.method,
        "threads": threads,
    }
    _emit(results, config, args)


_COMMANDS = {
    "score": _cmd_score,
    "sweep-k": _cmd_sweep,
    "synthetic": _cmd_synthetic,
    "correlate": _cmd_correlate,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help exits through argparse
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        threads = _parse_threads(os.environ.get("ME_THREADS"))
        _COMMANDS[args.command](args, threads)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except MarkEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> int:
    return run_cli()


if __name__ == "__main__":
    raise SystemExit(main())
