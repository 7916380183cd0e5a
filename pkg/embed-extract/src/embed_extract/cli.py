"""Command-line surface: one extraction job per invocation.

Exit codes: 0 success, 1 usage error, 2 data/encoder/file error.  The matrix
goes to --output (word mode adds <output>.json); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from .config import MODES, ExtractionConfig
from .errors import ConfigError, ExtractError
from .extract import run, sidecar_path


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="embed-extract",
        description="Encode a text file (one unit per line) to an NPY embedding matrix.",
    )
    parser.add_argument("--mode", choices=MODES, required=True)
    parser.add_argument("--encoder", required=True, help="encoder identifier or local directory")
    parser.add_argument("--input", required=True, help="UTF-8 text, one unit per line")
    parser.add_argument("--output", required=True, help="NPY v1.0 float32 destination")
    parser.add_argument("--batch-size", type=int, default=32, help="lines per encoder batch (default 32)")
    return parser


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
        config = ExtractionConfig(
            mode=args.mode,
            encoder=args.encoder,
            input_path=args.input,
            output_path=args.output,
            batch_size=args.batch_size,
        )
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        matrix = run(config)
    except ExtractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    note = f"wrote {matrix.shape[0]}x{matrix.shape[1]} float32 to {args.output}"
    if args.mode == "word-last5":
        note += f" (index: {sidecar_path(args.output)})"
    print(note, file=sys.stderr)
    return 0


def main() -> int:
    return run_cli()


if __name__ == "__main__":
    raise SystemExit(main())
