"""Extraction job description."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

MODES = ("sentence", "word-last5")


@dataclass(frozen=True)
class ExtractionConfig:
    """One batch extraction job.

    mode: "sentence" pools one vector per input line; "word-last5" emits five
    vectors per word token (one per encoder layer, deepest of the last five
    first) plus a JSON sidecar mapping row ranges to words.
    encoder: opaque identifier handed to the encoder runtime (a local
    directory or a model hub name); never interpreted here.
    input_path: UTF-8 text, one unit per line.
    output_path: written as NPY v1.0 float32, C order, 2-D.
    """

    mode: str
    encoder: str
    input_path: str
    output_path: str
    batch_size: int = 32

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not isinstance(self.encoder, str) or not self.encoder.strip():
            raise ConfigError("encoder identifier must be a non-empty string")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
