"""Batch text-to-embedding extraction for downstream embedding-set scoring.

Turns a UTF-8 text file (one unit per line) into a strict NPY v1.0 float32
matrix, either one mean-pooled vector per line ("sentence" mode) or five
vectors per word token from the encoder's last five layers ("word-last5"
mode, with a JSON sidecar mapping row ranges to words).
"""

from .config import MODES, ExtractionConfig
from .errors import (
    ConfigError,
    EmptyInputError,
    EncoderUnavailableError,
    ExtractError,
    IoError,
)
from .extract import (
    WORD_LAYERS,
    encode_sentences,
    encode_words_last5,
    load_encoder,
    run,
    sidecar_path,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "MODES",
    "WORD_LAYERS",
    "ExtractionConfig",
    "ExtractError",
    "ConfigError",
    "EncoderUnavailableError",
    "EmptyInputError",
    "IoError",
    "encode_sentences",
    "encode_words_last5",
    "load_encoder",
    "run",
    "sidecar_path",
]
