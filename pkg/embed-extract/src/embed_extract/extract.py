"""Batch text-to-embedding extraction.

Two modes share one pipeline: read UTF-8 lines, run a pretrained encoder in
inference mode over line batches, pool hidden states, and write the pooled
vectors as a strict NPY v1.0 float32 matrix.  Output row order always follows
input order.  Word mode additionally writes a JSON sidecar
{"word_spans": [[start, end, word], ...]} partitioning the rows by word.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import ExtractionConfig
from .errors import (
    ConfigError,
    EmptyInputError,
    EncoderUnavailableError,
    IoError,
)

# Five rows per word: one per encoder layer, deepest of the five first.
WORD_LAYERS = 5


def load_encoder(identifier: str):
    """Load (tokenizer, model) for an opaque encoder identifier.

    The identifier passes straight to the encoder runtime; a local directory
    works offline.  Any loading failure surfaces as EncoderUnavailableError.
    """
    try:
        import torch  # noqa: F401
        from transformers import AutoModel, AutoTokenizer
    except ImportError as exc:
        raise EncoderUnavailableError(f"encoder runtime not installed: {exc}") from exc
    try:
        tokenizer = AutoTokenizer.from_pretrained(identifier)
        model = AutoModel.from_pretrained(identifier)
    except Exception as exc:
        raise EncoderUnavailableError(f"cannot load encoder {identifier!r}: {exc}") from exc
    model.eval()
    return tokenizer, model


def _read_lines(path) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise IoError(f"{path}: not UTF-8 text ({exc})") from exc
    lines = text.splitlines()
    if not lines:
        raise EmptyInputError(f"{path}: no input lines")
    return lines


def _write_npy(matrix: np.ndarray, path) -> None:
    # Write exactly the requested path (np.save would append ".npy").
    out = np.ascontiguousarray(matrix, dtype=np.float32)
    try:
        with open(path, "wb") as fh:
            np.lib.format.write_array(fh, out, version=(1, 0))
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def _max_length(model) -> int | None:
    return getattr(model.config, "max_position_embeddings", None)


def _batches(lines: list[str], size: int):
    for start in range(0, len(lines), size):
        yield lines[start:start + size]


def encode_sentences(config: ExtractionConfig) -> np.ndarray:
    """One pooled vector per input line; returns the written matrix.

    Pooling is the mean of the final hidden layer over non-padding positions.
    Blank lines are kept (they encode to the special-token-only vector) so
    output row i always corresponds to input line i.
    """
    if config.mode != "sentence":
        raise ConfigError(f"encode_sentences called with mode {config.mode!r}")
    import torch

    lines = _read_lines(config.input_path)
    tokenizer, model = load_encoder(config.encoder)
    chunks = []
    with torch.no_grad():
        for batch in _batches(lines, config.batch_size):
            enc = tokenizer(
                batch,
                padding=True,
                truncation=True,
                max_length=_max_length(model),
                return_tensors="pt",
            )
            hidden = model(**enc).last_hidden_state
            mask = enc["attention_mask"].unsqueeze(-1).to(hidden.dtype)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
            chunks.append(pooled.cpu().numpy())
    matrix = np.concatenate(chunks, axis=0).astype(np.float32)
    _write_npy(matrix, config.output_path)
    return matrix


def sidecar_path(output_path) -> Path:
    """The word-mode index file sits next to the matrix as <output>.json."""
    return Path(f"{output_path}.json")


def encode_words_last5(config: ExtractionConfig) -> np.ndarray:
    """Five rows per word token (last five encoder layers, deepest first).

    Subword pieces belonging to one word are mean-pooled per layer.  The
    sidecar lists [start, end, word] row ranges in input order; the ranges
    partition [0, 5W) without gaps or overlaps.
    """
    if config.mode != "word-last5":
        raise ConfigError(f"encode_words_last5 called with mode {config.mode!r}")
    import torch

    lines = _read_lines(config.input_path)
    tokenizer, model = load_encoder(config.encoder)
    rows: list[np.ndarray] = []
    spans: list[list] = []
    with torch.no_grad():
        for batch in _batches(lines, config.batch_size):
            enc = tokenizer(
                batch,
                padding=True,
                truncation=True,
                max_length=_max_length(model),
                return_tensors="pt",
                return_offsets_mapping=True,
            )
            offsets = enc.pop("offset_mapping")
            outputs = model(**enc, output_hidden_states=True)
            # (WORD_LAYERS, batch, positions, width), deepest of the five first
            stacked = torch.stack(outputs.hidden_states[-WORD_LAYERS:], dim=0)
            for index, line in enumerate(batch):
                word_positions: dict[int, list[int]] = {}
                for position, word_id in enumerate(enc.word_ids(batch_index=index)):
                    if word_id is not None:
                        word_positions.setdefault(word_id, []).append(position)
                for word_id in sorted(word_positions):
                    positions = word_positions[word_id]
                    pooled = stacked[:, index, positions, :].mean(dim=1)
                    start_char = min(int(offsets[index, p, 0]) for p in positions)
                    end_char = max(int(offsets[index, p, 1]) for p in positions)
                    start_row = len(rows)
                    rows.extend(pooled.cpu().numpy().astype(np.float32))
                    spans.append([start_row, start_row + WORD_LAYERS, line[start_char:end_char]])
    if not spans:
        raise EmptyInputError(f"{config.input_path}: no word tokens to encode")
    matrix = np.stack(rows).astype(np.float32)
    _write_npy(matrix, config.output_path)
    try:
        sidecar_path(config.output_path).write_text(
            json.dumps({"word_spans": spans}, ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
    except OSError as exc:
        raise IoError(f"{sidecar_path(config.output_path)}: {exc.strerror or exc}") from exc
    return matrix


def run(config: ExtractionConfig) -> np.ndarray:
    """Dispatch a job to its mode's encoder."""
    if config.mode == "sentence":
        return encode_sentences(config)
    return encode_words_last5(config)
