"""File ingestion and report serialization.

Embedding files come in two formats, detected by content rather than suffix:

* NPY version 1.0, restricted to little-endian float32/float64, C order, 2-D
  shape.  The header is parsed by hand against that whitelist instead of
  delegated to a general loader, so anything outside the contract fails with
  a FormatError naming the problem.
* CSV with numeric cells, one row per sample; a single header line is
  auto-detected when the first row has any non-numeric cell.

Reports serialize to JSON (top-level keys tool_version / config / results) or
to a flat CSV with one row per (axis point, metric).  JSON numbers use
Python's shortest round-trip repr, i.e. up to 17 significant digits, and an
infinite estimate is emitted as the bare Infinity literal (Python's json
extension); CSV writes it as "inf".
"""

from __future__ import annotations

import ast
import csv
import io
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import ExperimentReport
from .baselines import PrecisionRecall
from .errors import (
    EmptyFileError,
    FormatError,
    IoError,
    NonFiniteError,
    RaggedRowsError,
)
from .estimators import Estimate
from .geometry import EmbeddingSet

_NPY_MAGIC = b"\x93NUMPY"
_SUPPORTED_DTYPES = ("<f4", "<f8")


def _read_bytes(path) -> bytes:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    if not data:
        raise EmptyFileError(f"{path}: file is empty")
    return data


def _parse_npy(data: bytes, path) -> np.ndarray:
    if len(data) < 10:
        raise FormatError(f"{path}: truncated NPY preamble")
    major, minor = data[6], data[7]
    if (major, minor) != (1, 0):
        raise FormatError(
            f"{path}: unsupported NPY version {major}.{minor}, only 1.0 is supported"
        )
    header_len = int.from_bytes(data[8:10], "little")
    body_start = 10 + header_len
    if len(data) < body_start:
        raise FormatError(f"{path}: truncated NPY header")
    try:
        header = ast.literal_eval(data[10:body_start].decode("latin-1").strip())
    except (ValueError, SyntaxError) as exc:
        raise FormatError(f"{path}: malformed NPY header: {exc}") from exc
    if not isinstance(header, dict):
        raise FormatError(f"{path}: NPY header is not a dict literal")
    descr = header.get("descr")
    if descr not in _SUPPORTED_DTYPES:
        raise FormatError(
            f"{path}: unsupported dtype {descr!r}, expected one of {_SUPPORTED_DTYPES}"
        )
    if header.get("fortran_order") is not False:
        raise FormatError(f"{path}: Fortran-ordered arrays are not supported")
    shape = header.get("shape")
    if not (
        isinstance(shape, tuple)
        and len(shape) == 2
        and all(isinstance(s, int) and s >= 0 for s in shape)
    ):
        raise FormatError(f"{path}: expected a 2-D shape, got {shape!r}")
    dtype = np.dtype(descr)
    expected = shape[0] * shape[1] * dtype.itemsize
    body = data[body_start:]
    if len(body) != expected:
        raise FormatError(
            f"{path}: data section holds {len(body)} bytes, shape {shape} needs {expected}"
        )
    return np.frombuffer(body, dtype=dtype).reshape(shape).astype(np.float64)


def _parse_csv(data: bytes, path) -> np.ndarray:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: neither NPY (no magic) nor UTF-8 text: {exc}") from exc
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise EmptyFileError(f"{path}: no data rows")

    def numeric(row):
        return [float(cell) for cell in row]

    try:
        numeric(rows[0])
    except ValueError:
        rows = rows[1:]  # single header line
        if not rows:
            raise EmptyFileError(f"{path}: header but no data rows") from None
    width = len(rows[0])
    values = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowsError(
                f"{path}: data row {i + 1} has {len(row)} cells, expected {width}"
            )
        try:
            values.append(numeric(row))
        except ValueError as exc:
            raise FormatError(f"{path}: non-numeric cell in data row {i + 1}: {exc}") from exc
    return np.array(values, dtype=np.float64)


def read_embeddings(path) -> EmbeddingSet:
    """Load an embedding matrix from an NPY v1.0 or CSV file.

    The returned set is labeled with the path.  Finiteness and the minimum
    sample count are enforced by the EmbeddingSet constructor.
    """
    data = _read_bytes(path)
    if data[: len(_NPY_MAGIC)] == _NPY_MAGIC:
        matrix = _parse_npy(data, path)
    else:
        matrix = _parse_csv(data, path)
    return EmbeddingSet(matrix, label=str(path))


def read_series(path) -> np.ndarray:
    """Load a single-column file (CSV or n x 1 NPY) as a 1-D float array."""
    data = _read_bytes(path)
    if data[: len(_NPY_MAGIC)] == _NPY_MAGIC:
        matrix = _parse_npy(data, path)
    else:
        matrix = _parse_csv(data, path)
    if matrix.ndim != 2 or matrix.shape[1] != 1:
        raise FormatError(
            f"{path}: expected a single column, got shape {tuple(matrix.shape)}"
        )
    values = matrix[:, 0]
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"{path}: series contains NaN or Inf")
    return values


def _results_payload(obj):
    """Convert result objects into plain JSON-serializable structures."""
    if isinstance(obj, Estimate):
        payload = {
            "estimator": obj.estimator,
            "score": obj.score,
            "accuracy_loss": obj.accuracy_loss,
            "estimated_population": obj.estimated_population,
            "true_population": obj.true_population,
            "boundary_hit": obj.boundary_hit,
            "counts": {
                key: value
                for key, value in asdict(obj.counts).items()
                if key != "trace"  # per-iteration records stay in the API
            },
        }
        return payload
    if isinstance(obj, PrecisionRecall):
        return {"precision": obj.precision, "recall": obj.recall}
    if isinstance(obj, ExperimentReport):
        return {
            "experiment": obj.name,
            "axis": obj.axis_label,
            "axis_values": list(obj.axis_values),
            "series": {key: list(values) for key, values in obj.series.items()},
            "seeds": list(obj.seeds),
            "config": _results_payload(obj.config),
        }
    if isinstance(obj, dict):
        return {str(key): _results_payload(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_results_payload(value) for value in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def report_document(results, config=None) -> dict:
    """Assemble the serializable report envelope."""
    return {
        "tool_version": __version__,
        "config": _results_payload(config or {}),
        "results": _results_payload(results),
    }


def render_json(document: dict) -> str:
    return json.dumps(document, indent=2) + "\n"


def _flat_numeric(obj, prefix=""):
    """Yield (dotted key, number) for every numeric leaf of a payload."""
    if isinstance(obj, dict):
        for key, value in obj.items():
            yield from _flat_numeric(value, f"{prefix}{key}.")
    elif isinstance(obj, bool):
        yield prefix[:-1], int(obj)
    elif isinstance(obj, (int, float)):
        yield prefix[:-1], obj


def render_csv(document: dict) -> str:
    """Flatten results to axis,axis_value,metric,value rows.

    Experiment reports produce one row per (axis point, series); any other
    payload counts as a single axis point with empty axis columns and one row
    per numeric leaf.
    """
    results = document["results"]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["axis", "axis_value", "metric", "value"])
    if isinstance(results, dict) and "axis_values" in results and "series" in results:
        axis = results["axis"]
        for i, axis_value in enumerate(results["axis_values"]):
            for metric, values in results["series"].items():
                writer.writerow([axis, repr(float(axis_value)), metric, repr(float(values[i]))])
    else:
        for metric, value in _flat_numeric(results):
            rendered = repr(float(value)) if isinstance(value, float) else str(value)
            writer.writerow(["", "", metric, rendered])
    return buffer.getvalue()


def write_report(results, path, format: str = "json", config=None) -> None:
    """Serialize results to path in the requested format ("json" or "csv")."""
    document = report_document(results, config=config)
    if format == "json":
        text = render_json(document)
    elif format == "csv":
        text = render_csv(document)
    else:
        raise ValueError(f"unknown report format {format!r}")
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
