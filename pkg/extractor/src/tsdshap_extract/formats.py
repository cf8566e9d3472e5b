"""Writer for the engine's public binary matrix format.

Layout: magic ``TSDS``, version as 16-bit little-endian unsigned (1), a
reserved 16-bit zero, row and column counts as 64-bit little-endian
unsigned, then n*d IEEE-754 32-bit little-endian floats, row-major.  This
file format is the interface to the valuation engine; the implementation
here is intentionally independent of it.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"TSDS"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sHHQQ")


def write_tsds(matrix: np.ndarray, path: str | Path) -> None:
    """Write a 2-D float array as a TSDS file (values cast to float32)."""
    arr = np.ascontiguousarray(matrix, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got ndim={arr.ndim}")
    if arr.shape[1] < 1:
        raise ValueError("matrix needs at least one column")
    header = HEADER.pack(MAGIC, FORMAT_VERSION, 0, arr.shape[0], arr.shape[1])
    Path(path).write_bytes(header + arr.tobytes())


def read_tsds_header(path: str | Path) -> tuple[int, int]:
    """Row and column counts from a TSDS header (sanity checks only)."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, reserved, rows, cols = HEADER.unpack_from(raw, 0)
    if magic != MAGIC or version != FORMAT_VERSION or reserved != 0:
        raise ValueError(f"{path}: not a TSDS v{FORMAT_VERSION} file")
    return int(rows), int(cols)


def write_sidecar(path: str | Path, model: str, pooling: str) -> None:
    """Metadata JSON next to a matrix file: model identifier and pooling mode."""
    sidecar = Path(str(path) + ".meta.json")
    sidecar.write_text(
        json.dumps({"model": model, "pooling": pooling}, indent=2) + "\n",
        encoding="utf-8",
    )
