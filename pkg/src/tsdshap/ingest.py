"""Feature/label file formats and principal-component reduction.

Two matrix formats are accepted:

* Binary: magic ``TSDS``, version as 16-bit little-endian unsigned (1),
  a reserved 16-bit zero, row and column counts as 64-bit little-endian
  unsigned, then ``n*d`` IEEE-754 32-bit little-endian floats, row-major.
  Write-then-read round-trips bit-exactly.
* CSV: one row per line, comma-separated decimal floats, no header.

Labels are one non-negative decimal integer per line, LF-terminated.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datatypes import EmbeddingMatrix, LabelVector

MAGIC = b"TSDS"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHHQQ")  # magic, version, reserved, rows, cols


class MatrixFormatError(ValueError):
    """A matrix or label file does not match its declared format."""


def load_embedding_matrix(path: str | Path) -> EmbeddingMatrix:
    """Load a matrix file, auto-detecting binary (by magic) vs CSV."""
    raw = Path(path).read_bytes()
    if raw[:4] == MAGIC:
        return _load_binary(raw, str(path))
    return _load_csv(raw, str(path))


def _load_binary(raw: bytes, name: str) -> EmbeddingMatrix:
    if len(raw) < _HEADER.size:
        raise MatrixFormatError(
            f"{name}: truncated header, need {_HEADER.size} bytes, have {len(raw)}"
        )
    magic, version, reserved, rows, cols = _HEADER.unpack_from(raw, 0)
    if version != FORMAT_VERSION:
        raise MatrixFormatError(f"{name}: unsupported format version {version} at byte offset 4")
    if reserved != 0:
        raise MatrixFormatError(f"{name}: reserved field not zero at byte offset 6")
    expected = _HEADER.size + rows * cols * 4
    if len(raw) != expected:
        raise MatrixFormatError(
            f"{name}: payload length mismatch, expected {expected} bytes "
            f"(header declares {rows}x{cols}), file has {len(raw)} "
            f"(payload starts at byte offset {_HEADER.size})"
        )
    if cols < 1:
        raise MatrixFormatError(f"{name}: column count must be >= 1, header declares {cols}")
    flat = np.frombuffer(raw, dtype="<f4", count=rows * cols, offset=_HEADER.size)
    bad = ~np.isfinite(flat)
    if bad.any():
        pos = int(np.argmax(bad))
        raise MatrixFormatError(
            f"{name}: non-finite value at byte offset {_HEADER.size + 4 * pos}"
        )
    return EmbeddingMatrix(flat.reshape(rows, cols).copy())


def _load_csv(raw: bytes, name: str) -> EmbeddingMatrix:
    text = raw.decode("utf-8").rstrip("\n")
    if text == "":
        raise MatrixFormatError(f"{name}: empty CSV, cannot infer column count")
    rows: list[np.ndarray] = []
    cols = -1
    # only trailing newlines are stripped, so line numbers stay accurate
    # and an interior blank line is reported as a parse error
    for lineno, line in enumerate(text.split("\n"), start=1):
        fields = line.split(",")
        try:
            values = np.array([float(f) for f in fields], dtype=np.float32)
        except ValueError as exc:
            raise MatrixFormatError(f"{name}: line {lineno}: {exc}") from None
        if cols == -1:
            cols = values.size
        elif values.size != cols:
            raise MatrixFormatError(
                f"{name}: line {lineno}: expected {cols} fields, got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise MatrixFormatError(f"{name}: line {lineno}: non-finite value")
        rows.append(values)
    return EmbeddingMatrix(np.vstack(rows))


def write_embedding_matrix(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Write the binary format; loading it back is bit-exact."""
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, 0, matrix.rows, matrix.cols)
    payload = np.ascontiguousarray(matrix.data, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def load_labels(path: str | Path) -> LabelVector:
    """Parse newline-separated non-negative integers; num_classes = max + 1."""
    text = Path(path).read_text(encoding="utf-8")
    labels: list[int] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue  # trailing newline / empty file
        try:
            value = int(line)
        except ValueError:
            raise MatrixFormatError(
                f"{path}: line {lineno}: not a decimal integer: {line!r}"
            ) from None
        if value < 0:
            raise MatrixFormatError(f"{path}: line {lineno}: negative label {value}")
        labels.append(value)
    return LabelVector(np.array(labels, dtype=np.int64))


def write_labels(values, path: str | Path) -> None:
    """Write integers one per line, LF-terminated (labels or index lists)."""
    arr = np.asarray(values, dtype=np.int64)
    Path(path).write_text("".join(f"{v}\n" for v in arr), encoding="utf-8")


@dataclass(frozen=True)
class PcaModel:
    """Mean vector plus orthonormal component rows, by descending variance."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[0]


def fit_pca(matrix: EmbeddingMatrix, k: int) -> PcaModel:
    """Top-k eigenvectors of the sample covariance of mean-centered rows.

    The effective component count is ``min(k, cols, rows - 1)``.  The full
    d-by-d eigendecomposition is computed and sliced, so a fit with a larger
    k extends a smaller one.  Sign convention: each component's
    largest-magnitude entry (ties broken by lowest index) is made positive.
    """
    if matrix.rows < 2:
        raise ValueError(f"PCA needs at least 2 rows, got {matrix.rows}")
    if k < 1:
        raise ValueError(f"component count must be >= 1, got {k}")
    x = matrix.data.astype(np.float64)
    n, d = x.shape
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)  # ascending
    eigvals = np.maximum(eigvals[::-1], 0.0)
    components = eigvecs[:, ::-1].T
    k_eff = min(k, d, n - 1)
    components = components[:k_eff].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaModel(mean=mean, components=components, explained_variance=eigvals[:k_eff].copy())


def apply_pca(model: PcaModel, matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Project rows: out = components @ (row - mean)."""
    if matrix.cols != model.mean.size:
        raise ValueError(
            f"dimension mismatch: matrix has {matrix.cols} columns, "
            f"model expects {model.mean.size}"
        )
    projected = (matrix.data.astype(np.float64) - model.mean) @ model.components.T
    return EmbeddingMatrix(projected.astype(np.float32))


def reduce_dataset(
    train: EmbeddingMatrix,
    dev: EmbeddingMatrix,
    k: int,
    fit_train_only: bool = False,
) -> tuple[EmbeddingMatrix, EmbeddingMatrix, PcaModel]:
    """Fit PCA on train+dev rows (default) and project both splits.

    Joint fitting keeps the dev-side value function in the same feature
    space as the training rows; pass ``fit_train_only`` to restrict the fit.
    """
    if train.cols != dev.cols:
        raise ValueError(
            f"dimension mismatch: train has {train.cols} columns, dev has {dev.cols}"
        )
    if fit_train_only:
        fit_rows = train
    else:
        fit_rows = EmbeddingMatrix(np.vstack([train.data, dev.data]))
    model = fit_pca(fit_rows, k)
    return apply_pca(model, train), apply_pca(model, dev), model
