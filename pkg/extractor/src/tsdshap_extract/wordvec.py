"""Averaged pre-trained word vectors as a cheap representation source.

The vector table is the standard text format, one ``token v1 v2 ...`` line
per entry.  Each text line is whitespace-tokenized and lowercased; tokens
missing from the table are skipped and a line with no in-vocabulary tokens
becomes a zero row.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .formats import write_sidecar, write_tsds


def load_vector_table(path: str | Path) -> dict[str, np.ndarray]:
    """Parse a word-vector text file; dimensionality from the first line."""
    table: dict[str, np.ndarray] = {}
    dims = -1
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\n").split()
            if not fields:
                continue  # tolerate blank table lines
            if len(fields) < 2:
                raise ValueError(f"{path}: line {lineno}: token without vector values")
            token = fields[0]
            try:
                vector = np.array([float(v) for v in fields[1:]], dtype=np.float32)
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric vector value") from None
            if dims == -1:
                dims = vector.size
            elif vector.size != dims:
                raise ValueError(
                    f"{path}: line {lineno}: expected {dims} values, got {vector.size}"
                )
            table[token] = vector
    if not table:
        raise ValueError(f"{path}: empty vector table")
    return table


def average_word_vectors(
    vectors_path: str | Path,
    texts_path: str | Path,
    output_path: str | Path,
) -> np.ndarray:
    """Write one averaged-vector row per text line; returns the matrix."""
    table = load_vector_table(vectors_path)
    dims = len(next(iter(table.values())))
    text = Path(texts_path).read_text(encoding="utf-8")
    if text.endswith("\n"):
        text = text[:-1]
    if text == "":
        raise ValueError(f"{texts_path}: no input lines")
    lines = text.split("\n")

    rows = np.zeros((len(lines), dims), dtype=np.float32)
    for i, line in enumerate(lines):
        hits = [table[tok] for tok in line.lower().split() if tok in table]
        if hits:
            rows[i] = np.mean(hits, axis=0)
    write_tsds(rows, output_path)
    write_sidecar(
        output_path, model=Path(vectors_path).name, pooling="word-vector-mean"
    )
    return rows
