"""Penultimate-layer representation extraction from a frozen transformer.

Each input line (tab-separated pairs allowed) becomes one row: the model
runs with hidden-state output enabled, the second-to-last layer is pooled
either at the classification token or as an attention-masked mean, and the
row is written in float32.  Inference is batched over the *unique* lines
and results are scattered back, so duplicate input lines are bitwise
identical in the output by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .formats import write_sidecar, write_tsds

POOLING_MODES = ("classification-token", "mean")

DEFAULT_BATCH_SIZE = 16
DEFAULT_MAX_LENGTH = 128


@dataclass(frozen=True)
class ExtractionSpec:
    """What to extract: model, texts, pooling mode, and output path."""

    model: str
    texts_path: str
    pooling: str = "classification-token"
    output_path: str = "embeddings.tsds"
    batch_size: int = DEFAULT_BATCH_SIZE
    max_length: int = DEFAULT_MAX_LENGTH

    def __post_init__(self) -> None:
        if self.pooling not in POOLING_MODES:
            raise ValueError(
                f"pooling must be one of {POOLING_MODES}, got {self.pooling!r}"
            )
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_length < 2:
            raise ValueError(f"max_length must be >= 2, got {self.max_length}")


def read_text_lines(path: str | Path) -> list[str]:
    """Input lines, one example each; empty lines are data errors."""
    text = Path(path).read_text(encoding="utf-8")
    if text.endswith("\n"):
        text = text[:-1]
    if text == "":
        raise ValueError(f"{path}: no input lines")
    lines = text.split("\n")
    for lineno, line in enumerate(lines, start=1):
        if line.strip() == "":
            raise ValueError(f"{path}: line {lineno}: empty line")
    return lines


def _split_pair(line: str) -> tuple[str, str | None]:
    if "\t" in line:
        first, second = line.split("\t", 1)
        return first, second
    return line, None


def _pool(hidden: "np.ndarray", mask: "np.ndarray", pooling: str) -> np.ndarray:
    if pooling == "classification-token":
        return hidden[:, 0, :]
    weights = mask[:, :, None]
    return (hidden * weights).sum(axis=1) / weights.sum(axis=1)


def extract_lm_representations(spec: ExtractionSpec) -> np.ndarray:
    """Run the frozen model over the text file and write one row per line.

    Returns the written matrix (n_lines x hidden_size, float32).  The model
    identifier must resolve for ``transformers``; a local directory works
    offline.
    """
    import torch
    from transformers import AutoModel, AutoTokenizer

    lines = read_text_lines(spec.texts_path)
    try:
        tokenizer = AutoTokenizer.from_pretrained(spec.model)
        model = AutoModel.from_pretrained(spec.model)
    except Exception as exc:
        raise ValueError(f"cannot resolve model {spec.model!r}: {exc}") from exc
    model.eval()
    # stay within the model's position table
    max_length = min(
        spec.max_length, int(getattr(model.config, "max_position_embeddings", spec.max_length))
    )

    unique_lines = sorted(set(lines))
    row_of = {line: i for i, line in enumerate(unique_lines)}
    unique_rows: list[np.ndarray] = []

    with torch.no_grad():
        for start in range(0, len(unique_lines), spec.batch_size):
            batch = unique_lines[start : start + spec.batch_size]
            firsts, seconds = zip(*(_split_pair(line) for line in batch))
            pair_arg = list(seconds) if any(s is not None for s in seconds) else None
            if pair_arg is not None:
                pair_arg = [s if s is not None else "" for s in seconds]
            encoded = tokenizer(
                list(firsts),
                pair_arg,
                padding="max_length",  # fixed length: row values independent of batch
                truncation=True,
                max_length=max_length,
                return_tensors="pt",
            )
            outputs = model(**encoded, output_hidden_states=True)
            penultimate = outputs.hidden_states[-2].numpy()
            mask = encoded["attention_mask"].numpy().astype(np.float32)
            unique_rows.append(_pool(penultimate, mask, spec.pooling))

    by_unique = np.vstack(unique_rows).astype(np.float32)
    matrix = by_unique[[row_of[line] for line in lines]]
    write_tsds(matrix, spec.output_path)
    write_sidecar(spec.output_path, model=spec.model, pooling=spec.pooling)
    return matrix
