"""Shared domain types for the valuation engine.

All types are immutable after construction (arrays are marked read-only) and
safe to share across threads.  A value function is any callable mapping an
array of training indices to a float; see :data:`ValueFunction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# A value function maps a subset of training indices (1-D integer array,
# duplicates not allowed) to a real utility.  Implementations must be
# deterministic (same index set -> bit-identical result), defined for the
# empty subset, and safe for concurrent calls.
ValueFunction = Callable[[np.ndarray], float]

#: Valid ``method`` tags for a ValuationResult.
METHODS = ("ts_dshapley", "exact", "loo", "knn", "random")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EmbeddingMatrix:
    """n-by-d row-major float32 feature matrix.

    Rows are instances, columns are features.  Zero rows are allowed, zero
    columns are not.  Entries may be non-finite at construction time; use
    :func:`validate_dataset` to report such violations.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"feature matrix must be 2-D, got ndim={arr.ndim}")
        if arr.shape[1] < 1:
            raise ValueError("feature matrix needs at least one column")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class LabelVector:
    """Dense integer class labels with an explicit class count.

    Class ids are dense integers ``0..num_classes-1``.  When ``num_classes``
    is not supplied it is inferred as ``max(label) + 1`` (0 for an empty
    vector).  Labels greater or equal to an explicitly supplied
    ``num_classes`` are representable but reported by
    :func:`validate_dataset`.
    """

    labels: np.ndarray
    num_classes: int = -1

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.labels, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("labels must be a 1-D sequence")
        if arr.size and arr.min() < 0:
            raise ValueError("labels must be non-negative")
        nc = self.num_classes
        if nc < 0:
            nc = int(arr.max()) + 1 if arr.size else 0
        object.__setattr__(self, "labels", _freeze(arr))
        object.__setattr__(self, "num_classes", nc)

    def __len__(self) -> int:
        return int(self.labels.size)


@dataclass(frozen=True)
class Dataset:
    """Paired train/dev features and labels.

    Subset indices used anywhere in the engine always refer to rows of the
    training split; the dev split only ever feeds the value function.
    Construction is permissive; call :func:`validate_dataset` for a report.
    """

    train_features: EmbeddingMatrix
    train_labels: LabelVector
    dev_features: EmbeddingMatrix
    dev_labels: LabelVector

    @property
    def n(self) -> int:
        return self.train_features.rows

    @property
    def num_classes(self) -> int:
        return max(self.train_labels.num_classes, self.dev_labels.num_classes)


@dataclass(frozen=True)
class SamplingConfig:
    """Multi-chain sampling parameters.

    ``subset_size_s`` is the upper bound of the per-iteration subset size;
    sizes are drawn uniformly from ``[ceil(s/2), s]``.  ``iterations_t``
    subsets are drawn per chain and ``chains_j`` independent chains are
    averaged.  All randomness derives from ``master_seed``.
    """

    subset_size_s: int
    iterations_t: int = 50
    chains_j: int = 1
    master_seed: int = 0

    def violations(self, n: int) -> list[str]:
        """Return every way this config is invalid for an n-instance set."""
        out = []
        if self.subset_size_s < 1:
            out.append(f"subset_size_s must be >= 1, got {self.subset_size_s}")
        if self.subset_size_s > n:
            out.append(f"subset_size_s {self.subset_size_s} exceeds n={n}")
        if self.iterations_t < 1:
            out.append(f"iterations_t must be >= 1, got {self.iterations_t}")
        if self.chains_j < 1:
            out.append(f"chains_j must be >= 1, got {self.chains_j}")
        if not 0 <= self.master_seed < 2**64:
            out.append("master_seed must fit in 64 unsigned bits")
        return out

    def check(self, n: int) -> None:
        problems = self.violations(n)
        if problems:
            raise ValueError("; ".join(problems))


@dataclass(frozen=True)
class ValuationResult:
    """Per-instance estimated contribution values plus provenance."""

    values: np.ndarray
    method: str
    config_echo: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("values must be 1-D")
        if not np.all(np.isfinite(arr)):
            raise ValueError("values must all be finite")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        object.__setattr__(self, "values", _freeze(arr))

    def __len__(self) -> int:
        return int(self.values.size)


def _first_nonfinite(matrix: EmbeddingMatrix) -> tuple[int, int] | None:
    bad = ~np.isfinite(matrix.data)
    if not bad.any():
        return None
    r, c = np.unravel_index(int(np.argmax(bad)), matrix.data.shape)
    return int(r), int(c)


def validate_dataset(dataset: Dataset) -> list[str]:
    """Collect every invariant violation in a dataset.

    Violations are data, not failures: the list is empty for a valid
    dataset and the input is never mutated.
    """
    out: list[str] = []
    for split in ("train", "dev"):
        feats: EmbeddingMatrix = getattr(dataset, f"{split}_features")
        labels: LabelVector = getattr(dataset, f"{split}_labels")
        if feats.rows != len(labels):
            out.append(
                f"{split}: row/label count mismatch "
                f"({feats.rows} feature rows, {len(labels)} labels)"
            )
        spot = _first_nonfinite(feats)
        if spot is not None:
            out.append(f"{split}: non-finite entry at (row,col)={spot}")
        if labels.labels.size and int(labels.labels.max()) >= labels.num_classes:
            out.append(
                f"{split}: label {int(labels.labels.max())} out of range for "
                f"num_classes={labels.num_classes}"
            )
    if dataset.train_features.cols != dataset.dev_features.cols:
        out.append(
            f"feature dim mismatch: train has {dataset.train_features.cols} "
            f"columns, dev has {dataset.dev_features.cols}"
        )
    if dataset.train_labels.num_classes != dataset.dev_labels.num_classes:
        out.append(
            f"num_classes mismatch: train {dataset.train_labels.num_classes}, "
            f"dev {dataset.dev_labels.num_classes}"
        )
    if dataset.train_labels.num_classes < 2:
        out.append("fewer than 2 classes; classifier training is undefined")
    return out


def subset_array(indices: Sequence[int] | np.ndarray) -> np.ndarray:
    """Canonicalize a subset of training indices: sorted, int64, unique."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim != 1:
        idx = idx.reshape(-1)
    idx = np.sort(idx)
    if idx.size > 1 and np.any(idx[1:] == idx[:-1]):
        raise ValueError("subset indices must be unique")
    return idx
