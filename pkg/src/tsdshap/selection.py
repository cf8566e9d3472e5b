"""Data removal curves and low-value filtering.

Instances are removed from lowest estimated value to highest; after each
batch of removals the proxy classifier is retrained and scored on the dev
split.  The removal count with the best dev accuracy defines the kept
subset.  Only the ranks of the values matter here, never their scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifier import ClassifierConfig, make_dev_accuracy_value_fn
from .datatypes import Dataset, ValuationResult


@dataclass(frozen=True)
class RemovalCurve:
    """Dev accuracy at each evaluated removal count.

    ``order`` is the full removal permutation (ascending value, ties broken
    by lower original index).  Counts start at 0 and never reach n.
    """

    removed_counts: np.ndarray
    dev_accuracies: np.ndarray
    step: int
    order: np.ndarray


@dataclass(frozen=True)
class SelectionResult:
    """The kept subset at the best removal count."""

    optimal_removed: int
    kept_indices: np.ndarray
    best_dev_accuracy: float


def removal_order(values: ValuationResult) -> np.ndarray:
    """Ascending-value permutation; ties keep the lower index first."""
    return np.argsort(values.values, kind="stable")


def removal_curve(
    values: ValuationResult,
    dataset: Dataset,
    step: int | None = None,
    classifier_config: ClassifierConfig = ClassifierConfig(),
) -> RemovalCurve:
    """Retrain on the kept tail at k = 0, step, 2*step, ... (< n).

    The k = 0 point is the dev-accuracy value function evaluated on the full
    index set, so the curve is directly comparable with engine valuations.
    """
    n = dataset.n
    if n == 0:
        raise ValueError("cannot build a removal curve for an empty training set")
    if len(values) != n:
        raise ValueError(f"values length {len(values)} != n={n}")
    if step is None:
        step = max(1, n // 100)
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")

    order = removal_order(values)
    value_fn = make_dev_accuracy_value_fn(
        dataset, reg_c=classifier_config.reg_c, epochs=classifier_config.epochs
    )
    counts = np.arange(0, n, step, dtype=np.int64)
    accuracies = np.array([value_fn(order[k:]) for k in counts])
    return RemovalCurve(removed_counts=counts, dev_accuracies=accuracies, step=step, order=order)


def optimal_removal_index(curve: RemovalCurve) -> int:
    """Removed count with the best dev accuracy; ties pick the smallest count."""
    if curve.removed_counts.size == 0:
        raise ValueError("empty removal curve")
    return int(curve.removed_counts[np.argmax(curve.dev_accuracies)])


def selection_from_curve(curve: RemovalCurve) -> SelectionResult:
    """Materialize the kept subset at the curve's best removal count."""
    k = optimal_removal_index(curve)
    return SelectionResult(
        optimal_removed=k,
        kept_indices=np.sort(curve.order[k:]),
        best_dev_accuracy=float(np.max(curve.dev_accuracies)),
    )


def select_subset(
    values: ValuationResult,
    dataset: Dataset,
    step: int | None = None,
    classifier_config: ClassifierConfig = ClassifierConfig(),
) -> SelectionResult:
    """Compose the removal curve and its argmax into a kept-index set."""
    return selection_from_curve(removal_curve(values, dataset, step, classifier_config))


def random_removal(n: int, k_remove: int, seed: int) -> np.ndarray:
    """Kept indices after removing a uniformly random sample of k_remove."""
    if not 0 <= k_remove < n:
        raise ValueError(f"k_remove must satisfy 0 <= k_remove < n, got {k_remove} with n={n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    removed = rng.choice(n, size=k_remove, replace=False)
    kept = np.setdiff1d(np.arange(n, dtype=np.int64), removed)
    return kept


def write_removal_curve_csv(curve: RemovalCurve, path: str | Path) -> None:
    """CSV with header removed_count,dev_accuracy; accuracies to 6 decimals."""
    lines = ["removed_count,dev_accuracy"]
    for count, acc in zip(curve.removed_counts, curve.dev_accuracies):
        lines.append(f"{int(count)},{acc:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
