"""Leave-one-out and nearest-neighbor Shapley valuation baselines.

LOO reuses the engine's dev-accuracy value function (n + 1 trainings).
The KNN values are the closed-form Shapley values of the nearest-neighbor
utility, computed per dev point by one sort plus a linear backward
recursion, then averaged over dev points; no subset enumeration occurs at
any n.  Distances are Euclidean in whatever feature space the dataset is
in, so all methods rank in a common geometry.
"""

from __future__ import annotations

import numpy as np

from .classifier import ClassifierConfig, make_dev_accuracy_value_fn
from .datatypes import Dataset, ValuationResult, subset_array

DEFAULT_KNN_K = 5


def loo_values(
    dataset: Dataset,
    classifier_config: ClassifierConfig = ClassifierConfig(),
) -> ValuationResult:
    """value_i = v(D) - v(D \\ {i}) under the dev-accuracy value function."""
    n = dataset.n
    if n < 2:
        raise ValueError(f"leave-one-out needs at least 2 instances, got {n}")
    value_fn = make_dev_accuracy_value_fn(
        dataset, reg_c=classifier_config.reg_c, epochs=classifier_config.epochs
    )
    everything = np.arange(n, dtype=np.int64)
    full = value_fn(everything)
    values = np.empty(n)
    for i in range(n):
        values[i] = full - value_fn(np.delete(everything, i))
    echo = {"reg_c": classifier_config.reg_c, "epochs": classifier_config.epochs}
    return ValuationResult(values, method="loo", config_echo=echo)


def _squared_distances(dataset: Dataset, dev_index: int, rows: np.ndarray) -> np.ndarray:
    # identical per-row arithmetic for any row selection, so subset sorts
    # and full sorts agree on ties
    point = dataset.dev_features.data[dev_index].astype(np.float64)
    feats = dataset.train_features.data[rows].astype(np.float64)
    diff = feats - point
    return np.einsum("ij,ij->i", diff, diff)


def knn_utility(subset, dataset: Dataset, k_neighbors: int, dev_index: int) -> float:
    """Fraction of the first min(K, |subset|) neighbors matching the dev label, over K.

    Neighbors are subset members sorted by ascending Euclidean distance to
    the dev point, ties broken by lower training index.  Empty subset -> 0.
    """
    if k_neighbors < 1:
        raise ValueError(f"k_neighbors must be >= 1, got {k_neighbors}")
    idx = subset_array(subset)
    if idx.size == 0:
        return 0.0
    d2 = _squared_distances(dataset, dev_index, idx)
    nearest = idx[np.lexsort((idx, d2))][: min(k_neighbors, idx.size)]
    dev_label = int(dataset.dev_labels.labels[dev_index])
    matches = int(np.sum(dataset.train_labels.labels[nearest] == dev_label))
    return matches / k_neighbors


def knn_shapley_values(dataset: Dataset, k_neighbors: int = DEFAULT_KNN_K) -> ValuationResult:
    """Closed-form Shapley values of the KNN utility, averaged over dev points.

    Per dev point, with training instances sorted ascending by distance as
    a_1..a_N: s(a_N) = [y_{a_N} = y_dev] / N * min(K, N) / K, and walking
    nearer, s(a_j) = s(a_{j+1}) + ([y_{a_j} = y_dev] - [y_{a_{j+1}} = y_dev])
    / K * min(K, j) / j.  The min(K, N)/K factor in the base case keeps the
    recursion equal to brute-force enumeration when K exceeds N (it is 1
    otherwise).
    """
    if k_neighbors < 1:
        raise ValueError(f"k_neighbors must be >= 1, got {k_neighbors}")
    n = dataset.n
    if n < 1:
        raise ValueError("no training instances to value")
    n_dev = dataset.dev_features.rows
    if n_dev < 1:
        raise ValueError("KNN valuation needs a non-empty dev set")

    all_rows = np.arange(n, dtype=np.int64)
    dev_labels = dataset.dev_labels.labels
    train_labels = dataset.train_labels.labels
    values = np.zeros(n)
    ranks = np.arange(1, n, dtype=np.float64)  # j for the step a_{j+1} -> a_j
    for dev_index in range(n_dev):
        d2 = _squared_distances(dataset, dev_index, all_rows)
        order = np.lexsort((all_rows, d2))  # nearest first
        match = (train_labels[order] == dev_labels[dev_index]).astype(np.float64)
        sorted_vals = np.empty(n)
        sorted_vals[n - 1] = match[n - 1] / n * min(k_neighbors, n) / k_neighbors
        if n > 1:
            steps = (match[:-1] - match[1:]) / k_neighbors * np.minimum(k_neighbors, ranks) / ranks
            sorted_vals[: n - 1] = sorted_vals[n - 1] + np.cumsum(steps[::-1])[::-1]
        values[order] += sorted_vals
    values /= n_dev
    return ValuationResult(values, method="knn", config_echo={"k_neighbors": k_neighbors})
