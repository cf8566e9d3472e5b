"""Deterministic regularized linear classifier and the dev-accuracy value function.

The classifier is a one-vs-rest linear SVM (L2-regularized hinge loss)
trained by full-batch subgradient descent with the fixed step schedule
``1/(reg_c * t)`` over a fixed epoch budget.  There is no shuffling and no
internal feature scaling, so training is bit-reproducible for identical
inputs and cheap enough to serve as the value function's inner loop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datatypes import Dataset, EmbeddingMatrix, LabelVector, ValueFunction, subset_array

DEFAULT_REG_C = 1.0
DEFAULT_EPOCHS = 100


@dataclass(frozen=True)
class ClassifierConfig:
    """Proxy-classifier hyperparameters shared across modules."""

    reg_c: float = DEFAULT_REG_C
    epochs: int = DEFAULT_EPOCHS


@dataclass(frozen=True)
class LinearModel:
    """Per-class weight rows and biases; argmax scoring.

    With one or zero classes seen during training the model is a constant
    predictor: the lone seen class, or class 0 for an empty training set.
    """

    weights: np.ndarray
    bias: np.ndarray
    classes_seen: frozenset[int]

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]


def train_linear(
    features: EmbeddingMatrix,
    labels: LabelVector,
    reg_c: float = DEFAULT_REG_C,
    epochs: int = DEFAULT_EPOCHS,
) -> LinearModel:
    """Train the one-vs-rest hinge-loss model.

    Instances are visited in row order as one full batch per epoch; the
    step size at epoch t is 1/(reg_c * t) and the bias is unregularized.
    Degenerate inputs (zero rows, single class) yield a constant predictor
    rather than an error.
    """
    if features.rows != len(labels):
        raise ValueError(
            f"row/label count mismatch: {features.rows} rows, {len(labels)} labels"
        )
    if features.cols < 1:
        raise ValueError("feature dimension must be >= 1")
    if reg_c <= 0:
        raise ValueError(f"reg_c must be positive, got {reg_c}")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")

    y = labels.labels
    seen = frozenset(int(c) for c in np.unique(y))
    num_classes = max(labels.num_classes, (max(seen) + 1) if seen else 0, 1)
    d = features.cols

    if len(seen) <= 1:
        constant = next(iter(seen)) if seen else 0
        bias = np.zeros(num_classes)
        bias[constant] = 1.0  # argmax lands on the constant class
        return LinearModel(np.zeros((num_classes, d)), bias, seen)

    x = features.data.astype(np.float64)
    m = features.rows
    targets = np.full((m, num_classes), -1.0)
    targets[np.arange(m), y] = 1.0

    w = np.zeros((num_classes, d))
    b = np.zeros(num_classes)
    lam = reg_c
    for t in range(1, epochs + 1):
        eta = 1.0 / (lam * t)
        scores = x @ w.T + b
        active = np.where(targets * scores < 1.0, targets, 0.0)
        w += eta * (active.T @ x / m - lam * w)
        b += eta * (active.sum(axis=0) / m)
    return LinearModel(w, b, seen)


def predict(model: LinearModel, features: EmbeddingMatrix) -> LabelVector:
    """Argmax over class scores w_c . x + b_c; ties go to the lowest class id."""
    if features.cols != model.weights.shape[1]:
        raise ValueError(
            f"dimension mismatch: features have {features.cols} columns, "
            f"model expects {model.weights.shape[1]}"
        )
    scores = features.data.astype(np.float64) @ model.weights.T + model.bias
    return LabelVector(np.argmax(scores, axis=1), num_classes=model.num_classes)


def accuracy(predictions: LabelVector, gold: LabelVector) -> float:
    """Fraction of exact matches."""
    if len(predictions) != len(gold):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions, {len(gold)} gold labels"
        )
    if len(gold) == 0:
        raise ValueError("accuracy is undefined for empty label vectors")
    return float(np.mean(predictions.labels == gold.labels))


def make_dev_accuracy_value_fn(
    dataset: Dataset,
    reg_c: float = DEFAULT_REG_C,
    epochs: int = DEFAULT_EPOCHS,
) -> ValueFunction:
    """Value of a training subset = dev accuracy of the model trained on it.

    Subset indices are canonicalized (sorted ascending) before training so
    the value is a pure function of the index set.  The empty subset trains
    the constant class-0 predictor.
    """
    train_x = dataset.train_features.data
    train_y = dataset.train_labels.labels
    num_classes = dataset.train_labels.num_classes
    dev_features = dataset.dev_features
    dev_gold = dataset.dev_labels

    def value_fn(subset_indices: np.ndarray) -> float:
        idx = subset_array(subset_indices)
        sub_features = EmbeddingMatrix(train_x[idx])
        sub_labels = LabelVector(train_y[idx], num_classes=num_classes)
        model = train_linear(sub_features, sub_labels, reg_c=reg_c, epochs=epochs)
        return accuracy(predict(model, dev_features), dev_gold)

    return value_fn
