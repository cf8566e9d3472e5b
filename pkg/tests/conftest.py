import numpy as np
import pytest

from tsdshap import Dataset, EmbeddingMatrix, LabelVector, generate_noisy_benchmark


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(20240917))


@pytest.fixture
def tiny_dataset() -> Dataset:
    """8 separable train rows, 4 dev rows, 2 classes, 3 features."""
    train = np.array(
        [
            [2.0, 0.1, 0.0],
            [1.8, -0.2, 0.3],
            [2.2, 0.0, -0.1],
            [1.5, 0.4, 0.2],
            [-2.0, 0.2, 0.1],
            [-1.7, -0.3, 0.0],
            [-2.3, 0.1, -0.2],
            [-1.6, 0.0, 0.4],
        ],
        dtype=np.float32,
    )
    labels = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    dev = np.array(
        [[1.9, 0.0, 0.1], [2.1, 0.2, 0.0], [-1.9, 0.1, 0.0], [-2.1, -0.1, 0.2]],
        dtype=np.float32,
    )
    dev_labels = np.array([0, 0, 1, 1])
    return Dataset(
        train_features=EmbeddingMatrix(train),
        train_labels=LabelVector(labels),
        dev_features=EmbeddingMatrix(dev),
        dev_labels=LabelVector(dev_labels),
    )


@pytest.fixture
def noisy_dataset():
    dataset, flipped = generate_noisy_benchmark(n=40, d=6, flip_fraction=0.1, seed=11)
    return dataset, flipped
