import os

import numpy as np
import pytest

from convnets.dataset_io import LabeledDataset, write_cifar10


def synthetic_images(n: int, seed: int = 0, classes: int = 10,
                     noise: float = 20.0):
    """Integer 3x32x32 images scattered around one prototype per class."""
    rng = np.random.default_rng(seed)
    prototypes = rng.integers(40, 216, size=(classes, 3, 32, 32))
    labels = np.arange(n) % classes
    images = prototypes[labels] + rng.normal(0, noise, size=(n, 3, 32, 32))
    return np.clip(np.round(images), 0, 255), labels


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def cifar_file(tmp_path):
    """Factory writing a synthetic CIFAR-10 batch file; returns its path."""

    def write(n: int = 40, seed: int = 0, name: str = "data_batch_1.bin",
              noise: float = 20.0) -> str:
        images, labels = synthetic_images(n, seed, noise=noise)
        path = os.path.join(str(tmp_path), name)
        write_cifar10(LabeledDataset(images=images, labels=labels), path)
        return path

    return write


@pytest.fixture
def small_dataset():
    images, labels = synthetic_images(30, seed=3)
    return LabeledDataset(images=images.astype(np.float64), labels=labels)
