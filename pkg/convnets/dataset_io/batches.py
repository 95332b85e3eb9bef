from typing import Any, Dict, Iterator, Tuple

import numpy as np

from ..utils.errors import ConfigError
from .cifar import LabeledDataset


class BatchIterator:
    """Seeded mini-batch iterator.

    Each pass over the iterator draws a fresh permutation, visits every
    sample exactly once and keeps the short final batch.
    """

    def __init__(self, dataset: LabeledDataset, batch_size: int = 100,
                 seed: int = 0) -> None:
        if batch_size <= 0:
            raise ConfigError("batch_size must be positive",
                              batch_size=batch_size)
        self.dataset = dataset
        self.batch_size = batch_size
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return -(-len(self.dataset) // self.batch_size)

    def index_batches(self) -> Iterator[np.ndarray]:
        order = self.rng.permutation(len(self.dataset))
        for start in range(0, len(order), self.batch_size):
            yield order[start:start + self.batch_size]

    def __iter__(self) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        for idx in self.index_batches():
            yield self.dataset.images[idx], self.dataset.labels[idx]

    @property
    def state(self) -> Dict[str, Any]:
        return self.rng.bit_generator.state

    @state.setter
    def state(self, value: Dict[str, Any]) -> None:
        self.rng.bit_generator.state = value


def sequential_batches(dataset: LabeledDataset, batch_size: int
                       ) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    for start in range(0, len(dataset), batch_size):
        yield (dataset.images[start:start + batch_size],
               dataset.labels[start:start + batch_size])
