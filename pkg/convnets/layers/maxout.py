"""
Maxout over disjoint groups of ``pieces`` consecutive features.

Dense input [N, F] groups features p*k .. p*k+k-1. Convolutional input
[N, C, H, W] groups channels the same way at every spatial position.
"""
from typing import Tuple

import numpy as np

from ..utils.errors import DimensionError
from .base import Layer
from .pooling import top_gap


def _grouped(x: np.ndarray, pieces: int) -> np.ndarray:
    if x.ndim < 2:
        raise DimensionError("maxout needs a batch axis and a feature axis",
                             shape=tuple(x.shape))
    if pieces <= 0 or x.shape[1] % pieces != 0:
        raise DimensionError("feature count not divisible by pieces",
                             features=x.shape[1], pieces=pieces)
    return x.reshape((x.shape[0], x.shape[1] // pieces, pieces)
                     + x.shape[2:])


def maxout_forward(x: np.ndarray, pieces: int
                   ) -> Tuple[np.ndarray, np.ndarray]:
    """Group maxima and the winning piece ids (lowest id on ties)."""
    groups = _grouped(x, pieces)
    ids = np.argmax(groups, axis=2)
    y = np.take_along_axis(groups, np.expand_dims(ids, 2), axis=2)
    return np.squeeze(y, axis=2), ids


def maxout_backward(ids: np.ndarray, d_out: np.ndarray,
                    pieces: int) -> np.ndarray:
    shape = (d_out.shape[0], d_out.shape[1], pieces) + d_out.shape[2:]
    d_groups = np.zeros(shape, dtype=d_out.dtype)
    np.put_along_axis(d_groups, np.expand_dims(ids, 2),
                      np.expand_dims(d_out, 2), axis=2)
    return d_groups.reshape((shape[0], shape[1] * pieces) + shape[3:])


class Maxout(Layer):
    kind = "maxout"

    def __init__(self, pieces: int) -> None:
        self.pieces = pieces
        self._ids = None
        self._x = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        self._x = x
        y, self._ids = maxout_forward(x, self.pieces)
        return y

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        return maxout_backward(self._ids, d_out, self.pieces)

    def decisions(self):
        return self._ids

    def kink_margin(self) -> float:
        groups = np.moveaxis(_grouped(self._x, self.pieces), 2, -1)
        return top_gap(groups)
