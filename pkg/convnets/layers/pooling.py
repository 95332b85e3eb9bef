from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..utils.errors import DimensionError
from .base import Layer


def pool_output_size(h: int, w: int, region: Tuple[int, int],
                     stride: int) -> Tuple[int, int]:
    """Floor geometry; partial windows are discarded."""
    return (h - region[0]) // stride + 1, (w - region[1]) // stride + 1


def _pool_windows(x: np.ndarray, region: Tuple[int, int],
                  stride: int) -> np.ndarray:
    if x.ndim != 4:
        raise DimensionError("maxpool input must be NCHW",
                             shape=tuple(x.shape))
    rh, rw = region
    if rh > x.shape[2] or rw > x.shape[3]:
        raise DimensionError("pooling region exceeds input",
                             region=region, input=tuple(x.shape[2:]))
    if stride <= 0:
        raise DimensionError("pooling stride must be positive", stride=stride)
    windows = sliding_window_view(x, (rh, rw), axis=(2, 3))
    windows = windows[:, :, ::stride, ::stride]
    return windows.reshape(windows.shape[:4] + (rh * rw,))


def maxpool_forward(x: np.ndarray, region: Tuple[int, int], stride: int
                    ) -> Tuple[np.ndarray, np.ndarray]:
    """Max over each window plus the flat (row * W + col) input position
    of the winner; ties go to the lowest position."""
    windows = _pool_windows(x, region, stride)
    local = np.argmax(windows, axis=-1)
    y = np.take_along_axis(windows, local[..., None], axis=-1)[..., 0]

    ho, wo = y.shape[2:]
    rows = (np.arange(ho) * stride)[:, None] + local // region[1]
    cols = (np.arange(wo) * stride)[None, :] + local % region[1]
    return np.ascontiguousarray(y), rows * x.shape[3] + cols


def maxpool_backward(indices: np.ndarray, d_out: np.ndarray,
                     input_shape: Tuple[int, ...]) -> np.ndarray:
    n, c, h, w = input_shape
    d_x = np.zeros((n * c, h * w), dtype=d_out.dtype)
    rows = np.arange(n * c)[:, None]
    np.add.at(d_x, (rows, indices.reshape(n * c, -1)),
              d_out.reshape(n * c, -1))
    return d_x.reshape(input_shape)


class MaxPool2D(Layer):
    kind = "maxpool"

    def __init__(self, region: Tuple[int, int], stride: int) -> None:
        self.region = tuple(region)
        self.stride = stride
        self._indices = None
        self._x = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        y, self._indices = maxpool_forward(x, self.region, self.stride)
        self._x = x
        return y

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        return maxpool_backward(self._indices, d_out, self._x.shape)

    def decisions(self):
        return self._indices

    def kink_margin(self) -> float:
        return top_gap(_pool_windows(self._x, self.region, self.stride))


def top_gap(groups: np.ndarray) -> float:
    """Smallest gap between the best and runner-up along the last axis.

    Groups whose two best values are both exactly zero (dead ReLUs) are
    ignored; they stay tied under small perturbations.
    """
    if groups.shape[-1] < 2 or groups.size == 0:
        return float("inf")
    top2 = -np.partition(-groups, 1, axis=-1)[..., :2]
    gap = top2[..., 0] - top2[..., 1]
    live = ~((top2[..., 0] == 0) & (top2[..., 1] == 0))
    return float(gap[live].min()) if np.any(live) else float("inf")
