"""
Valid, stride-1 2-D cross-correlation over NCHW tensors.

Two forward kernels compute the same thing:

- ``direct`` accumulates W[:, ci, i, j] * x-window for ci, i, j in that
  loop order starting from zero, then adds the bias. Every output element
  sees the same sequence of operations as a scalar quadruple loop.
- ``im2col`` gathers sliding windows and contracts them with one
  ``tensordot``. It is the default and must agree with ``direct`` to
  1e-10 relative.
"""
from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..utils.errors import DimensionError
from .base import Layer, LayerGrads, LayerParams

KERNELS = ("im2col", "direct")


def output_size(h: int, w: int, kh: int, kw: int) -> Tuple[int, int]:
    return h - kh + 1, w - kw + 1


def _check(params: LayerParams, x: np.ndarray) -> None:
    if x.ndim != 4:
        raise DimensionError("conv input must be NCHW", shape=tuple(x.shape))
    maps_out, maps_in, kh, kw = params.weights.shape
    if x.shape[1] != maps_in:
        raise DimensionError("conv input channels do not match the kernel",
                             input=tuple(x.shape),
                             weights=tuple(params.weights.shape))
    if x.shape[2] < kh or x.shape[3] < kw:
        raise DimensionError("kernel larger than input",
                             input=tuple(x.shape[2:]), kernel=(kh, kw))


def _windows(x: np.ndarray, kh: int, kw: int) -> np.ndarray:
    # [N, C, Ho, Wo, kH, kW]
    return sliding_window_view(x, (kh, kw), axis=(2, 3))


def conv_forward_direct(params: LayerParams, x: np.ndarray) -> np.ndarray:
    _check(params, x)
    w = params.weights
    maps_out, maps_in, kh, kw = w.shape
    ho, wo = output_size(x.shape[2], x.shape[3], kh, kw)
    acc = np.zeros((x.shape[0], maps_out, ho, wo), dtype=x.dtype)
    for ci in range(maps_in):
        for i in range(kh):
            for j in range(kw):
                acc += (w[None, :, ci, i, j, None, None]
                        * x[:, None, ci, i:i + ho, j:j + wo])
    return acc + params.biases[None, :, None, None]


def conv_forward_im2col(params: LayerParams, x: np.ndarray) -> np.ndarray:
    _check(params, x)
    _, _, kh, kw = params.weights.shape
    cols = _windows(x, kh, kw)
    y = np.tensordot(cols, params.weights, axes=([1, 4, 5], [1, 2, 3]))
    y = y.transpose(0, 3, 1, 2)
    return np.ascontiguousarray(y + params.biases[None, :, None, None])


def conv_forward(params: LayerParams, x: np.ndarray,
                 kernel: str = "im2col") -> np.ndarray:
    if kernel == "direct":
        return conv_forward_direct(params, x)
    if kernel == "im2col":
        return conv_forward_im2col(params, x)
    raise DimensionError(f"unknown convolution kernel: {kernel}",
                         valid=", ".join(KERNELS))


def conv_backward(params: LayerParams, x: np.ndarray,
                  d_out: np.ndarray) -> LayerGrads:
    """Exact gradients for weights, shared biases and the input."""
    _, _, kh, kw = params.weights.shape
    d_w = np.tensordot(d_out, _windows(x, kh, kw),
                       axes=([0, 2, 3], [0, 2, 3]))
    d_b = d_out.sum(axis=(0, 2, 3))

    # Full correlation of the upstream gradient with the flipped kernel.
    padded = np.pad(d_out, ((0, 0), (0, 0), (kh - 1, kh - 1),
                            (kw - 1, kw - 1)))
    flipped = params.weights[:, :, ::-1, ::-1]
    d_x = np.tensordot(_windows(padded, kh, kw), flipped,
                       axes=([1, 4, 5], [0, 2, 3]))
    d_x = np.ascontiguousarray(d_x.transpose(0, 3, 1, 2))
    return LayerGrads(weights=d_w, biases=d_b, inputs=d_x)


class Conv2D(Layer):
    kind = "conv"

    def __init__(self, params: LayerParams, kernel: str = "im2col") -> None:
        self.params = params
        self.kernel = kernel
        self._x = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        self._x = x
        return conv_forward(self.params, x, self.kernel)

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        self.grads = conv_backward(self.params, self._x, d_out)
        return self.grads.inputs
