import numpy as np

from ..utils.errors import DimensionError
from .base import Layer, LayerGrads, LayerParams


def dense_forward(params: LayerParams, x: np.ndarray) -> np.ndarray:
    if x.ndim != 2 or x.shape[1] != params.weights.shape[0]:
        raise DimensionError("dense input does not match the weights",
                             input=tuple(x.shape),
                             weights=tuple(params.weights.shape))
    return x @ params.weights + params.biases


def dense_backward(params: LayerParams, x: np.ndarray,
                   d_out: np.ndarray) -> LayerGrads:
    if d_out.shape != (x.shape[0], params.weights.shape[1]):
        raise DimensionError("dense upstream gradient has the wrong shape",
                             d_out=tuple(d_out.shape))
    return LayerGrads(
        weights=x.T @ d_out,
        biases=d_out.sum(axis=0),
        inputs=d_out @ params.weights.T,
    )


class Dense(Layer):
    """Affine layer; flattens image input to [N, features] on the way in."""

    kind = "dense"

    def __init__(self, params: LayerParams) -> None:
        self.params = params
        self._x = None
        self._in_shape = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        self._in_shape = x.shape
        self._x = x.reshape(x.shape[0], -1)
        return dense_forward(self.params, self._x)

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        self.grads = dense_backward(self.params, self._x, d_out)
        return self.grads.inputs.reshape(self._in_shape)
