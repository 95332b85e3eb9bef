import numpy as np

from ..utils.errors import ConfigError
from .base import Layer

ACTIVATIONS = ("relu", "tanh", "sigmoid")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form stays finite for large |x|
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def activation_forward(kind: str, x: np.ndarray) -> np.ndarray:
    if kind == "relu":
        return np.maximum(x, 0.0)
    if kind == "tanh":
        return np.tanh(x)
    if kind == "sigmoid":
        return _sigmoid(x)
    raise ConfigError(f"unknown activation: {kind}")


def activation_backward(kind: str, x: np.ndarray, y: np.ndarray,
                        d_out: np.ndarray) -> np.ndarray:
    """Input gradient given the forward input ``x`` and output ``y``.

    The ReLU derivative at exactly zero is zero.
    """
    if kind == "relu":
        return d_out * (x > 0)
    if kind == "tanh":
        return d_out * (1.0 - y * y)
    if kind == "sigmoid":
        return d_out * y * (1.0 - y)
    raise ConfigError(f"unknown activation: {kind}")


class Activation(Layer):
    kind = "activation"

    def __init__(self, fn: str) -> None:
        if fn not in ACTIVATIONS:
            raise ConfigError(f"unknown activation: {fn}")
        self.fn = fn
        self._x = None
        self._y = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        self._x = x
        self._y = activation_forward(self.fn, x)
        return self._y

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        return activation_backward(self.fn, self._x, self._y, d_out)

    def kink_margin(self) -> float:
        if self.fn != "relu" or self._x is None or self._x.size == 0:
            return float("inf")
        return float(np.abs(self._x).min())

    def decisions(self):
        return None if self.fn != "relu" else self._x > 0
