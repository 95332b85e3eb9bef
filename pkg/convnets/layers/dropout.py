from typing import Optional, Tuple

import numpy as np

from ..utils.errors import ConfigError
from .base import Layer


def _check_p(p_retain: float) -> None:
    if not 0.0 < p_retain <= 1.0:
        raise ConfigError("retain probability must lie in (0, 1]",
                          p_retain=p_retain)


def dropout_train(x: np.ndarray, p_retain: float, rng: np.random.Generator
                  ) -> Tuple[np.ndarray, np.ndarray]:
    _check_p(p_retain)
    mask = (rng.random(x.shape) < p_retain).astype(x.dtype)
    return x * mask, mask


def dropout_infer(x: np.ndarray, p_retain: float) -> np.ndarray:
    """Expected-value scaling, equal to scaling the unit's outgoing
    weights by its retain probability."""
    _check_p(p_retain)
    return x * p_retain


def dropout_backward(mask: np.ndarray, d_out: np.ndarray) -> np.ndarray:
    return d_out * mask


class Dropout(Layer):
    """Dropout with its own RNG stream; ``freeze()`` pins the last mask."""

    kind = "dropout"

    def __init__(self, p_retain: float, rng: np.random.Generator) -> None:
        _check_p(p_retain)
        self.p_retain = p_retain
        self.rng = rng
        self.frozen = False
        self._mask: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        if not train:
            return dropout_infer(x, self.p_retain)
        if self.frozen and self._mask is not None \
                and self._mask.shape == x.shape:
            return x * self._mask
        y, self._mask = dropout_train(x, self.p_retain, self.rng)
        return y

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        return dropout_backward(self._mask, d_out)

    def freeze(self) -> None:
        self.frozen = True

    def unfreeze(self) -> None:
        self.frozen = False
