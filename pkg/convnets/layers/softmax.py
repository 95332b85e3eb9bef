import numpy as np

from ..utils.errors import DimensionError


def softmax(x: np.ndarray) -> np.ndarray:
    if x.ndim != 2 or x.shape[1] < 1:
        raise DimensionError("softmax takes [N, K] logits with K >= 1",
                             shape=tuple(x.shape))
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)
