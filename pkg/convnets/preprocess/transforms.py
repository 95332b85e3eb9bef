"""
Stateless image transforms and the train-fitted statistics they use.
"""
import numpy as np

from ..utils.errors import DimensionError

GCN_EPSILON = 1e-8
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def fit_center(x_train: np.ndarray) -> np.ndarray:
    """Per-dimension mean of the training rows after the /255 rescale."""
    return (x_train / 255.0).mean(axis=0)


def rescale_center(x: np.ndarray, mean: np.ndarray) -> np.ndarray:
    if x.shape[1:] != mean.shape:
        raise DimensionError("centering mean does not match the data",
                             data=tuple(x.shape[1:]), mean=tuple(mean.shape))
    return x / 255.0 - mean


def grayscale(x: np.ndarray) -> np.ndarray:
    if x.ndim != 4 or x.shape[1] != 3:
        raise DimensionError("grayscale needs NCHW input with 3 channels",
                             shape=tuple(x.shape))
    r, g, b = LUMA_WEIGHTS
    gray = r * x[:, 0] + g * x[:, 1] + b * x[:, 2]
    return gray[:, None, :, :]


def gcn(x: np.ndarray, epsilon: float = GCN_EPSILON) -> np.ndarray:
    """Global contrast normalization over flattened rows.

    Each row loses its own mean and is divided by its per-dimension RMS,
    floored at ``epsilon`` so constant rows come out as zeros.
    """
    if x.ndim != 2:
        raise DimensionError("gcn takes flattened [N, D] rows",
                             shape=tuple(x.shape))
    centered = x - x.mean(axis=1, keepdims=True)
    rms = np.sqrt(np.sum(centered ** 2, axis=1, keepdims=True) / x.shape[1])
    return centered / np.maximum(epsilon, rms)


def fit_range(x_train: np.ndarray):
    return float(x_train.min()), float(x_train.max())


def rescale_range(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    span = hi - lo
    if span <= 0:
        return np.zeros_like(x)
    return (x - lo) / span
